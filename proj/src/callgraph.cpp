#include "polycall/callgraph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "polycall/def_index.hpp"

namespace polycall {

namespace {

std::string pseudo_node_fqn(const std::string& unit, const std::string& pseudo) {
    return make_fqn(unit, {}, pseudo);
}

std::string pseudo_display(const std::string& unit, const std::string& pseudo) {
    return unit_stem(unit) + ":" + pseudo;
}

std::string external_fqn(Lang lang, const std::string& expr) {
    return std::string("<ext:") + to_string(lang) + ":" + expr + ">";
}

std::string unresolved_fqn(Lang lang) {
    return std::string("<unresolved:") + to_string(lang) + ">";
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

CallGraph build_graph(const std::vector<FunctionDef>& defs,
                      const std::vector<ResolvedCall>& calls) {
    DefIndex index(defs);
    std::map<std::string, GraphNode> nodes;
    std::set<GraphEdge> edges;

    // overload-suffixed canonical fqns, keyed by their base fqn
    std::map<std::string, std::string> overload_alias;
    for (const auto& info : index.nodes()) {
        GraphNode n;
        n.fqn = info.fqn;
        n.display = info.display;
        n.language = info.language;
        n.is_anonymous = info.is_anonymous;
        size_t slash = info.fqn.rfind('/');
        if (slash != std::string::npos) {
            overload_alias.emplace(info.fqn.substr(0, slash), info.fqn);
        }
        nodes.emplace(n.fqn, std::move(n));
    }

    auto ensure_pseudo = [&](const std::string& unit, const std::string& pseudo, Lang lang) {
        std::string fqn = pseudo_node_fqn(unit, pseudo);
        if (!nodes.count(fqn)) {
            GraphNode n;
            n.fqn = fqn;
            n.display = pseudo_display(unit, pseudo);
            n.language = lang;
            nodes.emplace(fqn, std::move(n));
        }
        return fqn;
    };

    auto ensure_external = [&](Lang lang, const std::string& expr) {
        std::string fqn = external_fqn(lang, expr);
        if (!nodes.count(fqn)) {
            GraphNode n;
            n.fqn = fqn;
            n.display = expr;
            n.language = lang;
            n.is_external = true;
            nodes.emplace(fqn, std::move(n));
        }
        return fqn;
    };

    auto ensure_unresolved = [&](Lang lang) {
        std::string fqn = unresolved_fqn(lang);
        if (!nodes.count(fqn)) {
            GraphNode n;
            n.fqn = fqn;
            n.display = kUnresolved;
            n.language = lang;
            n.is_external = true;
            nodes.emplace(fqn, std::move(n));
        }
        return fqn;
    };

    for (const auto& rc : calls) {
        const CallSite& call = rc.call;
        std::string caller;
        if (call.caller_fqn == kModuleScope || call.caller_fqn == kFileScope) {
            caller = ensure_pseudo(call.unit, call.caller_fqn, call.language);
        } else {
            caller = call.caller_fqn;
            if (!nodes.count(caller)) {
                // tolerate overload-suffixed canonical callers
                auto alias = overload_alias.find(caller);
                if (alias == overload_alias.end()) {
                    throw std::runtime_error("call site caller '" + call.caller_fqn +
                                             "' does not name an extracted function (unit " +
                                             call.unit + ", line " + std::to_string(call.line) +
                                             ")");
                }
                caller = alias->second;
            }
        }

        GraphEdge edge;
        edge.caller = caller;
        edge.flag = rc.flag;
        if (rc.cross_language) {
            edge.cross_language = true;
            // several candidate targets are ';'-joined
            std::string rest = rc.resolved_callee;
            while (!rest.empty()) {
                size_t semi = rest.find(';');
                std::string target = rest.substr(0, semi);
                rest = semi == std::string::npos ? "" : rest.substr(semi + 1);
                if (!nodes.count(target)) {
                    throw std::runtime_error("cross-language call target '" + target +
                                             "' is not an extracted function");
                }
                GraphEdge e = edge;
                e.callee = target;
                edges.insert(std::move(e));
            }
            continue;
        }
        if (rc.flag == kFlagUnresolvedCross) {
            edge.callee = ensure_unresolved(Lang::Cpp);
            edges.insert(std::move(edge));
            continue;
        }
        auto resolved = index.resolve_callee(call.callee_expr, call.unit, call.language);
        edge.callee = resolved.has_value() ? *resolved
                                           : ensure_external(call.language, call.callee_expr);
        edges.insert(std::move(edge));
    }

    CallGraph graph;
    graph.nodes.reserve(nodes.size());
    for (const auto& [fqn, node] : nodes) graph.nodes.push_back(node);
    graph.edges.assign(edges.begin(), edges.end());
    return graph;
}

std::string emit_dot(const CallGraph& graph) {
    std::string out = "digraph G {\n";
    std::vector<GraphNode> nodes = graph.nodes;
    std::sort(nodes.begin(), nodes.end());
    for (const auto& n : nodes) {
        out += "  \"" + dot_escape(n.fqn) + "\" [label=\"" + dot_escape(n.display) + "\", shape=";
        out += n.language == Lang::Python ? "box" : "ellipse";
        if (n.is_external) out += ", style=dotted";
        else if (n.is_anonymous) out += ", style=filled";
        out += "];\n";
    }
    std::vector<GraphEdge> edges = graph.edges;
    std::sort(edges.begin(), edges.end());
    for (const auto& e : edges) {
        out += "  \"" + dot_escape(e.caller) + "\" -> \"" + dot_escape(e.callee) + "\"";
        if (e.cross_language) out += " [style=dashed]";
        else if (e.flag == kFlagUnresolvedCross) out += " [style=dotted]";
        out += ";\n";
    }
    out += "}\n";
    return out;
}

std::string emit_json(const CallGraph& graph) {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    j["edges"] = nlohmann::json::array();
    std::vector<GraphNode> nodes = graph.nodes;
    std::sort(nodes.begin(), nodes.end());
    for (const auto& n : nodes) {
        nlohmann::json jn;
        jn["fqn"] = n.fqn;
        jn["display"] = n.display;
        jn["language"] = to_string(n.language);
        jn["is_anonymous"] = n.is_anonymous;
        jn["is_external"] = n.is_external;
        j["nodes"].push_back(std::move(jn));
    }
    std::vector<GraphEdge> edges = graph.edges;
    std::sort(edges.begin(), edges.end());
    for (const auto& e : edges) {
        nlohmann::json je;
        je["caller"] = e.caller;
        je["callee"] = e.callee;
        je["cross_language"] = e.cross_language;
        je["flag"] = e.flag;
        j["edges"].push_back(std::move(je));
    }
    return j.dump(2) + "\n";
}

CallGraph graph_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    CallGraph graph;
    for (const auto& jn : j.at("nodes")) {
        GraphNode n;
        n.fqn = jn.at("fqn").get<std::string>();
        n.display = jn.at("display").get<std::string>();
        n.language = parse_lang(jn.at("language").get<std::string>());
        n.is_anonymous = jn.at("is_anonymous").get<bool>();
        n.is_external = jn.at("is_external").get<bool>();
        graph.nodes.push_back(std::move(n));
    }
    for (const auto& je : j.at("edges")) {
        GraphEdge e;
        e.caller = je.at("caller").get<std::string>();
        e.callee = je.at("callee").get<std::string>();
        e.cross_language = je.at("cross_language").get<bool>();
        e.flag = je.at("flag").get<std::string>();
        graph.edges.push_back(std::move(e));
    }
    std::sort(graph.nodes.begin(), graph.nodes.end());
    std::sort(graph.edges.begin(), graph.edges.end());
    return graph;
}

}  // namespace polycall
