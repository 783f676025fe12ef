#include "polycall/lint.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"
#include "polycall/def_index.hpp"

namespace polycall {

namespace {

std::string fqn_unit(const std::string& fqn) {
    size_t sep = fqn.find("::");
    return sep == std::string::npos ? fqn : fqn.substr(0, sep);
}

std::string fqn_name(const std::string& fqn) {
    size_t sep = fqn.rfind("::");
    std::string name = sep == std::string::npos ? fqn : fqn.substr(sep + 2);
    size_t slash = name.rfind('/');
    if (slash != std::string::npos) name = name.substr(0, slash);
    return name;
}

bool has_extension(const std::string& unit, const std::vector<std::string>& exts) {
    std::string ext = unit_extension(unit);
    return std::find(exts.begin(), exts.end(), ext) != exts.end();
}

// Matches an include path against a repository unit: exact, or a trailing
// path component match ("inc/B.h" includes "B.h").
bool include_matches_unit(const std::string& included, const std::string& unit) {
    if (included == unit) return true;
    if (unit.size() > included.size() &&
        unit.compare(unit.size() - included.size(), included.size(), included) == 0 &&
        unit[unit.size() - included.size() - 1] == '/') {
        return true;
    }
    if (included.size() > unit.size() &&
        included.compare(included.size() - unit.size(), unit.size(), unit) == 0 &&
        included[included.size() - unit.size() - 1] == '/') {
        return true;
    }
    return false;
}

std::vector<const BindingRecord*> bindings_of(const std::string& module, const LintInput& in) {
    std::vector<const BindingRecord*> out;
    for (const auto& b : in.bindings) {
        if (b.module == module) out.push_back(&b);
    }
    return out;
}

LintFinding make_finding(Rule rule, const std::string& module, const std::string& unit, int line,
                         std::string message) {
    LintFinding f;
    f.rule = rule;
    f.module = module;
    f.unit = unit;
    f.line = line;
    f.message = std::move(message);
    return f;
}

}  // namespace

const char* to_string(Rule r) {
    switch (r) {
        case Rule::M1: return "M1";
        case Rule::M2: return "M2";
        case Rule::M3: return "M3";
        case Rule::R1: return "R1";
        case Rule::FlagAnon: return "FLAG_ANON";
        case Rule::FlagMultiModule: return "FLAG_MULTI_MODULE";
        case Rule::FlagUnresolved: return "FLAG_UNRESOLVED";
        case Rule::FlagUnusedModule: return "FLAG_UNUSED_MODULE";
    }
    return "M1";
}

Rule parse_rule(const std::string& s) {
    std::string up;
    for (char c : s) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (up == "M1") return Rule::M1;
    if (up == "M2") return Rule::M2;
    if (up == "M3") return Rule::M3;
    if (up == "R1") return Rule::R1;
    if (up == "FLAG_ANON") return Rule::FlagAnon;
    if (up == "FLAG_MULTI_MODULE") return Rule::FlagMultiModule;
    if (up == "FLAG_UNRESOLVED") return Rule::FlagUnresolved;
    if (up == "FLAG_UNUSED_MODULE") return Rule::FlagUnusedModule;
    throw std::runtime_error("unknown rule name: '" + s + "'");
}

bool is_violation(Rule r) {
    return r == Rule::M1 || r == Rule::M2 || r == Rule::M3 || r == Rule::R1;
}

std::vector<LintFinding> check_m1(const std::string& module, const LintInput& in) {
    std::vector<LintFinding> findings;
    bool imported_anywhere = false;
    for (const auto& imp : in.imports) {
        if (imp.imported_name != module) continue;
        imported_anywhere = true;
        if (imp.mechanism == ImportMechanism::Dynamic) {
            findings.push_back(make_finding(
                Rule::M1, module, imp.unit, imp.line,
                "module '" + module + "' is imported dynamically (by string argument), not in "
                "standard import syntax"));
        }
    }
    if (!imported_anywhere) {
        const auto bindings = bindings_of(module, in);
        std::string unit = bindings.empty() ? "" : bindings.front()->unit;
        int line = bindings.empty() ? 0 : bindings.front()->line;
        findings.push_back(make_finding(Rule::FlagUnusedModule, module, unit, line,
                                        "module '" + module +
                                            "' is bound but never imported by any Python unit"));
    }
    return findings;
}

std::vector<LintFinding> check_m2(const std::string& module, const LintInput& in,
                                  const LintOptions& opts) {
    std::vector<LintFinding> findings;
    std::set<std::string> units_seen;
    for (const BindingRecord* b : bindings_of(module, in)) {
        if (!units_seen.insert(b->unit).second) continue;
        std::string stem = unit_stem(b->unit);
        if (stem != module) {
            findings.push_back(make_finding(Rule::M2, module, b->unit, b->line,
                                            "binding unit '" + b->unit +
                                                "' is not named after module '" + module + "'"));
        } else if (!has_extension(b->unit, opts.cpp_source_exts)) {
            findings.push_back(make_finding(Rule::M2, module, b->unit, b->line,
                                            "binding unit '" + b->unit +
                                                "' is not a C++ source file"));
        }
    }

    // multiple modules bound in one unit; the flag is attached to the unit's
    // first module so it is emitted once
    std::map<std::string, std::map<int, std::string>> unit_modules;
    for (const auto& b : in.bindings) unit_modules[b.unit].emplace(b.line, b.module);
    for (const auto& [unit, by_line] : unit_modules) {
        std::set<std::string> distinct;
        for (const auto& [line, mod] : by_line) distinct.insert(mod);
        if (distinct.size() < 2) continue;
        if (by_line.begin()->second != module) continue;
        std::string names;
        for (const auto& m : distinct) names += (names.empty() ? "" : ", ") + m;
        findings.push_back(make_finding(Rule::FlagMultiModule, module, unit,
                                        by_line.begin()->first,
                                        "unit '" + unit + "' defines multiple modules: " + names));
    }
    return findings;
}

std::vector<LintFinding> check_m3(const std::string& module, const LintInput& in,
                                  const LintOptions& opts) {
    std::vector<LintFinding> findings;
    DefIndex index(in.defs);

    // one-level-transitive include reachability per binding unit
    auto reachable_headers = [&](const std::string& unit) {
        std::set<std::string> units;
        std::set<std::string> repo_units;
        for (const auto& d : in.defs) repo_units.insert(d.unit);
        for (const auto& inc : in.includes) repo_units.insert(inc.unit);
        auto expand = [&](const std::string& from, std::set<std::string>& into) {
            for (const auto& inc : in.includes) {
                if (inc.unit != from) continue;
                for (const auto& candidate : repo_units) {
                    if (include_matches_unit(inc.included_path, candidate)) {
                        into.insert(candidate);
                    }
                }
            }
        };
        std::set<std::string> direct;
        expand(unit, direct);
        units = direct;
        for (const auto& u : direct) expand(u, units);
        std::set<std::string> headers;
        for (const auto& u : units) {
            if (has_extension(u, opts.cpp_header_exts)) headers.insert(u);
        }
        return headers;
    };

    for (const BindingRecord* b : bindings_of(module, in)) {
        if (b->status == BindingStatus::Unresolved) {
            findings.push_back(make_finding(Rule::FlagUnresolved, module, b->unit, b->line,
                                            "binding '" + b->exposed_name +
                                                "' could not be resolved to a target function"));
            continue;
        }
        if (b->status == BindingStatus::Anonymous) {
            findings.push_back(make_finding(Rule::FlagAnon, module, b->unit, b->line,
                                            "binding '" + b->exposed_name +
                                                "' targets an anonymous function"));
            findings.push_back(make_finding(Rule::M3, module, b->unit, b->line,
                                            "anonymous target of '" + b->exposed_name +
                                                "' is implemented directly in the binding unit"));
            continue;
        }

        std::string target_name = fqn_name(b->target_fqn);
        bool impl_in_binding = false;
        bool decl_in_header = false;
        std::string decl_header;
        std::set<std::string> headers = reachable_headers(b->unit);
        for (const auto& d : in.defs) {
            if (index.canonical_fqn(d) != b->target_fqn) continue;
            if (d.has_body && d.unit == b->unit) impl_in_binding = true;
            if (!d.has_body && headers.count(d.unit)) {
                decl_in_header = true;
                decl_header = d.unit;
            }
        }
        if (impl_in_binding) {
            findings.push_back(make_finding(
                Rule::M3, module, b->unit, b->line,
                "implementation of '" + target_name + "' is defined in the binding unit"));
            continue;
        }
        if (!decl_in_header) {
            findings.push_back(make_finding(
                Rule::M3, module, b->unit, b->line,
                "no declaration of '" + target_name + "' found in a header included by '" +
                    b->unit + "' (binding-component or target-component header both accepted)"));
        }
    }
    return findings;
}

std::vector<LintFinding> check_r1(const std::string& module, const LintInput& in) {
    std::vector<LintFinding> findings;
    std::set<std::string> units_seen;
    for (const BindingRecord* b : bindings_of(module, in)) {
        if (!units_seen.insert(b->unit).second) continue;
        std::string stem = unit_stem(b->unit);
        const IncludeRecord* matching = nullptr;
        for (const auto& inc : in.includes) {
            if (inc.unit != b->unit) continue;
            if (unit_stem(inc.included_path) == stem) {
                matching = &inc;
                break;
            }
        }
        if (matching == nullptr) continue;  // no component header to check
        if (!matching->is_first_substantive) {
            findings.push_back(make_finding(Rule::R1, module, b->unit, matching->line,
                                            "include of component header '" +
                                                matching->included_path +
                                                "' is not the first substantive line"));
        }
    }
    return findings;
}

std::vector<std::string> binding_modules(const std::vector<BindingRecord>& bindings) {
    std::set<std::string> set;
    for (const auto& b : bindings) set.insert(b.module);
    return {set.begin(), set.end()};
}

std::vector<LintFinding> run_lint(const LintInput& in, const LintOptions& opts) {
    std::vector<LintFinding> findings;
    for (const auto& module : binding_modules(in.bindings)) {
        if (opts.check_m1) {
            auto f = check_m1(module, in);
            findings.insert(findings.end(), f.begin(), f.end());
        }
        if (opts.check_m2) {
            auto f = check_m2(module, in, opts);
            findings.insert(findings.end(), f.begin(), f.end());
        }
        if (opts.check_m3) {
            auto f = check_m3(module, in, opts);
            findings.insert(findings.end(), f.begin(), f.end());
        }
        if (opts.check_r1) {
            auto f = check_r1(module, in);
            findings.insert(findings.end(), f.begin(), f.end());
        }
    }
    std::sort(findings.begin(), findings.end(), [](const LintFinding& a, const LintFinding& b) {
        return std::make_tuple(a.module, std::string(to_string(a.rule)), a.unit, a.line,
                               a.message) <
               std::make_tuple(b.module, std::string(to_string(b.rule)), b.unit, b.line,
                               b.message);
    });
    return findings;
}

ComplianceReport aggregate(const std::vector<LintFinding>& findings,
                           const std::vector<std::string>& modules) {
    ComplianceReport report;
    for (const auto& m : modules) report.per_module[m];
    for (const auto& f : findings) {
        auto it = report.per_module.find(f.module);
        if (it == report.per_module.end()) continue;
        switch (f.rule) {
            case Rule::M1: it->second.m1_pass = false; break;
            case Rule::M2: it->second.m2_pass = false; break;
            case Rule::M3: it->second.m3_pass = false; break;
            case Rule::FlagAnon: it->second.uses_lambda = true; break;
            default: break;
        }
    }
    report.counts.total = static_cast<int>(report.per_module.size());
    for (const auto& [name, mc] : report.per_module) {
        if (mc.meets_all()) ++report.counts.meeting_all;
        if (!mc.m1_pass) ++report.counts.failing_m1;
        if (!mc.m2_pass) ++report.counts.failing_m2;
        if (!mc.m3_pass) ++report.counts.failing_m3;
        report.per_repo.meets_all = report.per_repo.meets_all && mc.meets_all();
        report.per_repo.fails_m2 = report.per_repo.fails_m2 || !mc.m2_pass;
        report.per_repo.fails_m3 = report.per_repo.fails_m3 || !mc.m3_pass;
        report.per_repo.uses_lambda = report.per_repo.uses_lambda || mc.uses_lambda;
    }
    return report;
}

std::string report_json(const ComplianceReport& report,
                        const std::vector<LintFinding>& findings) {
    nlohmann::json j;
    j["counts"] = {
        {"modules_total", report.counts.total},
        {"modules_meeting_all", report.counts.meeting_all},
        {"modules_failing_m1", report.counts.failing_m1},
        {"modules_failing_m2", report.counts.failing_m2},
        {"modules_failing_m3", report.counts.failing_m3},
    };
    j["modules"] = nlohmann::json::object();
    for (const auto& [name, mc] : report.per_module) {
        j["modules"][name] = {
            {"m1_pass", mc.m1_pass},
            {"m2_pass", mc.m2_pass},
            {"m3_pass", mc.m3_pass},
            {"uses_lambda", mc.uses_lambda},
        };
    }
    j["repository"] = {
        {"meets_all", report.per_repo.meets_all},
        {"fails_m2", report.per_repo.fails_m2},
        {"fails_m3", report.per_repo.fails_m3},
        {"uses_lambda", report.per_repo.uses_lambda},
    };
    j["findings"] = nlohmann::json::array();
    for (const auto& f : findings) {
        j["findings"].push_back({
            {"rule", to_string(f.rule)},
            {"module", f.module},
            {"unit", f.unit},
            {"line", f.line},
            {"message", f.message},
        });
    }
    return j.dump(2) + "\n";
}

std::string report_text(const ComplianceReport& report,
                        const std::vector<LintFinding>& findings) {
    std::ostringstream out;
    out << "module compliance\n";
    out << "  module                     M1    M2    M3    lambda\n";
    for (const auto& [name, mc] : report.per_module) {
        out << "  " << name;
        for (size_t i = name.size(); i < 27; ++i) out << ' ';
        out << (mc.m1_pass ? "ok  " : "FAIL") << "  " << (mc.m2_pass ? "ok  " : "FAIL") << "  "
            << (mc.m3_pass ? "ok  " : "FAIL") << "  " << (mc.uses_lambda ? "yes" : "no") << "\n";
    }
    out << "\n";
    int n = report.counts.total;
    auto row = [&](const std::string& label, bool rep_bad, int mod_count) {
        out << "  " << label;
        for (size_t i = label.size(); i < 34; ++i) out << ' ';
        std::string rep = rep_bad ? "yes" : "no";
        out << rep;
        for (size_t i = rep.size(); i < 7; ++i) out << ' ';
        out << mod_count << "/" << n << "\n";
    };
    out << "summary                             Rep.   Mod.\n";
    out << "  meets M1-M3";
    for (size_t i = std::string("meets M1-M3").size(); i < 34; ++i) out << ' ';
    {
        std::string rep = report.per_repo.meets_all ? "yes" : "no";
        out << rep;
        for (size_t i = rep.size(); i < 7; ++i) out << ' ';
        out << report.counts.meeting_all << "/" << n << "\n";
    }
    row("binding misname (fails M2)", report.per_repo.fails_m2, report.counts.failing_m2);
    row("impl. in binding (fails M3)", report.per_repo.fails_m3, report.counts.failing_m3);
    {
        int lambda_modules = 0;
        for (const auto& [name, mc] : report.per_module) {
            if (mc.uses_lambda) ++lambda_modules;
        }
        row("uses lambda", report.per_repo.uses_lambda, lambda_modules);
    }
    if (!findings.empty()) {
        out << "\nfindings\n";
        for (const auto& f : findings) {
            out << "  " << to_string(f.rule) << " " << f.unit << ":" << f.line << " [" << f.module
                << "] " << f.message << "\n";
        }
    }
    return out.str();
}

}  // namespace polycall
