#pragma once

#include <string>
#include <vector>

#include "polycall/ir.hpp"

namespace polycall {

struct GraphNode {
    std::string fqn;
    std::string display;
    Lang language = Lang::Cpp;
    bool is_anonymous = false;
    bool is_external = false;

    bool operator==(const GraphNode&) const = default;
    auto operator<=>(const GraphNode&) const = default;
};

struct GraphEdge {
    std::string caller;
    std::string callee;
    bool cross_language = false;
    std::string flag;

    bool operator==(const GraphEdge&) const = default;
    auto operator<=>(const GraphEdge&) const = default;
};

// Nodes and edges are kept sorted and unique; every edge endpoint is a node.
struct CallGraph {
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;

    bool operator==(const CallGraph&) const = default;
};

// Stage 4: merges defs and rewritten calls into one multilingual graph.
// Callees not defined in the repository become external nodes; unresolved
// cross-language calls aim at a per-language <unresolved> node. Throws on a
// caller fqn that names nothing (extractor bug).
CallGraph build_graph(const std::vector<FunctionDef>& defs,
                      const std::vector<ResolvedCall>& calls);

// Deterministic DOT text. Python nodes are boxes, C++ nodes ellipses,
// cross-language edges dashed, external nodes dotted.
std::string emit_dot(const CallGraph& graph);

// Lossless JSON dump with stable key order.
std::string emit_json(const CallGraph& graph);
CallGraph graph_from_json(const std::string& text);

}  // namespace polycall
