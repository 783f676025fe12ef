#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polycall/ir.hpp"

namespace polycall {

// Canonical function identities over a defs table. Declarations merge into
// their unique matching definition (same unit first, then repository-wide);
// same-named definitions in one unit are kept distinct with a "/K" ordinal
// suffix on the fqn.
class DefIndex {
public:
    struct NodeInfo {
        std::string fqn;
        std::string display;
        Lang language = Lang::Cpp;
        bool is_anonymous = false;
    };

    explicit DefIndex(const std::vector<FunctionDef>& defs);

    // Canonical node identity for one defs row.
    const std::string& canonical_fqn(const FunctionDef& def) const;

    // All canonical nodes, sorted by fqn.
    const std::vector<NodeInfo>& nodes() const { return nodes_; }

    bool contains(const std::string& fqn) const { return by_fqn_.count(fqn) != 0; }
    const NodeInfo* node(const std::string& fqn) const;

    // Binding-target lookup: a definition in `unit` wins, then a declaration
    // in `unit`, then a unique repository-wide candidate. `qualifiers` must be
    // a suffix of the candidate's scope.
    std::optional<std::string> resolve_target(const std::string& name,
                                              const std::vector<std::string>& qualifiers,
                                              const std::string& unit) const;

    // The anonymous def co-emitted at a binding line.
    std::optional<std::string> resolve_anonymous(const std::string& unit, int line) const;

    // Plain callee resolution for graph edges: same unit first, then a unique
    // repository-wide match in the same language.
    std::optional<std::string> resolve_callee(const std::string& callee_expr,
                                              const std::string& unit, Lang language) const;

private:
    struct Entry {
        FunctionDef def;
        std::string canonical;
    };

    std::vector<Entry> entries_;
    std::map<std::string, NodeInfo> by_fqn_;
    std::vector<NodeInfo> nodes_;
    std::map<std::string, size_t> row_index_;
    std::map<std::string, std::vector<size_t>> by_name_;  // def name -> entry indices

    static std::string row_key(const FunctionDef& def);
    const Entry* find_entry(const FunctionDef& def) const;
    const std::vector<size_t>& entries_named(const std::string& name) const;
};

// Splits "ns::f" / "&ns::f" / "a.b" into qualifier parts plus the final name.
struct CalleeParts {
    std::vector<std::string> qualifiers;
    std::string name;
    bool qualified_by_scope = false;  // used "::"
    bool attribute_access = false;    // used "." or "->"
};
CalleeParts split_callee(const std::string& expr);

}  // namespace polycall
