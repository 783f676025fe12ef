#include "polycall/reaching_defs.hpp"

#include <algorithm>
#include <set>

namespace polycall {

namespace {

bool is_file_scope(const std::string& scope_fqn) {
    return scope_fqn == kModuleScope || scope_fqn == kFileScope;
}

}  // namespace

Resolution resolve_string_arg(const ArgValue& arg, const UseSite& use,
                              const std::vector<AssignRecord>& assigns) {
    Resolution res;
    if (arg.form == ArgForm::StringLiteral) {
        res.status = ResolutionStatus::Resolved;
        res.value = arg.literal;
        return res;
    }
    if (arg.form != ArgForm::Identifier) {
        res.status = ResolutionStatus::NotAString;
        res.reasons.push_back("argument '" + arg.text + "' is not a string or identifier");
        return res;
    }

    std::vector<const AssignRecord*> in_scope;
    std::vector<const AssignRecord*> file_scope;
    for (const auto& a : assigns) {
        if (a.unit != use.unit || a.variable != arg.text) continue;
        if (a.line >= use.line) continue;
        if (a.scope_fqn == use.scope_fqn) in_scope.push_back(&a);
        else if (is_file_scope(a.scope_fqn)) file_scope.push_back(&a);
    }
    // In-scope assignments shadow file-scope ones.
    const auto& reaching = !in_scope.empty() ? in_scope : file_scope;
    if (reaching.empty()) {
        res.status = ResolutionStatus::Unresolved;
        res.reasons.push_back("no assignment of '" + arg.text + "' reaches " + use.unit + ":" +
                              std::to_string(use.line));
        return res;
    }

    std::set<std::string> literals;
    bool poisoned = false;
    for (const AssignRecord* a : reaching) {
        if (a->value_form == ValueForm::StringLiteral) {
            literals.insert(a->literal);
        } else {
            poisoned = true;
            res.reasons.push_back("non-literal assignment of '" + arg.text + "' at line " +
                                  std::to_string(a->line) + " reaches the use");
        }
    }
    if (!poisoned && literals.size() == 1) {
        res.status = ResolutionStatus::Resolved;
        res.value = *literals.begin();
        return res;
    }
    res.status = ResolutionStatus::Unresolved;
    if (literals.size() > 1) {
        std::string values;
        for (const auto& v : literals) values += (values.empty() ? "" : ", ") + ("'" + v + "'");
        res.reasons.push_back("multiple distinct literals reach '" + arg.text + "': " + values);
    }
    if (literals.empty() && !poisoned) {
        res.reasons.push_back("no literal assignment of '" + arg.text + "' reaches the use");
    }
    return res;
}

}  // namespace polycall
