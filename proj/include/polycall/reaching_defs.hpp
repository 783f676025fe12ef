#pragma once

#include <string>
#include <vector>

#include "polycall/ir.hpp"

namespace polycall {

enum class ResolutionStatus { Resolved, Unresolved, NotAString };

struct Resolution {
    ResolutionStatus status = ResolutionStatus::Unresolved;
    std::string value;  // set iff status == Resolved
    std::vector<std::string> reasons;
};

struct UseSite {
    std::string unit;
    int line = 0;
    std::string scope_fqn;
};

// Resolves a call-site argument to a unique string literal. A string literal
// resolves to itself. An identifier resolves through the assignments that
// reach the use site: in-scope assignments shadow file-scope ones, only
// assignments on earlier lines reach, and the result is RESOLVED only when
// every reaching assignment is a literal and all reaching literals agree.
Resolution resolve_string_arg(const ArgValue& arg, const UseSite& use,
                              const std::vector<AssignRecord>& assigns);

}  // namespace polycall
