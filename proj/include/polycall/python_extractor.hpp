#pragma once

#include <string>
#include <string_view>

#include "polycall/ir.hpp"

namespace polycall {

struct PythonExtraction {
    std::vector<FunctionDef> defs;
    std::vector<CallSite> calls;
    std::vector<ImportRecord> imports;
    std::vector<AssignRecord> assigns;
    UnitDiagnostics diagnostics;
};

// Parses the supported Python subset: imports (standard and string-argument
// dynamic forms), def/class nesting with scope tracking, name and attribute
// calls, simple assignments, and lambdas (emitted as anonymous defs).
// Unsupported constructs are skipped and tallied, never fatal.
PythonExtraction parse_python_unit(std::string_view source, const std::string& path);

}  // namespace polycall
