#pragma once

#include <string>
#include <string_view>

#include "polycall/ir.hpp"

namespace polycall {

struct CppExtraction {
    std::vector<FunctionDef> defs;
    std::vector<CallSite> calls;
    std::vector<IncludeRecord> includes;
    std::vector<AssignRecord> assigns;
    std::vector<RawBinding> raw_bindings;
    UnitDiagnostics diagnostics;
};

// Parses the supported C++ subset: includes (with first-substantive-line
// tracking), namespace/class scopes, free-function declarations and
// definitions, calls and assignments inside bodies, and PYBIND11_MODULE
// blocks with their .def bindings. Comments and literals are masked before
// any structural scan. Unsupported constructs are tallied, never fatal.
CppExtraction parse_cpp_unit(std::string_view source, const std::string& path);

}  // namespace polycall
