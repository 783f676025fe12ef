#pragma once

#include <vector>

#include "polycall/ir.hpp"

namespace polycall {

// Stage 3, pybind11 flavor: turns raw .def bindings into resolved binding
// records and rewrites Python calls into binding modules so they point at the
// bound C++ functions. Only the Python-calls-C++ direction is handled.

// Exposed names resolve through reaching definitions over the module-block
// and file-scope assignments; targets resolve against the C++ defs table.
std::vector<BindingRecord> resolve_bindings(const std::vector<RawBinding>& raw,
                                            const std::vector<AssignRecord>& assigns,
                                            const std::vector<FunctionDef>& defs);

// Total rewrite: every input call yields exactly one ResolvedCall. Cross
// language calls carry the target fqn(s); calls into a bound module that
// cannot be resolved are flagged, everything else passes through.
std::vector<ResolvedCall> rewrite_calls(const std::vector<CallSite>& calls,
                                        const std::vector<ImportRecord>& imports,
                                        const std::vector<BindingRecord>& bindings);

// Both steps over one extraction run, outputs canonically sorted.
ResolvedTables resolve_tables(const IrTables& ir);

}  // namespace polycall
