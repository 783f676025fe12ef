#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "polycall/config.hpp"
#include "polycall/ir.hpp"

namespace polycall {

struct DiscoveredUnit {
    std::filesystem::path absolute;
    SourceUnit unit;
};

// Walks the given roots and classifies files by extension. Results are
// sorted by repository-relative path so traversal order never leaks into
// any artifact.
std::vector<DiscoveredUnit> discover_units(const std::vector<std::filesystem::path>& roots,
                                           const Config& cfg);

struct ExtractStats {
    int python_units = 0;
    int cpp_units = 0;
    UnitDiagnostics diagnostics;
};

// Runs both extractors over the discovered units and merges the records.
IrTables extract_units(const std::vector<DiscoveredUnit>& units, ExtractStats* stats);

// The six extraction CSVs.
void write_ir(const IrTables& ir, const std::filesystem::path& dir);
IrTables read_ir(const std::filesystem::path& dir);

// bindings.csv and calls_resolved.csv.
void write_resolved(const ResolvedTables& tables, const std::filesystem::path& dir);
ResolvedTables read_resolved(const std::filesystem::path& dir);

bool ir_present(const std::filesystem::path& dir);
bool resolved_present(const std::filesystem::path& dir);

}  // namespace polycall
