#include "polycall/pipeline.hpp"

#include <algorithm>

#include "polycall/cpp_extractor.hpp"
#include "polycall/csv.hpp"
#include "polycall/python_extractor.hpp"

namespace fs = std::filesystem;

namespace polycall {

namespace {

bool ext_in(const std::string& ext, const std::vector<std::string>& exts) {
    return std::find(exts.begin(), exts.end(), ext) != exts.end();
}

void classify(const fs::path& absolute, const std::string& relative, const Config& cfg,
              std::vector<DiscoveredUnit>& out) {
    std::string ext = absolute.extension().string();
    SourceUnit unit;
    unit.path = relative;
    if (ext_in(ext, cfg.py_exts)) {
        unit.language = Lang::Python;
        unit.kind = UnitKind::Script;
    } else if (ext_in(ext, cfg.cpp_source_exts)) {
        unit.language = Lang::Cpp;
        unit.kind = UnitKind::Source;
    } else if (ext_in(ext, cfg.cpp_header_exts)) {
        unit.language = Lang::Cpp;
        unit.kind = UnitKind::Header;
    } else {
        return;
    }
    out.push_back({absolute, std::move(unit)});
}

}  // namespace

std::vector<DiscoveredUnit> discover_units(const std::vector<fs::path>& roots,
                                           const Config& cfg) {
    std::vector<DiscoveredUnit> out;
    for (const auto& root : roots) {
        if (fs::is_regular_file(root)) {
            classify(root, root.filename().generic_string(), cfg, out);
            continue;
        }
        if (!fs::is_directory(root)) continue;
        for (const auto& entry : fs::recursive_directory_iterator(root)) {
            if (!entry.is_regular_file()) continue;
            std::string relative = fs::relative(entry.path(), root).generic_string();
            classify(entry.path(), relative, cfg, out);
        }
    }
    std::sort(out.begin(), out.end(), [](const DiscoveredUnit& a, const DiscoveredUnit& b) {
        return a.unit.path < b.unit.path;
    });
    return out;
}

IrTables extract_units(const std::vector<DiscoveredUnit>& units, ExtractStats* stats) {
    IrTables ir;
    for (const auto& du : units) {
        std::string text = csv::read_text_file(du.absolute);
        if (du.unit.language == Lang::Python) {
            PythonExtraction px = parse_python_unit(text, du.unit.path);
            if (stats != nullptr) {
                ++stats->python_units;
                stats->diagnostics.merge(px.diagnostics);
            }
            ir.defs.insert(ir.defs.end(), px.defs.begin(), px.defs.end());
            ir.calls.insert(ir.calls.end(), px.calls.begin(), px.calls.end());
            ir.imports.insert(ir.imports.end(), px.imports.begin(), px.imports.end());
            ir.assigns.insert(ir.assigns.end(), px.assigns.begin(), px.assigns.end());
        } else {
            CppExtraction cx = parse_cpp_unit(text, du.unit.path);
            if (stats != nullptr) {
                ++stats->cpp_units;
                stats->diagnostics.merge(cx.diagnostics);
            }
            ir.defs.insert(ir.defs.end(), cx.defs.begin(), cx.defs.end());
            ir.calls.insert(ir.calls.end(), cx.calls.begin(), cx.calls.end());
            ir.includes.insert(ir.includes.end(), cx.includes.begin(), cx.includes.end());
            ir.assigns.insert(ir.assigns.end(), cx.assigns.begin(), cx.assigns.end());
            ir.raw_bindings.insert(ir.raw_bindings.end(), cx.raw_bindings.begin(),
                                   cx.raw_bindings.end());
        }
    }
    return ir;
}

void write_ir(const IrTables& ir, const fs::path& dir) {
    fs::create_directories(dir);
    csv::write_file(ir.defs, dir);
    csv::write_file(ir.calls, dir);
    csv::write_file(ir.imports, dir);
    csv::write_file(ir.assigns, dir);
    csv::write_file(ir.includes, dir);
    csv::write_file(ir.raw_bindings, dir);
}

IrTables read_ir(const fs::path& dir) {
    IrTables ir;
    ir.defs = csv::read_file<FunctionDef>(dir);
    ir.calls = csv::read_file<CallSite>(dir);
    ir.imports = csv::read_file<ImportRecord>(dir);
    ir.assigns = csv::read_file<AssignRecord>(dir);
    ir.includes = csv::read_file<IncludeRecord>(dir);
    ir.raw_bindings = csv::read_file<RawBinding>(dir);
    return ir;
}

void write_resolved(const ResolvedTables& tables, const fs::path& dir) {
    fs::create_directories(dir);
    csv::write_file(tables.bindings, dir);
    csv::write_file(tables.calls, dir);
}

ResolvedTables read_resolved(const fs::path& dir) {
    ResolvedTables tables;
    tables.bindings = csv::read_file<BindingRecord>(dir);
    tables.calls = csv::read_file<ResolvedCall>(dir);
    return tables;
}

bool ir_present(const fs::path& dir) {
    return fs::exists(csv::csv_path<FunctionDef>(dir)) &&
           fs::exists(csv::csv_path<CallSite>(dir)) &&
           fs::exists(csv::csv_path<ImportRecord>(dir)) &&
           fs::exists(csv::csv_path<AssignRecord>(dir)) &&
           fs::exists(csv::csv_path<IncludeRecord>(dir)) &&
           fs::exists(csv::csv_path<RawBinding>(dir));
}

bool resolved_present(const fs::path& dir) {
    return fs::exists(csv::csv_path<BindingRecord>(dir)) &&
           fs::exists(csv::csv_path<ResolvedCall>(dir));
}

}  // namespace polycall
