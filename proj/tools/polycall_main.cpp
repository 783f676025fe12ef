#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "polycall/callgraph.hpp"
#include "polycall/config.hpp"
#include "polycall/csv.hpp"
#include "polycall/ffi_resolve.hpp"
#include "polycall/lint.hpp"
#include "polycall/pipeline.hpp"

namespace fs = std::filesystem;
using namespace polycall;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolations = 1;
constexpr int kExitError = 2;

void print_extract_summary(const ExtractStats& stats) {
    std::cerr << "units: PY=" << stats.python_units << " CPP=" << stats.cpp_units << "\n";
    if (!stats.diagnostics.skipped.empty()) {
        std::cerr << "skipped constructs:";
        for (const auto& [kind, count] : stats.diagnostics.skipped) {
            std::cerr << " " << kind << "=" << count;
        }
        std::cerr << "\n";
    }
    for (const auto& w : stats.diagnostics.warnings) std::cerr << "warning: " << w << "\n";
}

int run_extract(const std::vector<std::string>& paths, const Config& cfg) {
    std::vector<fs::path> roots(paths.begin(), paths.end());
    for (const auto& r : roots) {
        if (!fs::exists(r)) {
            std::cerr << "error: path does not exist: " << r.string() << "\n";
            return kExitError;
        }
    }
    ExtractStats stats;
    std::vector<DiscoveredUnit> units = discover_units(roots, cfg);
    if (units.empty()) {
        std::cerr << "error: no recognizable source units under the given paths\n";
        return kExitError;
    }
    IrTables ir = extract_units(units, &stats);
    write_ir(ir, cfg.out_dir);
    print_extract_summary(stats);
    return kExitOk;
}

int run_resolve(const std::string& ir_dir) {
    if (!ir_present(ir_dir)) {
        std::cerr << "error: extraction CSVs not found in '" << ir_dir
                  << "'; run 'polycall extract' first\n";
        return kExitError;
    }
    IrTables ir = read_ir(ir_dir);
    ResolvedTables tables = resolve_tables(ir);
    write_resolved(tables, ir_dir);
    int resolved = 0, anonymous = 0, unresolved = 0;
    for (const auto& b : tables.bindings) {
        switch (b.status) {
            case BindingStatus::Resolved: ++resolved; break;
            case BindingStatus::Anonymous: ++anonymous; break;
            case BindingStatus::Unresolved: ++unresolved; break;
        }
    }
    int total = static_cast<int>(tables.bindings.size());
    std::cout << total << " binding" << (total == 1 ? "" : "s") << " (" << resolved << "/"
              << anonymous << "/" << unresolved << ")\n";
    return kExitOk;
}

int run_graph(const std::string& ir_dir, const std::string& format, std::string out_path) {
    if (!ir_present(ir_dir) || !resolved_present(ir_dir)) {
        std::cerr << "error: resolved CSVs not found in '" << ir_dir
                  << "'; run 'polycall resolve' first\n";
        return kExitError;
    }
    IrTables ir = read_ir(ir_dir);
    ResolvedTables tables = read_resolved(ir_dir);
    CallGraph graph = build_graph(ir.defs, tables.calls);
    std::string text = format == "json" ? emit_json(graph) : emit_dot(graph);
    if (out_path.empty()) {
        out_path = (fs::path(ir_dir) / (format == "json" ? "graph.json" : "graph.dot")).string();
    }
    csv::write_text_file(out_path, text);
    std::cerr << "graph written to " << out_path << "\n";
    return kExitOk;
}

struct LintResult {
    int exit_code = kExitOk;
    std::string text;
    std::string json;
};

LintResult lint_tables(const IrTables& ir, const ResolvedTables& tables, const Config& cfg) {
    LintInput input;
    input.defs = ir.defs;
    input.imports = ir.imports;
    input.includes = ir.includes;
    input.bindings = tables.bindings;
    input.calls = tables.calls;
    std::vector<LintFinding> findings = run_lint(input, cfg.lint_options());
    ComplianceReport report = aggregate(findings, binding_modules(input.bindings));
    LintResult result;
    result.text = report_text(report, findings);
    result.json = report_json(report, findings);
    bool violations = false;
    bool advisories = false;
    for (const auto& f : findings) {
        if (is_violation(f.rule)) violations = true;
        else advisories = true;
    }
    if (violations || (cfg.strict && advisories)) result.exit_code = kExitViolations;
    return result;
}

int run_lint_cmd(const std::string& ir_dir, const Config& cfg, const std::string& format,
                 const std::string& out_path) {
    if (!ir_present(ir_dir) || !resolved_present(ir_dir)) {
        std::cerr << "error: resolved CSVs not found in '" << ir_dir
                  << "'; run 'polycall resolve' first\n";
        return kExitError;
    }
    IrTables ir = read_ir(ir_dir);
    ResolvedTables tables = read_resolved(ir_dir);
    LintResult result = lint_tables(ir, tables, cfg);
    const std::string& report = format == "json" ? result.json : result.text;
    if (!out_path.empty()) {
        csv::write_text_file(out_path, report);
    } else {
        std::cout << report;
    }
    return result.exit_code;
}

int run_check(const std::string& root, const Config& cfg) {
    std::vector<fs::path> roots = {root};
    if (!fs::exists(root)) {
        std::cerr << "error: path does not exist: " << root << "\n";
        return kExitError;
    }
    std::vector<DiscoveredUnit> units = discover_units(roots, cfg);
    if (units.empty()) {
        std::cerr << "error: no recognizable source units under '" << root << "'\n";
        return kExitError;
    }
    ExtractStats stats;
    IrTables ir = extract_units(units, &stats);
    write_ir(ir, cfg.out_dir);
    ResolvedTables tables = resolve_tables(ir);
    write_resolved(tables, cfg.out_dir);
    CallGraph graph = build_graph(ir.defs, tables.calls);
    csv::write_text_file(fs::path(cfg.out_dir) / "graph.dot", emit_dot(graph));
    csv::write_text_file(fs::path(cfg.out_dir) / "graph.json", emit_json(graph));
    LintResult lint_result = lint_tables(ir, tables, cfg);
    csv::write_text_file(fs::path(cfg.out_dir) / "report.json", lint_result.json);

    print_extract_summary(stats);
    int modules = static_cast<int>(binding_modules(tables.bindings).size());
    std::cout << modules << " module" << (modules == 1 ? "" : "s") << ", "
              << tables.bindings.size() << " binding" << (tables.bindings.size() == 1 ? "" : "s")
              << "; artifacts in " << cfg.out_dir << "\n";
    std::cout << lint_result.text;
    return lint_result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polycall: Python/C++ call-graph extraction and binding-layout linting"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "Config file (key = value lines)");

    // shared flag storage; each subcommand registers what it honors
    std::vector<std::string> paths;
    std::string ir_dir = "ir";
    std::string out_override;
    std::string format;
    std::string rules_csv;
    std::string cpp_ext_csv;
    std::string py_ext_csv;
    bool strict = false;

    CLI::App* extract = app.add_subcommand("extract", "Parse sources into IR CSVs");
    extract->add_option("paths", paths, "Files or directories to scan")->required();
    extract->add_option("--out", out_override, "IR output directory (default: ir)");
    extract->add_option("--cpp-ext", cpp_ext_csv, "C++ source extensions, comma separated");
    extract->add_option("--py-ext", py_ext_csv, "Python extensions, comma separated");

    CLI::App* resolve = app.add_subcommand("resolve", "Resolve bindings and rewrite calls");
    resolve->add_option("ir_dir", ir_dir, "IR directory (default: ir)");

    CLI::App* graph = app.add_subcommand("graph", "Emit the multilingual call graph");
    graph->add_option("ir_dir", ir_dir, "IR directory (default: ir)");
    graph->add_option("--format", format, "dot | json (default: dot)")
        ->check(CLI::IsMember({"dot", "json"}));
    graph->add_option("--out", out_override, "Output file (default: <ir_dir>/graph.<fmt>)");

    CLI::App* lint = app.add_subcommand("lint", "Check binding-layout rules");
    lint->add_option("ir_dir", ir_dir, "IR directory (default: ir)");
    lint->add_option("--rules", rules_csv, "Rules to check, e.g. m1,m2,m3 (default: all)");
    lint->add_option("--format", format, "text | json (default: text)")
        ->check(CLI::IsMember({"text", "json"}));
    lint->add_option("--out", out_override, "Report file (default: stdout)");
    lint->add_flag("--strict", strict, "Advisory flags also fail the run");

    CLI::App* check = app.add_subcommand("check", "Full pipeline over a repository");
    check->add_option("root", paths, "Repository root")->required()->expected(1);
    check->add_option("--out", out_override, "Work directory (default: ir)");
    check->add_option("--rules", rules_csv, "Rules to check (default: all)");
    check->add_option("--cpp-ext", cpp_ext_csv, "C++ source extensions, comma separated");
    check->add_option("--py-ext", py_ext_csv, "Python extensions, comma separated");
    check->add_flag("--strict", strict, "Advisory flags also fail the run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        Config cfg;
        if (!config_path.empty()) cfg = load_config_file(config_path);
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (!rules_csv.empty()) cfg.rules = split_list(rules_csv);
        if (!cpp_ext_csv.empty()) cfg.cpp_source_exts = split_list(cpp_ext_csv);
        if (!py_ext_csv.empty()) cfg.py_exts = split_list(py_ext_csv);
        if (strict) cfg.strict = true;

        if (extract->parsed()) return run_extract(paths, cfg);
        if (resolve->parsed()) return run_resolve(ir_dir);
        if (graph->parsed()) {
            return run_graph(ir_dir, format.empty() ? "dot" : format, out_override);
        }
        if (lint->parsed()) {
            return run_lint_cmd(ir_dir, cfg, format.empty() ? "text" : format, out_override);
        }
        if (check->parsed()) return run_check(paths.front(), cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
