#pragma once

#include <map>
#include <string>
#include <vector>

#include "polycall/ir.hpp"

namespace polycall {

// M1: the module is imported by name, in standard syntax.
// M2: the binding source file is named after the module.
// M3: bound implementations live outside the binding unit, declared in an
//     included header.
// R1 (optional, off by default): a binding source file includes its matching
//     header as the first substantive line.
// FLAG_* entries are advisories; FLAG_ANON additionally implies an M3
// violation for that binding.
enum class Rule {
    M1,
    M2,
    M3,
    R1,
    FlagAnon,
    FlagMultiModule,
    FlagUnresolved,
    FlagUnusedModule,
};

const char* to_string(Rule r);
Rule parse_rule(const std::string& s);
bool is_violation(Rule r);

struct LintFinding {
    Rule rule = Rule::M1;
    std::string module;
    std::string unit;
    int line = 0;
    std::string message;

    bool operator==(const LintFinding&) const = default;
};

struct ModuleCompliance {
    bool m1_pass = true;
    bool m2_pass = true;
    bool m3_pass = true;
    bool uses_lambda = false;

    bool meets_all() const { return m1_pass && m2_pass && m3_pass; }
    bool operator==(const ModuleCompliance&) const = default;
};

struct RepoCompliance {
    bool meets_all = true;
    bool fails_m2 = false;
    bool fails_m3 = false;
    bool uses_lambda = false;

    bool operator==(const RepoCompliance&) const = default;
};

struct ComplianceCounts {
    int total = 0;
    int meeting_all = 0;
    int failing_m1 = 0;
    int failing_m2 = 0;
    int failing_m3 = 0;

    bool operator==(const ComplianceCounts&) const = default;
};

struct ComplianceReport {
    std::map<std::string, ModuleCompliance> per_module;
    RepoCompliance per_repo;
    ComplianceCounts counts;

    bool operator==(const ComplianceReport&) const = default;
};

struct LintOptions {
    bool check_m1 = true;
    bool check_m2 = true;
    bool check_m3 = true;
    bool check_r1 = false;
    std::vector<std::string> cpp_source_exts = {".cpp", ".cc", ".cxx"};
    std::vector<std::string> cpp_header_exts = {".h", ".hpp", ".hh"};
};

struct LintInput {
    std::vector<FunctionDef> defs;
    std::vector<ImportRecord> imports;
    std::vector<IncludeRecord> includes;
    std::vector<BindingRecord> bindings;
    std::vector<ResolvedCall> calls;
};

std::vector<LintFinding> check_m1(const std::string& module, const LintInput& in);
std::vector<LintFinding> check_m2(const std::string& module, const LintInput& in,
                                  const LintOptions& opts);
std::vector<LintFinding> check_m3(const std::string& module, const LintInput& in,
                                  const LintOptions& opts);
std::vector<LintFinding> check_r1(const std::string& module, const LintInput& in);

// All selected checks over all binding modules; findings sorted.
std::vector<LintFinding> run_lint(const LintInput& in, const LintOptions& opts);

// Modules that have at least one binding record, sorted.
std::vector<std::string> binding_modules(const std::vector<BindingRecord>& bindings);

// Folds findings into the module/repository tallies. A repository fails a
// rule when any module fails it.
ComplianceReport aggregate(const std::vector<LintFinding>& findings,
                           const std::vector<std::string>& modules);

std::string report_json(const ComplianceReport& report,
                        const std::vector<LintFinding>& findings);
std::string report_text(const ComplianceReport& report,
                        const std::vector<LintFinding>& findings);

}  // namespace polycall
