#include <set>
#include <stdexcept>

#include "doctest.h"
#include "polycall/ffi_resolve.hpp"
#include "polycall/lint.hpp"

using namespace polycall;

namespace {

FunctionDef cpp_def(std::string unit, int line, std::string name, bool has_body,
                    bool anon = false) {
    FunctionDef d;
    d.unit = std::move(unit);
    d.line = line;
    d.language = Lang::Cpp;
    d.name = std::move(name);
    d.has_body = has_body;
    d.is_anonymous = anon;
    return d;
}

BindingRecord binding(std::string module, std::string unit, int line, std::string exposed,
                      std::string target, BindingStatus status) {
    BindingRecord b;
    b.module = std::move(module);
    b.unit = std::move(unit);
    b.line = line;
    b.exposed_name = std::move(exposed);
    b.target_fqn = std::move(target);
    b.status = status;
    return b;
}

ImportRecord import_rec(std::string unit, int line, std::string name, ImportMechanism mech) {
    ImportRecord r;
    r.unit = std::move(unit);
    r.line = line;
    r.imported_name = name;
    r.alias = name;
    r.mechanism = mech;
    return r;
}

IncludeRecord include_rec(std::string unit, int line, std::string path) {
    IncludeRecord r;
    r.unit = std::move(unit);
    r.line = line;
    r.included_path = std::move(path);
    return r;
}

// A module laid out by the book: decl in geo.h, impl elsewhere, binding in
// geo.cpp which includes geo.h, imported with standard syntax.
LintInput clean_input() {
    LintInput in;
    in.defs = {
        cpp_def("geo.h", 2, "area", false),
        cpp_def("geo_impl.cpp", 3, "area", true),
    };
    in.includes = {include_rec("geo.cpp", 1, "geo.h"), include_rec("geo_impl.cpp", 1, "geo.h")};
    in.bindings = {binding("geo", "geo.cpp", 5, "area", "geo_impl.cpp::area",
                           BindingStatus::Resolved)};
    in.imports = {import_rec("use.py", 1, "geo", ImportMechanism::Standard)};
    return in;
}

std::multiset<std::pair<std::string, std::string>> rule_module_pairs(
    const std::vector<LintFinding>& findings) {
    std::multiset<std::pair<std::string, std::string>> out;
    for (const auto& f : findings) out.emplace(to_string(f.rule), f.module);
    return out;
}

}  // namespace

TEST_CASE("clean module produces zero findings") {
    LintInput in = clean_input();
    auto findings = run_lint(in, LintOptions{});
    CHECK(findings.empty());
    ComplianceReport report = aggregate(findings, binding_modules(in.bindings));
    CHECK(report.per_repo.meets_all);
    CHECK_FALSE(report.per_repo.fails_m2);
    CHECK_FALSE(report.per_repo.fails_m3);
    CHECK(report.counts.total == 1);
    CHECK(report.counts.meeting_all == 1);
}

TEST_CASE("m1: dynamic import is a violation") {
    LintInput in = clean_input();
    in.imports = {import_rec("use.py", 2, "geo", ImportMechanism::Dynamic)};
    auto findings = check_m1("geo", in);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].rule == Rule::M1);
    CHECK(findings[0].unit == "use.py");
    CHECK(findings[0].line == 2);
}

TEST_CASE("m1: bound but unimported module is only an advisory") {
    LintInput in = clean_input();
    in.imports.clear();
    auto findings = check_m1("geo", in);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].rule == Rule::FlagUnusedModule);
    CHECK_FALSE(is_violation(findings[0].rule));
}

TEST_CASE("m1: standard import passes") {
    LintInput in = clean_input();
    CHECK(check_m1("geo", in).empty());
}

TEST_CASE("m2: stem match passes, mismatch fails") {
    LintInput in = clean_input();
    CHECK(check_m2("geo", in, LintOptions{}).empty());

    in.bindings = {binding("geo", "bindings.cpp", 5, "area", "geo_impl.cpp::area",
                           BindingStatus::Resolved)};
    auto findings = check_m2("geo", in, LintOptions{});
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].rule == Rule::M2);
    CHECK(findings[0].unit == "bindings.cpp");
}

TEST_CASE("m2: binding in a header is a violation even with a matching stem") {
    LintInput in = clean_input();
    in.bindings = {binding("geo", "geo.h", 5, "area", "geo_impl.cpp::area",
                           BindingStatus::Resolved)};
    auto findings = check_m2("geo", in, LintOptions{});
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].rule == Rule::M2);
}

TEST_CASE("m2: two modules in one unit flag the unit and fail the mismatched one") {
    LintInput in;
    in.defs = {cpp_def("delta.h", 1, "d1", false), cpp_def("impl.cpp", 1, "d1", true),
               cpp_def("delta.h", 2, "e1", false), cpp_def("impl.cpp", 2, "e1", true)};
    in.includes = {include_rec("delta.cpp", 1, "delta.h")};
    in.bindings = {
        binding("delta", "delta.cpp", 5, "d1", "impl.cpp::d1", BindingStatus::Resolved),
        binding("epsilon", "delta.cpp", 8, "e1", "impl.cpp::e1", BindingStatus::Resolved),
    };
    in.imports = {import_rec("use.py", 1, "delta", ImportMechanism::Standard),
                  import_rec("use.py", 2, "epsilon", ImportMechanism::Standard)};

    auto delta_findings = check_m2("delta", in, LintOptions{});
    REQUIRE(delta_findings.size() == 1);
    CHECK(delta_findings[0].rule == Rule::FlagMultiModule);

    auto epsilon_findings = check_m2("epsilon", in, LintOptions{});
    REQUIRE(epsilon_findings.size() == 1);
    CHECK(epsilon_findings[0].rule == Rule::M2);

    auto report = aggregate(run_lint(in, LintOptions{}), binding_modules(in.bindings));
    CHECK(report.per_module.at("delta").m2_pass);
    CHECK_FALSE(report.per_module.at("epsilon").m2_pass);
    CHECK(report.per_repo.fails_m2);
}

TEST_CASE("m3: implementation in the binding unit is a violation") {
    LintInput in = clean_input();
    in.defs = {cpp_def("geo.h", 2, "area", false), cpp_def("geo.cpp", 7, "area", true)};
    in.bindings = {binding("geo", "geo.cpp", 9, "area", "geo.cpp::area",
                           BindingStatus::Resolved)};
    auto findings = check_m3("geo", in, LintOptions{});
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].rule == Rule::M3);
    CHECK(findings[0].message.find("binding unit") != std::string::npos);
}

TEST_CASE("m3: missing header declaration is a violation") {
    LintInput in = clean_input();
    in.includes.clear();  // geo.cpp no longer includes geo.h
    auto findings = check_m3("geo", in, LintOptions{});
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].rule == Rule::M3);
    CHECK(findings[0].message.find("declaration") != std::string::npos);
}

TEST_CASE("m3: declaration reachable through one include hop passes") {
    LintInput in = clean_input();
    // geo.cpp includes geo_api.h which includes geo.h (where the decl lives)
    in.includes = {include_rec("geo.cpp", 1, "geo_api.h"),
                   include_rec("geo_api.h", 1, "geo.h"),
                   include_rec("geo_impl.cpp", 1, "geo.h")};
    CHECK(check_m3("geo", in, LintOptions{}).empty());
}

TEST_CASE("m3: anonymous binding flags and fails") {
    LintInput in = clean_input();
    in.defs.push_back(cpp_def("geo.cpp", 6, anonymous_name(1), true, true));
    in.bindings = {binding("geo", "geo.cpp", 6, "go", "geo.cpp::" + anonymous_name(1),
                           BindingStatus::Anonymous)};
    auto findings = check_m3("geo", in, LintOptions{});
    auto pairs = rule_module_pairs(findings);
    CHECK(pairs == std::multiset<std::pair<std::string, std::string>>{
                       {"FLAG_ANON", "geo"}, {"M3", "geo"}});
}

TEST_CASE("m3: unresolved binding is advisory only") {
    LintInput in = clean_input();
    in.bindings = {binding("geo", "geo.cpp", 6, kUnresolved, kUnresolved,
                           BindingStatus::Unresolved)};
    auto findings = check_m3("geo", in, LintOptions{});
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].rule == Rule::FlagUnresolved);
    CHECK_FALSE(is_violation(findings[0].rule));
}

TEST_CASE("r1 is off by default and checks the component include") {
    LintInput in = clean_input();
    in.includes = {include_rec("geo.cpp", 9, "geo.h"),
                   include_rec("geo_impl.cpp", 1, "geo.h")};
    // not first substantive
    CHECK(run_lint(in, LintOptions{}).empty());

    LintOptions with_r1;
    with_r1.check_r1 = true;
    auto findings = run_lint(in, with_r1);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].rule == Rule::R1);

    in.includes[0].is_first_substantive = true;
    CHECK(run_lint(in, with_r1).empty());
}

TEST_CASE("aggregate applies the any-module-fails counting rule") {
    std::vector<LintFinding> findings;
    LintFinding f;
    f.rule = Rule::M2;
    f.module = "beta";
    f.unit = "other.cpp";
    f.line = 3;
    findings.push_back(f);
    ComplianceReport report = aggregate(findings, {"alpha", "beta"});
    CHECK(report.per_module.at("alpha").meets_all());
    CHECK_FALSE(report.per_module.at("beta").m2_pass);
    CHECK(report.per_module.at("beta").m3_pass);
    CHECK_FALSE(report.per_repo.meets_all);
    CHECK(report.per_repo.fails_m2);
    CHECK_FALSE(report.per_repo.fails_m3);
    CHECK(report.counts.total == 2);
    CHECK(report.counts.meeting_all == 1);
    CHECK(report.counts.failing_m2 == 1);
}

TEST_CASE("any lambda module sets the repository lambda bit") {
    std::vector<LintFinding> findings;
    LintFinding f;
    f.rule = Rule::FlagAnon;
    f.module = "gamma";
    findings.push_back(f);
    ComplianceReport report = aggregate(findings, {"alpha", "gamma"});
    CHECK(report.per_module.at("gamma").uses_lambda);
    CHECK_FALSE(report.per_module.at("alpha").uses_lambda);
    CHECK(report.per_repo.uses_lambda);
}

TEST_CASE("repo booleans recompute from per-module entries") {
    LintInput in = clean_input();
    in.bindings.push_back(binding("beta", "misnamed.cpp", 3, "x", "geo_impl.cpp::area",
                                  BindingStatus::Resolved));
    in.imports.push_back(import_rec("use.py", 3, "beta", ImportMechanism::Standard));
    auto findings = run_lint(in, LintOptions{});
    ComplianceReport report = aggregate(findings, binding_modules(in.bindings));
    bool fails_m2 = false, fails_m3 = false, meets_all = true;
    for (const auto& [name, mc] : report.per_module) {
        fails_m2 = fails_m2 || !mc.m2_pass;
        fails_m3 = fails_m3 || !mc.m3_pass;
        meets_all = meets_all && mc.meets_all();
    }
    CHECK(report.per_repo.fails_m2 == fails_m2);
    CHECK(report.per_repo.fails_m3 == fails_m3);
    CHECK(report.per_repo.meets_all == meets_all);
}

TEST_CASE("metamorphic: renaming the binding unit toggles m2 only") {
    LintInput in = clean_input();
    auto before = run_lint(in, LintOptions{});
    CHECK(before.empty());

    LintInput renamed = in;
    for (auto& b : renamed.bindings) b.unit = "zz_binding.cpp";
    for (auto& inc : renamed.includes) {
        if (inc.unit == "geo.cpp") inc.unit = "zz_binding.cpp";
    }
    auto after = run_lint(renamed, LintOptions{});
    REQUIRE(after.size() == 1);
    CHECK(after[0].rule == Rule::M2);
    ComplianceReport report = aggregate(after, binding_modules(renamed.bindings));
    CHECK_FALSE(report.per_module.at("geo").m2_pass);
    CHECK(report.per_module.at("geo").m3_pass);
    CHECK(report.per_module.at("geo").m1_pass);
}

TEST_CASE("text report carries the summary rows and tallies") {
    LintInput in = clean_input();
    auto findings = run_lint(in, LintOptions{});
    ComplianceReport report = aggregate(findings, binding_modules(in.bindings));
    std::string text = report_text(report, findings);
    CHECK(text.find("meets M1-M3") != std::string::npos);
    CHECK(text.find("binding misname (fails M2)") != std::string::npos);
    CHECK(text.find("impl. in binding (fails M3)") != std::string::npos);
    CHECK(text.find("Rep.") != std::string::npos);
    CHECK(text.find("Mod.") != std::string::npos);
    CHECK(text.find("1/1") != std::string::npos);
}

TEST_CASE("json report round-trips the tallies") {
    LintInput in = clean_input();
    in.bindings.push_back(binding("beta", "misnamed.cpp", 3, "x", "geo_impl.cpp::area",
                                  BindingStatus::Resolved));
    in.imports.push_back(import_rec("use.py", 3, "beta", ImportMechanism::Standard));
    auto findings = run_lint(in, LintOptions{});
    ComplianceReport report = aggregate(findings, binding_modules(in.bindings));
    std::string json = report_json(report, findings);
    CHECK(json.find("\"modules_total\": 2") != std::string::npos);
    CHECK(json.find("\"fails_m2\": true") != std::string::npos);
    CHECK(json.find("\"rule\": \"M2\"") != std::string::npos);
}

TEST_CASE("rule names parse both ways") {
    CHECK(parse_rule("m2") == Rule::M2);
    CHECK(parse_rule("M3") == Rule::M3);
    CHECK_THROWS_AS(parse_rule("m9"), std::runtime_error);
    CHECK(std::string(to_string(Rule::FlagMultiModule)) == "FLAG_MULTI_MODULE");
}
