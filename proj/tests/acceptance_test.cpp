// End-to-end acceptance suite. Each case prints one PASS line when every
// assertion in it held; a failed case reports through the test runner.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "polycall/callgraph.hpp"
#include "polycall/cpp_extractor.hpp"
#include "polycall/csv.hpp"
#include "polycall/ffi_resolve.hpp"
#include "polycall/lint.hpp"
#include "polycall/pipeline.hpp"
#include "polycall/python_extractor.hpp"
#include "test_helpers.hpp"

namespace fs = std::filesystem;
using namespace polycall;

namespace {

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

void pass(const char* id, const char* name) {
    std::printf("[acceptance] %s %s: PASS\n", id, name);
    std::fflush(stdout);
}

LintInput lint_input_of(const IrTables& ir, const ResolvedTables& tables) {
    LintInput in;
    in.defs = ir.defs;
    in.imports = ir.imports;
    in.includes = ir.includes;
    in.bindings = tables.bindings;
    in.calls = tables.calls;
    return in;
}

struct PipelineOutput {
    IrTables ir;
    ResolvedTables tables;
    std::string dot;
    std::string lint_json;
};

PipelineOutput run_pipeline(const fs::path& root, unsigned shuffle_seed = 0) {
    Config cfg;
    std::vector<DiscoveredUnit> units = discover_units({root}, cfg);
    if (shuffle_seed != 0) {
        std::mt19937 rng(shuffle_seed);
        std::shuffle(units.begin(), units.end(), rng);
    }
    PipelineOutput out;
    out.ir = extract_units(units, nullptr);
    if (shuffle_seed != 0) {
        std::mt19937 rng(shuffle_seed + 1);
        std::shuffle(out.ir.defs.begin(), out.ir.defs.end(), rng);
        std::shuffle(out.ir.calls.begin(), out.ir.calls.end(), rng);
        std::shuffle(out.ir.imports.begin(), out.ir.imports.end(), rng);
        std::shuffle(out.ir.assigns.begin(), out.ir.assigns.end(), rng);
        std::shuffle(out.ir.includes.begin(), out.ir.includes.end(), rng);
        std::shuffle(out.ir.raw_bindings.begin(), out.ir.raw_bindings.end(), rng);
    }
    out.tables = resolve_tables(out.ir);
    out.dot = emit_dot(build_graph(out.ir.defs, out.tables.calls));
    LintInput input = lint_input_of(out.ir, out.tables);
    auto findings = run_lint(input, LintOptions{});
    out.lint_json = report_json(aggregate(findings, binding_modules(out.tables.bindings)),
                                findings);
    return out;
}

using FindingKey = std::tuple<std::string, std::string, std::string, int>;

std::set<FindingKey> finding_keys(const std::vector<LintFinding>& findings) {
    std::set<FindingKey> keys;
    for (const auto& f : findings) keys.emplace(to_string(f.rule), f.module, f.unit, f.line);
    return keys;
}

}  // namespace

TEST_CASE("C1 example graph reproduction") {
    auto started = std::chrono::steady_clock::now();

    fs::path ir_dir = fresh_temp_dir("acc_c1");
    fs::path fixture = fixtures_dir() / "demo_minimal";
    REQUIRE(run_cmd(polycall_bin() + " extract " + q(fixture) + " --out " + q(ir_dir))
                .exit_code == 0);
    REQUIRE(run_cmd(polycall_bin() + " resolve " + q(ir_dir)).exit_code == 0);
    REQUIRE(run_cmd(polycall_bin() + " graph " + q(ir_dir)).exit_code == 0);
    REQUIRE(run_cmd(polycall_bin() + " graph " + q(ir_dir) + " --format json").exit_code == 0);

    auto elapsed = std::chrono::steady_clock::now() - started;
    CHECK(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() < 1000);

    CallGraph graph = graph_from_json(slurp(ir_dir / "graph.json"));
    std::set<std::tuple<std::string, std::string, bool>> edges;
    for (const auto& e : graph.edges) edges.emplace(e.caller, e.callee, e.cross_language);
    std::set<std::tuple<std::string, std::string, bool>> expected = {
        {"A.py::<module>", "B.cpp::f", true},
        {"B.cpp::f", "B.cpp::square", false},
    };
    CHECK(edges == expected);
    REQUIRE(graph.nodes.size() == 3);

    std::string dot = slurp(ir_dir / "graph.dot");
    CHECK(dot.find("\"A.py::<module>\" [label=\"A:<module>\", shape=box]") != std::string::npos);
    CHECK(dot.find("\"B.cpp::f\" [label=\"f\", shape=ellipse]") != std::string::npos);
    CHECK(dot.find("\"B.cpp::square\" [label=\"square\", shape=ellipse]") != std::string::npos);
    CHECK(dot.find("\"A.py::<module>\" -> \"B.cpp::f\" [style=dashed]") != std::string::npos);

    // the Python component alone leaves the call opaque
    fs::path py_only = fresh_temp_dir("acc_c1_py");
    REQUIRE(run_cmd(polycall_bin() + " extract " + q(fixture / "A.py") + " --out " + q(py_only))
                .exit_code == 0);
    REQUIRE(run_cmd(polycall_bin() + " resolve " + q(py_only)).exit_code == 0);
    REQUIRE(run_cmd(polycall_bin() + " graph " + q(py_only) + " --format json").exit_code == 0);
    CallGraph opaque = graph_from_json(slurp(py_only / "graph.json"));
    bool found_external = false;
    for (const auto& n : opaque.nodes) {
        if (n.is_external && n.display == "B.f") found_external = true;
    }
    CHECK(found_external);
    for (const auto& e : opaque.edges) CHECK_FALSE(e.cross_language);

    pass("C1", "minimal demo reproduction");
}

TEST_CASE("C2 reaching-definitions resolution") {
    // hand-enumerated oracle: one literal assignment of n reaches the .def
    {
        std::string src = slurp(fixtures_dir() / "rda/resolved/R.cpp");
        CppExtraction ext = parse_cpp_unit(src, "R.cpp");
        auto bindings = resolve_bindings(ext.raw_bindings, ext.assigns, ext.defs);
        REQUIRE(bindings.size() == 1);
        CHECK(bindings[0].exposed_name == "g");
        CHECK(bindings[0].status == BindingStatus::Resolved);
        CHECK(bindings[0].target_fqn == "R.cpp::g");
    }
    // two distinct literals reach: {"g", "h"} -> unresolved
    {
        std::string src = slurp(fixtures_dir() / "rda/ambiguous/R.cpp");
        CppExtraction ext = parse_cpp_unit(src, "R.cpp");
        REQUIRE(ext.assigns.size() == 2);
        auto bindings = resolve_bindings(ext.raw_bindings, ext.assigns, ext.defs);
        REQUIRE(bindings.size() == 1);
        CHECK(bindings[0].status == BindingStatus::Unresolved);
        CHECK(bindings[0].exposed_name == kUnresolved);
    }
    pass("C2", "rda resolution");
}

TEST_CASE("C3 lint corpus equivalence") {
    struct RepoOracle {
        std::string name;
        std::set<FindingKey> findings;
        bool meets_all;
        bool fails_m2;
        bool fails_m3;
        bool uses_lambda;
        std::map<std::string, std::array<bool, 4>> modules;  // m1, m2, m3, lambda
    };
    std::vector<RepoOracle> oracle = {
        {"compliant", {}, true, false, false, false, {{"geo", {true, true, true, false}}}},
        {"misnamed",
         {{"M2", "alpha", "bindings.cpp", 6}},
         false, true, false, false,
         {{"alpha", {true, false, true, false}}}},
        {"impl_in_binding",
         {{"M3", "beta", "beta.cpp", 8}},
         false, false, true, false,
         {{"beta", {true, true, false, false}}}},
        {"lambda_binding",
         {{"FLAG_ANON", "gamma", "gamma.cpp", 6}, {"M3", "gamma", "gamma.cpp", 6}},
         false, false, true, true,
         {{"gamma", {true, true, false, true}}}},
        {"multi_module",
         {{"FLAG_MULTI_MODULE", "delta", "delta.cpp", 6}, {"M2", "epsilon", "delta.cpp", 10}},
         false, true, false, false,
         {{"delta", {true, true, true, false}}, {"epsilon", {true, false, true, false}}}},
        {"dynamic_import",
         {{"M1", "zeta", "use.py", 3}},
         false, false, false, false,
         {{"zeta", {false, true, true, false}}}},
    };

    for (const auto& repo : oracle) {
        CAPTURE(repo.name);
        Config cfg;
        auto units = discover_units({fixtures_dir() / "corpus" / repo.name}, cfg);
        IrTables ir = extract_units(units, nullptr);
        ResolvedTables tables = resolve_tables(ir);
        LintInput input = lint_input_of(ir, tables);
        auto findings = run_lint(input, LintOptions{});
        CHECK(finding_keys(findings) == repo.findings);

        ComplianceReport report = aggregate(findings, binding_modules(tables.bindings));
        CHECK(report.per_repo.meets_all == repo.meets_all);
        CHECK(report.per_repo.fails_m2 == repo.fails_m2);
        CHECK(report.per_repo.fails_m3 == repo.fails_m3);
        CHECK(report.per_repo.uses_lambda == repo.uses_lambda);

        REQUIRE(report.per_module.size() == repo.modules.size());
        for (const auto& [name, expect] : repo.modules) {
            const ModuleCompliance& mc = report.per_module.at(name);
            CHECK(mc.m1_pass == expect[0]);
            CHECK(mc.m2_pass == expect[1]);
            CHECK(mc.m3_pass == expect[2]);
            CHECK(mc.uses_lambda == expect[3]);
        }

        // the repository booleans obey the any-module-failed rule
        bool any_m2 = false, any_m3 = false, all_ok = true;
        for (const auto& [name, mc] : report.per_module) {
            any_m2 = any_m2 || !mc.m2_pass;
            any_m3 = any_m3 || !mc.m3_pass;
            all_ok = all_ok && mc.meets_all();
        }
        CHECK(report.per_repo.fails_m2 == any_m2);
        CHECK(report.per_repo.fails_m3 == any_m3);
        CHECK(report.per_repo.meets_all == all_ok);
    }
    pass("C3", "lint corpus equivalence");
}

TEST_CASE("C4 determinism under permutation") {
    fs::path corpus = fixtures_dir() / "corpus";
    PipelineOutput reference = run_pipeline(corpus);
    CHECK_FALSE(reference.dot.empty());
    std::mt19937 seeder(777);
    for (int iter = 0; iter < 100; ++iter) {
        unsigned seed = seeder() | 1u;
        PipelineOutput shuffled = run_pipeline(corpus, seed);
        REQUIRE(shuffled.dot == reference.dot);
        REQUIRE(shuffled.lint_json == reference.lint_json);
    }
    pass("C4", "determinism and order-independence");
}

TEST_CASE("C5 totality of rewriting") {
    std::mt19937 rng(20240606);
    std::uniform_int_distribution<int> call_count(0, 50);
    std::uniform_int_distribution<int> def_count(1, 8);
    std::uniform_int_distribution<int> pick(0, 9);

    for (int iter = 0; iter < 100; ++iter) {
        std::vector<FunctionDef> defs;
        std::vector<RawBinding> raws;
        int nd = def_count(rng);
        for (int k = 0; k < nd; ++k) {
            std::string module = "mod" + std::to_string(k % 3);
            std::string fn = "fn" + std::to_string(k);
            FunctionDef d;
            d.unit = module + ".cpp";
            d.line = 10 + k;
            d.language = Lang::Cpp;
            d.name = fn;
            d.has_body = true;
            defs.push_back(d);
            RawBinding rb;
            rb.unit = module + ".cpp";
            rb.line = 100 + k;
            rb.module = module;
            rb.module_var = "m";
            rb.exposed_arg = string_literal_arg("\"" + fn + "\"", fn);
            rb.target_arg = plain_arg(ArgForm::FunctionRef, "&" + fn);
            raws.push_back(rb);
        }
        auto bindings = resolve_bindings(raws, {}, defs);

        std::vector<ImportRecord> imports;
        auto imp = [&](int line, std::string name, std::string alias) {
            ImportRecord r;
            r.unit = "use.py";
            r.line = line;
            r.imported_name = std::move(name);
            r.alias = std::move(alias);
            r.mechanism = ImportMechanism::Standard;
            imports.push_back(r);
        };
        imp(1, "mod0", "mod0");
        imp(2, "mod1", "m1");
        imp(3, "decoy", "decoy");     // same-shaped module, no bindings
        imp(4, "decoy2", "mod2");     // decoy shadowing a bound module's name

        std::vector<CallSite> calls;
        int nc = call_count(rng);
        for (int k = 0; k < nc; ++k) {
            CallSite c;
            c.unit = "use.py";
            c.line = 10 + k;
            c.language = Lang::Python;
            c.caller_fqn = kModuleScope;
            switch (pick(rng)) {
                case 0: c.callee_expr = "mod0.fn" + std::to_string(pick(rng)); break;
                case 1: c.callee_expr = "m1.fn" + std::to_string(pick(rng)); break;
                case 2: c.callee_expr = "decoy.fn0"; break;
                case 3: c.callee_expr = "mod2.fn2"; break;
                case 4: c.callee_expr = "len"; break;
                default: c.callee_expr = "plain" + std::to_string(k); break;
            }
            calls.push_back(c);
        }

        auto rewritten = rewrite_calls(calls, imports, bindings);
        REQUIRE(rewritten.size() == calls.size());

        std::set<std::string> def_fqns;
        for (const auto& d : defs) def_fqns.insert(d.fqn());
        for (const auto& rc : rewritten) {
            std::string receiver = rc.call.callee_expr.substr(0, rc.call.callee_expr.find('.'));
            if (rc.cross_language) {
                std::string rest = rc.resolved_callee;
                while (!rest.empty()) {
                    size_t semi = rest.find(';');
                    REQUIRE(def_fqns.count(rest.substr(0, semi)) == 1);
                    rest = semi == std::string::npos ? "" : rest.substr(semi + 1);
                }
            }
            if (receiver == "decoy" || receiver == "mod2") {
                REQUIRE_FALSE(rc.cross_language);
                REQUIRE(rc.flag.empty());
            }
        }
    }
    pass("C5", "totality of rewriting");
}

TEST_CASE("C6 csv round-trip") {
    std::mt19937 rng(31337);
    std::uniform_int_distribution<int> count(0, 30);
    std::uniform_int_distribution<int> line(1, 999);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> pick(0, 4);
    auto ident = [&](const char* stem, int k) { return std::string(stem) + std::to_string(k); };

    for (int iter = 0; iter < 40; ++iter) {
        {
            std::vector<FunctionDef> xs;
            for (int k = count(rng); k-- > 0;) {
                FunctionDef d;
                d.unit = ident("u", k % 5) + ".cpp";
                d.line = line(rng) * 7 + k;
                d.language = coin(rng) ? Lang::Cpp : Lang::Python;
                if (coin(rng)) d.scope = {ident("ns", k % 3)};
                d.name = ident("fn", k);
                d.has_body = coin(rng) != 0;
                xs.push_back(d);
            }
            csv::canonical_sort(xs);
            xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
            REQUIRE(csv::from_csv<FunctionDef>(csv::to_csv(xs)) == xs);
        }
        {
            std::vector<CallSite> xs;
            for (int k = count(rng); k-- > 0;) {
                CallSite c;
                c.unit = ident("u", k % 5) + ".py";
                c.line = line(rng);
                c.language = Lang::Python;
                c.caller_fqn = coin(rng) ? kModuleScope : "u.py::main";
                c.callee_expr = ident("callee", k) + (coin(rng) ? ".attr" : "");
                switch (pick(rng)) {
                    case 0: c.args.push_back(string_literal_arg("\"s\"", "s, with comma")); break;
                    case 1: c.args.push_back(plain_arg(ArgForm::Identifier, "v")); break;
                    case 2: c.args.push_back(plain_arg(ArgForm::Lambda, "lambda x: x")); break;
                    case 3: c.args.push_back(plain_arg(ArgForm::Other, "1 + \"q\"")); break;
                    default: break;
                }
                xs.push_back(c);
            }
            csv::canonical_sort(xs);
            REQUIRE(csv::from_csv<CallSite>(csv::to_csv(xs)) == xs);
        }
        {
            std::vector<ImportRecord> xs;
            for (int k = count(rng); k-- > 0;) {
                ImportRecord r;
                r.unit = ident("u", k % 4) + ".py";
                r.line = line(rng);
                r.imported_name = ident("mod", k % 6);
                r.alias = coin(rng) ? r.imported_name : ident("al", k);
                r.member = coin(rng) ? ident("mem", k) : "";
                r.mechanism = coin(rng) ? ImportMechanism::Standard : ImportMechanism::Dynamic;
                xs.push_back(r);
            }
            csv::canonical_sort(xs);
            REQUIRE(csv::from_csv<ImportRecord>(csv::to_csv(xs)) == xs);
        }
        {
            std::vector<AssignRecord> xs;
            for (int k = count(rng); k-- > 0;) {
                AssignRecord a;
                a.unit = ident("u", k % 4) + ".cpp";
                a.line = line(rng);
                a.language = Lang::Cpp;
                a.scope_fqn = coin(rng) ? kFileScope : module_block_scope("B");
                a.variable = ident("v", k % 7);
                if (coin(rng)) {
                    a.value_form = ValueForm::StringLiteral;
                    a.literal = "lit \"quoted\", spaced";
                } else {
                    a.value_form = ValueForm::Other;
                }
                xs.push_back(a);
            }
            csv::canonical_sort(xs);
            REQUIRE(csv::from_csv<AssignRecord>(csv::to_csv(xs)) == xs);
        }
        {
            std::vector<IncludeRecord> xs;
            for (int k = count(rng); k-- > 0;) {
                IncludeRecord r;
                r.unit = ident("u", k) + ".cpp";
                r.line = line(rng);
                r.included_path = ident("h", k % 5) + ".h";
                r.is_first_substantive = coin(rng) != 0;
                xs.push_back(r);
            }
            csv::canonical_sort(xs);
            REQUIRE(csv::from_csv<IncludeRecord>(csv::to_csv(xs)) == xs);
        }
        {
            std::vector<RawBinding> xs;
            for (int k = count(rng); k-- > 0;) {
                RawBinding rb;
                rb.unit = ident("u", k % 4) + ".cpp";
                rb.line = line(rng);
                rb.module = ident("mod", k % 4);
                rb.module_var = "m";
                rb.exposed_arg = coin(rng) ? string_literal_arg("\"e\"", "e")
                                           : plain_arg(ArgForm::Identifier, "nv");
                rb.target_arg = coin(rng) ? plain_arg(ArgForm::FunctionRef, "&ns::f")
                                          : plain_arg(ArgForm::Lambda, "[](int a){ return a; }");
                xs.push_back(rb);
            }
            csv::canonical_sort(xs);
            REQUIRE(csv::from_csv<RawBinding>(csv::to_csv(xs)) == xs);
        }
    }
    pass("C6", "csv round-trip");
}

TEST_CASE("C7 report structure and tally cross-check") {
    fs::path ir_dir = fresh_temp_dir("acc_c7");
    fs::path corpus = fixtures_dir() / "corpus";
    REQUIRE(run_cmd(polycall_bin() + " extract " + q(corpus) + " --out " + q(ir_dir))
                .exit_code == 0);
    REQUIRE(run_cmd(polycall_bin() + " resolve " + q(ir_dir)).exit_code == 0);
    CmdResult text = run_cmd(polycall_bin() + " lint " + q(ir_dir));
    CHECK(text.exit_code == 1);
    CmdResult json_run = run_cmd(polycall_bin() + " lint " + q(ir_dir) + " --format json --out " +
                                 q(ir_dir / "report.json"));
    CHECK(json_run.exit_code == 1);

    // the three row categories with repository and module tallies
    REQUIRE(text.out.find("meets M1-M3") != std::string::npos);
    REQUIRE(text.out.find("binding misname (fails M2)") != std::string::npos);
    REQUIRE(text.out.find("impl. in binding (fails M3)") != std::string::npos);
    REQUIRE(text.out.find("Rep.") != std::string::npos);
    REQUIRE(text.out.find("Mod.") != std::string::npos);

    // recompute the tallies from the per-module JSON
    nlohmann::json j = nlohmann::json::parse(slurp(ir_dir / "report.json"));
    int total = 0, meeting = 0, failing_m2 = 0, failing_m3 = 0;
    bool any_m2 = false, any_m3 = false, all_ok = true;
    for (const auto& [name, mod] : j.at("modules").items()) {
        ++total;
        bool m1 = mod.at("m1_pass").get<bool>();
        bool m2 = mod.at("m2_pass").get<bool>();
        bool m3 = mod.at("m3_pass").get<bool>();
        if (m1 && m2 && m3) ++meeting;
        if (!m2) ++failing_m2;
        if (!m3) ++failing_m3;
        any_m2 = any_m2 || !m2;
        any_m3 = any_m3 || !m3;
        all_ok = all_ok && m1 && m2 && m3;
    }
    CHECK(total == 7);  // geo, alpha, beta, gamma, delta, epsilon, zeta
    CHECK(j.at("counts").at("modules_total").get<int>() == total);
    CHECK(j.at("counts").at("modules_meeting_all").get<int>() == meeting);
    CHECK(j.at("counts").at("modules_failing_m2").get<int>() == failing_m2);
    CHECK(j.at("counts").at("modules_failing_m3").get<int>() == failing_m3);
    CHECK(j.at("repository").at("fails_m2").get<bool>() == any_m2);
    CHECK(j.at("repository").at("fails_m3").get<bool>() == any_m3);
    CHECK(j.at("repository").at("meets_all").get<bool>() == all_ok);

    // the text tallies match the recomputed JSON numbers
    auto expect_row = [&](const std::string& label, bool rep_bad, int mod_count) {
        size_t at = text.out.find(label);
        REQUIRE(at != std::string::npos);
        std::string line = text.out.substr(at, text.out.find('\n', at) - at);
        CHECK(line.find(rep_bad ? "yes" : "no") != std::string::npos);
        std::string tally = std::to_string(mod_count) + "/" + std::to_string(total);
        CHECK(line.find(tally) != std::string::npos);
    };
    expect_row("meets M1-M3", all_ok, meeting);
    expect_row("binding misname (fails M2)", any_m2, failing_m2);
    expect_row("impl. in binding (fails M3)", any_m3, failing_m3);

    pass("C7", "report structure and tallies");
}
