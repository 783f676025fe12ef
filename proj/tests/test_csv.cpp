#include <random>

#include "doctest.h"
#include "polycall/csv.hpp"

using namespace polycall;

namespace {

FunctionDef make_def(std::string unit, int line, Lang lang, std::vector<std::string> scope,
                     std::string name, bool has_body, bool is_anon = false) {
    FunctionDef d;
    d.unit = std::move(unit);
    d.line = line;
    d.language = lang;
    d.scope = std::move(scope);
    d.name = std::move(name);
    d.has_body = has_body;
    d.is_anonymous = is_anon;
    return d;
}

std::string random_text(std::mt19937& rng) {
    static const std::string alphabet = "abcXYZ_09 ,\"\n:;()[]{}<>\\'";  // quoting hazards
    std::uniform_int_distribution<size_t> len(0, 12);
    std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> accent(0, 5);
    std::string out;
    size_t n = len(rng);
    for (size_t i = 0; i < n; ++i) out += alphabet[pick(rng)];
    if (accent(rng) == 0) out += "\xc3\xa9";  // valid multi-byte sequence
    return out;
}

std::string random_ident(std::mt19937& rng) {
    static const std::string alphabet = "abcdefgh_";
    std::uniform_int_distribution<size_t> len(1, 8);
    std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
    std::string out;
    size_t n = len(rng);
    for (size_t i = 0; i < n; ++i) out += alphabet[pick(rng)];
    return out;
}

ArgValue random_arg(std::mt19937& rng) {
    std::uniform_int_distribution<int> form(0, 4);
    switch (form(rng)) {
        case 0: return string_literal_arg("\"x\"", random_text(rng));
        case 1: return plain_arg(ArgForm::Identifier, random_ident(rng));
        case 2: return plain_arg(ArgForm::FunctionRef, "&" + random_ident(rng));
        case 3: return plain_arg(ArgForm::Lambda, "[](int a){return a;}");
        default: return plain_arg(ArgForm::Other, random_text(rng));
    }
}

}  // namespace

TEST_CASE("field quoting follows rfc 4180") {
    CHECK(csv::escape_field("plain") == "plain");
    CHECK(csv::escape_field("a,b") == "\"a,b\"");
    CHECK(csv::escape_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv::escape_field("line\nbreak") == "\"line\nbreak\"");
    CHECK(csv::escape_field("") == "");
}

TEST_CASE("quoted fields round-trip through the parser") {
    auto rows = csv::parse_rows("a,\"b,c\",\"d\"\"e\"\n\"multi\nline\",x\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].second == std::vector<std::string>{"a", "b,c", "d\"e"});
    CHECK(rows[1].second == std::vector<std::string>{"multi\nline", "x"});
    CHECK(rows[1].first == 2);
}

TEST_CASE("empty record list serializes to a lone header row") {
    std::string text = csv::to_csv(std::vector<FunctionDef>{});
    CHECK(text == "unit,line,language,scope,name,has_body,is_anonymous\n");
    CHECK(csv::from_csv<FunctionDef>(text).empty());
}

TEST_CASE("function def row layout is pinned") {
    FunctionDef d = make_def("B.cpp", 7, Lang::Cpp, {}, "f", true);
    std::string text = csv::to_csv(std::vector<FunctionDef>{d});
    CHECK(text ==
          "unit,line,language,scope,name,has_body,is_anonymous\n"
          "B.cpp,7,CPP,,f,true,false\n");
}

TEST_CASE("rows are sorted before serialization") {
    FunctionDef a = make_def("z.py", 2, Lang::Python, {}, "g", true);
    FunctionDef b = make_def("a.py", 11, Lang::Python, {}, "h", true);
    FunctionDef c = make_def("a.py", 2, Lang::Python, {}, "i", true);
    std::string forward = csv::to_csv(std::vector<FunctionDef>{a, b, c});
    std::string backward = csv::to_csv(std::vector<FunctionDef>{c, b, a});
    CHECK(forward == backward);
    // numeric line ordering: line 2 before line 11 within a.py
    CHECK(forward.find("a.py,2") < forward.find("a.py,11"));
    CHECK(forward.find("a.py,11") < forward.find("z.py,2"));
}

TEST_CASE("schema mismatch is a fatal error naming the columns") {
    CHECK_THROWS_WITH_AS(
        csv::from_csv<FunctionDef>("unit,line,language\nB.cpp,1,CPP\n"),
        doctest::Contains("schema mismatch"), csv::CsvError);
    CHECK_THROWS_AS(csv::from_csv<FunctionDef>(""), csv::CsvError);
}

TEST_CASE("malformed rows report their line number") {
    std::string text =
        "unit,line,language,scope,name,has_body,is_anonymous\n"
        "B.cpp,notanumber,CPP,,f,true,false\n";
    CHECK_THROWS_WITH_AS(csv::from_csv<FunctionDef>(text), doctest::Contains("line 2"),
                         csv::CsvError);
    std::string short_row =
        "unit,line,language,scope,name,has_body,is_anonymous\n"
        "B.cpp,1\n";
    CHECK_THROWS_WITH_AS(csv::from_csv<FunctionDef>(short_row), doctest::Contains("columns"),
                         csv::CsvError);
}

TEST_CASE("duplicate def records are rejected on read") {
    FunctionDef d = make_def("B.cpp", 7, Lang::Cpp, {}, "f", true);
    std::string row = "B.cpp,7,CPP,,f,true,false\n";
    std::string text = "unit,line,language,scope,name,has_body,is_anonymous\n" + row + row;
    CHECK_THROWS_AS(csv::from_csv<FunctionDef>(text), std::runtime_error);
}

TEST_CASE("csv round-trip identity over randomized records") {
    std::mt19937 rng(20240911);
    std::uniform_int_distribution<int> line(1, 500);
    std::uniform_int_distribution<int> count(0, 40);
    std::uniform_int_distribution<int> coin(0, 1);

    for (int iter = 0; iter < 25; ++iter) {
        {
            std::vector<FunctionDef> xs;
            int n = count(rng);
            for (int k = 0; k < n; ++k) {
                xs.push_back(make_def(random_ident(rng) + ".cpp", line(rng) * 101 + k, Lang::Cpp,
                                      {random_ident(rng)}, random_ident(rng), coin(rng) != 0));
            }
            csv::canonical_sort(xs);
            xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
            CHECK(csv::from_csv<FunctionDef>(csv::to_csv(xs)) == xs);
        }
        {
            std::vector<CallSite> xs;
            int n = count(rng);
            for (int k = 0; k < n; ++k) {
                CallSite c;
                c.unit = random_ident(rng) + ".py";
                c.line = line(rng);
                c.language = Lang::Python;
                c.caller_fqn = kModuleScope;
                c.callee_expr = random_ident(rng) + "." + random_ident(rng);
                int args = count(rng) % 4;
                for (int a = 0; a < args; ++a) c.args.push_back(random_arg(rng));
                xs.push_back(std::move(c));
            }
            csv::canonical_sort(xs);
            CHECK(csv::from_csv<CallSite>(csv::to_csv(xs)) == xs);
        }
        {
            std::vector<ImportRecord> xs;
            int n = count(rng);
            for (int k = 0; k < n; ++k) {
                ImportRecord r;
                r.unit = random_ident(rng) + ".py";
                r.line = line(rng);
                r.imported_name = random_ident(rng);
                r.alias = random_ident(rng);
                r.member = coin(rng) ? random_ident(rng) : "";
                r.mechanism = coin(rng) ? ImportMechanism::Standard : ImportMechanism::Dynamic;
                xs.push_back(std::move(r));
            }
            csv::canonical_sort(xs);
            CHECK(csv::from_csv<ImportRecord>(csv::to_csv(xs)) == xs);
        }
        {
            std::vector<AssignRecord> xs;
            int n = count(rng);
            for (int k = 0; k < n; ++k) {
                AssignRecord r;
                r.unit = random_ident(rng) + ".py";
                r.line = line(rng);
                r.language = coin(rng) ? Lang::Python : Lang::Cpp;
                r.scope_fqn = coin(rng) ? kModuleScope : kFileScope;
                r.variable = random_ident(rng);
                if (coin(rng)) {
                    r.value_form = ValueForm::StringLiteral;
                    r.literal = random_text(rng);
                } else {
                    r.value_form = ValueForm::Other;
                }
                xs.push_back(std::move(r));
            }
            csv::canonical_sort(xs);
            CHECK(csv::from_csv<AssignRecord>(csv::to_csv(xs)) == xs);
        }
        {
            std::vector<IncludeRecord> xs;
            int n = count(rng);
            for (int k = 0; k < n; ++k) {
                IncludeRecord r;
                r.unit = "u" + std::to_string(k) + ".cpp";
                r.line = line(rng);
                r.included_path = random_ident(rng) + ".h";
                r.is_first_substantive = coin(rng) != 0;
                xs.push_back(std::move(r));
            }
            csv::canonical_sort(xs);
            CHECK(csv::from_csv<IncludeRecord>(csv::to_csv(xs)) == xs);
        }
        {
            std::vector<RawBinding> xs;
            int n = count(rng);
            for (int k = 0; k < n; ++k) {
                RawBinding r;
                r.unit = random_ident(rng) + ".cpp";
                r.line = line(rng);
                r.module = random_ident(rng);
                r.module_var = "m";
                r.exposed_arg = random_arg(rng);
                r.target_arg = plain_arg(ArgForm::FunctionRef, "&" + random_ident(rng));
                xs.push_back(std::move(r));
            }
            csv::canonical_sort(xs);
            CHECK(csv::from_csv<RawBinding>(csv::to_csv(xs)) == xs);
        }
        {
            std::vector<BindingRecord> xs;
            int n = count(rng);
            for (int k = 0; k < n; ++k) {
                BindingRecord r;
                r.module = random_ident(rng);
                r.unit = random_ident(rng) + ".cpp";
                r.line = line(rng);
                r.exposed_name = random_ident(rng);
                r.target_fqn = random_ident(rng) + ".cpp::" + random_ident(rng);
                r.status = coin(rng) ? BindingStatus::Resolved : BindingStatus::Unresolved;
                xs.push_back(std::move(r));
            }
            csv::canonical_sort(xs);
            CHECK(csv::from_csv<BindingRecord>(csv::to_csv(xs)) == xs);
        }
        {
            std::vector<ResolvedCall> xs;
            int n = count(rng);
            for (int k = 0; k < n; ++k) {
                ResolvedCall r;
                r.call.unit = random_ident(rng) + ".py";
                r.call.line = line(rng);
                r.call.language = Lang::Python;
                r.call.caller_fqn = kModuleScope;
                r.call.callee_expr = random_ident(rng);
                r.cross_language = coin(rng) != 0;
                r.resolved_callee = r.cross_language ? "B.cpp::f" : "";
                r.flag = coin(rng) ? "" : kFlagAnonymousTarget;
                xs.push_back(std::move(r));
            }
            csv::canonical_sort(xs);
            CHECK(csv::from_csv<ResolvedCall>(csv::to_csv(xs)) == xs);
        }
    }
}

TEST_CASE("file io reports the failing path") {
    std::vector<FunctionDef> defs;
    CHECK_THROWS_WITH_AS(csv::write_file(defs, "/nonexistent-dir-zzz"),
                         doctest::Contains("/nonexistent-dir-zzz"), csv::CsvError);
    CHECK_THROWS_AS(csv::read_file<FunctionDef>("/nonexistent-dir-zzz"), csv::CsvError);
}
