#pragma once

#include <map>
#include <string>
#include <vector>

namespace polycall {

// Wire form for every enum is its uppercase name.
enum class Lang { Python, Cpp };
enum class UnitKind { Script, Source, Header };
enum class ArgForm { StringLiteral, Identifier, FunctionRef, Lambda, Other };
enum class ImportMechanism { Standard, Dynamic };
enum class ValueForm { StringLiteral, Other };
enum class BindingStatus { Resolved, Anonymous, Unresolved };

const char* to_string(Lang v);
const char* to_string(UnitKind v);
const char* to_string(ArgForm v);
const char* to_string(ImportMechanism v);
const char* to_string(ValueForm v);
const char* to_string(BindingStatus v);

Lang parse_lang(const std::string& s);
UnitKind parse_unit_kind(const std::string& s);
ArgForm parse_arg_form(const std::string& s);
ImportMechanism parse_import_mechanism(const std::string& s);
ValueForm parse_value_form(const std::string& s);
BindingStatus parse_binding_status(const std::string& s);

// Pseudo callers/scopes. Top-level Python statements belong to <module>,
// top-level C++ statements to <file>, and statements inside a pybind11
// module block to <pybind11:MOD>.
inline constexpr const char* kModuleScope = "<module>";
inline constexpr const char* kFileScope = "<file>";
inline constexpr const char* kUnresolved = "<unresolved>";

std::string module_block_scope(const std::string& module_name);
std::string anonymous_name(int index);
bool is_anonymous_name(const std::string& name);
bool is_pseudo_name(const std::string& name);

// Fully qualified names: "<unit>::<scope1>.<scope2>::<name>", scope part
// omitted when empty.
std::string join_scope(const std::vector<std::string>& scope);
std::vector<std::string> split_scope(const std::string& joined);
std::string make_fqn(const std::string& unit, const std::vector<std::string>& scope,
                     const std::string& name);

std::string unit_stem(const std::string& path);
std::string unit_extension(const std::string& path);

struct SourceUnit {
    std::string path;  // repository-relative, forward slashes
    Lang language = Lang::Python;
    UnitKind kind = UnitKind::Script;

    bool operator==(const SourceUnit&) const = default;
};

struct ArgValue {
    ArgForm form = ArgForm::Other;
    std::string text;     // raw source text of the argument
    std::string literal;  // set iff form == StringLiteral

    bool operator==(const ArgValue&) const = default;
};

ArgValue string_literal_arg(std::string text, std::string value);
ArgValue plain_arg(ArgForm form, std::string text);

struct FunctionDef {
    std::string unit;
    int line = 0;  // 1-based
    Lang language = Lang::Python;
    std::vector<std::string> scope;  // enclosing namespaces/classes/functions
    std::string name;                // identifier or "<anonymous:N>"
    bool has_body = true;
    bool is_anonymous = false;

    bool operator==(const FunctionDef&) const = default;
    std::string fqn() const { return make_fqn(unit, scope, name); }
};

struct CallSite {
    std::string unit;
    int line = 0;
    Lang language = Lang::Python;
    std::string caller_fqn;   // enclosing function fqn, or <module>/<file>
    std::string callee_expr;  // textual callee, e.g. "B.f"
    std::vector<ArgValue> args;

    bool operator==(const CallSite&) const = default;
};

struct ImportRecord {
    std::string unit;
    int line = 0;
    std::string imported_name;
    std::string alias;   // equals imported_name when no alias
    std::string member;  // set for "from X import member"
    ImportMechanism mechanism = ImportMechanism::Standard;

    bool operator==(const ImportRecord&) const = default;
};

struct AssignRecord {
    std::string unit;
    int line = 0;
    Lang language = Lang::Python;
    std::string scope_fqn;  // enclosing function fqn, or a pseudo scope
    std::string variable;
    ValueForm value_form = ValueForm::Other;
    std::string literal;  // set iff value_form == StringLiteral

    bool operator==(const AssignRecord&) const = default;
};

struct IncludeRecord {
    std::string unit;
    int line = 0;
    std::string included_path;  // text between quotes/brackets
    bool is_first_substantive = false;

    bool operator==(const IncludeRecord&) const = default;
};

struct RawBinding {
    std::string unit;
    int line = 0;
    std::string module;      // first macro argument
    std::string module_var;  // second macro argument
    ArgValue exposed_arg;    // first .def argument
    ArgValue target_arg;     // second .def argument

    bool operator==(const RawBinding&) const = default;
};

struct BindingRecord {
    std::string module;
    std::string unit;
    int line = 0;
    std::string exposed_name;  // or "<unresolved>"
    std::string target_fqn;    // C++ def fqn, anonymous fqn, or "<unresolved>"
    BindingStatus status = BindingStatus::Unresolved;

    bool operator==(const BindingRecord&) const = default;
};

// Rewriting flags carried on ResolvedCall / graph edges.
inline constexpr const char* kFlagAnonymousTarget = "anonymous-target";
inline constexpr const char* kFlagUnresolvedCross = "unresolved-cross-call";

struct ResolvedCall {
    CallSite call;
    bool cross_language = false;
    std::string resolved_callee;  // ';'-separated when several bindings match
    std::string flag;

    bool operator==(const ResolvedCall&) const = default;
};

struct IrTables {
    std::vector<FunctionDef> defs;
    std::vector<CallSite> calls;
    std::vector<ImportRecord> imports;
    std::vector<AssignRecord> assigns;
    std::vector<IncludeRecord> includes;
    std::vector<RawBinding> raw_bindings;
};

struct ResolvedTables {
    std::vector<BindingRecord> bindings;
    std::vector<ResolvedCall> calls;
};

struct UnitDiagnostics {
    std::vector<std::string> warnings;
    std::map<std::string, int> skipped;  // construct kind -> count

    void skip(const std::string& kind) { ++skipped[kind]; }
    void merge(const UnitDiagnostics& other);
};

// Uniqueness checks shared by the extractors and CSV ingestion. Throw
// std::runtime_error naming the offending record.
void validate_defs(const std::vector<FunctionDef>& defs);
void validate_includes(const std::vector<IncludeRecord>& includes);
void validate_raw_bindings(const std::vector<RawBinding>& bindings);

}  // namespace polycall
