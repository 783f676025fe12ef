#include "polycall/ir.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace polycall {

namespace {

[[noreturn]] void bad_enum(const char* kind, const std::string& value) {
    throw std::runtime_error(std::string("invalid ") + kind + " value: '" + value + "'");
}

}  // namespace

const char* to_string(Lang v) {
    return v == Lang::Python ? "PYTHON" : "CPP";
}

const char* to_string(UnitKind v) {
    switch (v) {
        case UnitKind::Script: return "SCRIPT";
        case UnitKind::Source: return "SOURCE";
        case UnitKind::Header: return "HEADER";
    }
    return "SCRIPT";
}

const char* to_string(ArgForm v) {
    switch (v) {
        case ArgForm::StringLiteral: return "STRING_LITERAL";
        case ArgForm::Identifier: return "IDENTIFIER";
        case ArgForm::FunctionRef: return "FUNCTION_REF";
        case ArgForm::Lambda: return "LAMBDA";
        case ArgForm::Other: return "OTHER";
    }
    return "OTHER";
}

const char* to_string(ImportMechanism v) {
    return v == ImportMechanism::Standard ? "STANDARD" : "DYNAMIC";
}

const char* to_string(ValueForm v) {
    return v == ValueForm::StringLiteral ? "STRING_LITERAL" : "OTHER";
}

const char* to_string(BindingStatus v) {
    switch (v) {
        case BindingStatus::Resolved: return "RESOLVED";
        case BindingStatus::Anonymous: return "ANONYMOUS";
        case BindingStatus::Unresolved: return "UNRESOLVED";
    }
    return "UNRESOLVED";
}

Lang parse_lang(const std::string& s) {
    if (s == "PYTHON") return Lang::Python;
    if (s == "CPP") return Lang::Cpp;
    bad_enum("language", s);
}

UnitKind parse_unit_kind(const std::string& s) {
    if (s == "SCRIPT") return UnitKind::Script;
    if (s == "SOURCE") return UnitKind::Source;
    if (s == "HEADER") return UnitKind::Header;
    bad_enum("unit kind", s);
}

ArgForm parse_arg_form(const std::string& s) {
    if (s == "STRING_LITERAL") return ArgForm::StringLiteral;
    if (s == "IDENTIFIER") return ArgForm::Identifier;
    if (s == "FUNCTION_REF") return ArgForm::FunctionRef;
    if (s == "LAMBDA") return ArgForm::Lambda;
    if (s == "OTHER") return ArgForm::Other;
    bad_enum("arg form", s);
}

ImportMechanism parse_import_mechanism(const std::string& s) {
    if (s == "STANDARD") return ImportMechanism::Standard;
    if (s == "DYNAMIC") return ImportMechanism::Dynamic;
    bad_enum("import mechanism", s);
}

ValueForm parse_value_form(const std::string& s) {
    if (s == "STRING_LITERAL") return ValueForm::StringLiteral;
    if (s == "OTHER") return ValueForm::Other;
    bad_enum("value form", s);
}

BindingStatus parse_binding_status(const std::string& s) {
    if (s == "RESOLVED") return BindingStatus::Resolved;
    if (s == "ANONYMOUS") return BindingStatus::Anonymous;
    if (s == "UNRESOLVED") return BindingStatus::Unresolved;
    bad_enum("binding status", s);
}

std::string module_block_scope(const std::string& module_name) {
    return "<pybind11:" + module_name + ">";
}

std::string anonymous_name(int index) {
    return "<anonymous:" + std::to_string(index) + ">";
}

bool is_anonymous_name(const std::string& name) {
    return name.rfind("<anonymous:", 0) == 0 && name.back() == '>';
}

bool is_pseudo_name(const std::string& name) {
    return !name.empty() && name.front() == '<' && name.back() == '>';
}

std::string join_scope(const std::vector<std::string>& scope) {
    std::string out;
    for (const auto& part : scope) {
        if (!out.empty()) out += '.';
        out += part;
    }
    return out;
}

std::vector<std::string> split_scope(const std::string& joined) {
    std::vector<std::string> out;
    if (joined.empty()) return out;
    size_t start = 0;
    while (true) {
        size_t dot = joined.find('.', start);
        if (dot == std::string::npos) {
            out.push_back(joined.substr(start));
            break;
        }
        out.push_back(joined.substr(start, dot - start));
        start = dot + 1;
    }
    return out;
}

std::string make_fqn(const std::string& unit, const std::vector<std::string>& scope,
                     const std::string& name) {
    std::string out = unit;
    out += "::";
    if (!scope.empty()) {
        out += join_scope(scope);
        out += "::";
    }
    out += name;
    return out;
}

std::string unit_stem(const std::string& path) {
    size_t slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    size_t dot = base.find_last_of('.');
    if (dot == std::string::npos || dot == 0) return base;
    return base.substr(0, dot);
}

std::string unit_extension(const std::string& path) {
    size_t slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    size_t dot = base.find_last_of('.');
    if (dot == std::string::npos || dot == 0) return "";
    return base.substr(dot);
}

ArgValue string_literal_arg(std::string text, std::string value) {
    ArgValue arg;
    arg.form = ArgForm::StringLiteral;
    arg.text = std::move(text);
    arg.literal = std::move(value);
    return arg;
}

ArgValue plain_arg(ArgForm form, std::string text) {
    ArgValue arg;
    arg.form = form;
    arg.text = std::move(text);
    return arg;
}

void UnitDiagnostics::merge(const UnitDiagnostics& other) {
    warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
    for (const auto& [kind, count] : other.skipped) skipped[kind] += count;
}

void validate_defs(const std::vector<FunctionDef>& defs) {
    std::set<std::tuple<std::string, int, std::string, std::string>> seen;
    for (const auto& d : defs) {
        auto key = std::make_tuple(d.unit, d.line, join_scope(d.scope), d.name);
        if (!seen.insert(key).second) {
            throw std::runtime_error("duplicate function definition record: " + d.unit + ":" +
                                     std::to_string(d.line) + " " + d.fqn());
        }
        if (d.is_anonymous != is_anonymous_name(d.name)) {
            throw std::runtime_error("anonymous flag does not match name '" + d.name + "' at " +
                                     d.unit + ":" + std::to_string(d.line));
        }
    }
}

void validate_includes(const std::vector<IncludeRecord>& includes) {
    std::set<std::string> first_substantive_units;
    for (const auto& inc : includes) {
        if (!inc.is_first_substantive) continue;
        if (!first_substantive_units.insert(inc.unit).second) {
            throw std::runtime_error("unit '" + inc.unit +
                                     "' has more than one first-substantive include");
        }
    }
}

void validate_raw_bindings(const std::vector<RawBinding>& bindings) {
    auto is_identifier = [](const std::string& s) {
        if (s.empty()) return false;
        if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
        return std::all_of(s.begin(), s.end(), [](unsigned char c) {
            return std::isalnum(c) || c == '_';
        });
    };
    for (const auto& b : bindings) {
        if (!is_identifier(b.module)) {
            throw std::runtime_error("binding module name '" + b.module +
                                     "' is not a valid identifier (" + b.unit + ":" +
                                     std::to_string(b.line) + ")");
        }
    }
}

}  // namespace polycall
