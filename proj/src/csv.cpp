#include "polycall/csv.hpp"

#include <charconv>
#include <fstream>

#include "json.hpp"

namespace polycall::csv {

namespace {

int parse_line_number(const std::string& field, size_t line_no) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || value < 0) {
        throw CsvError("line " + std::to_string(line_no) + ": invalid line number '" + field + "'");
    }
    return value;
}

bool parse_bool(const std::string& field, size_t line_no) {
    if (field == "true") return true;
    if (field == "false") return false;
    throw CsvError("line " + std::to_string(line_no) + ": invalid boolean '" + field + "'");
}

template <class Fn>
auto parse_enum(Fn fn, const std::string& field, size_t line_no) {
    try {
        return fn(field);
    } catch (const std::runtime_error& e) {
        throw CsvError("line " + std::to_string(line_no) + ": " + e.what());
    }
}

nlohmann::json arg_as_json(const ArgValue& arg) {
    nlohmann::json j;
    j["form"] = to_string(arg.form);
    j["text"] = arg.text;
    if (arg.form == ArgForm::StringLiteral) j["literal"] = arg.literal;
    return j;
}

ArgValue arg_of_json(const nlohmann::json& j, size_t line_no) {
    if (!j.is_object() || !j.contains("form") || !j.contains("text")) {
        throw CsvError("line " + std::to_string(line_no) + ": malformed argument value");
    }
    ArgValue arg;
    arg.form = parse_enum(parse_arg_form, j.at("form").get<std::string>(), line_no);
    arg.text = j.at("text").get<std::string>();
    if (arg.form == ArgForm::StringLiteral) {
        if (!j.contains("literal")) {
            throw CsvError("line " + std::to_string(line_no) +
                           ": STRING_LITERAL argument without literal value");
        }
        arg.literal = j.at("literal").get<std::string>();
    } else if (j.contains("literal")) {
        throw CsvError("line " + std::to_string(line_no) +
                       ": literal value on non-literal argument");
    }
    return arg;
}

}  // namespace

std::string escape_field(const std::string& field) {
    bool needs_quote = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quote) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::pair<size_t, std::vector<std::string>>> parse_rows(std::string_view text) {
    std::vector<std::pair<size_t, std::vector<std::string>>> rows;
    size_t line = 1;
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        size_t row_line = line;
        std::vector<std::string> fields;
        std::string field;
        bool in_quotes = false;
        bool row_done = false;
        while (i < n && !row_done) {
            char c = text[i];
            if (in_quotes) {
                if (c == '"') {
                    if (i + 1 < n && text[i + 1] == '"') {
                        field += '"';
                        i += 2;
                    } else {
                        in_quotes = false;
                        ++i;
                    }
                } else {
                    if (c == '\n') ++line;
                    field += c;
                    ++i;
                }
            } else if (c == '"') {
                if (!field.empty()) {
                    throw CsvError("line " + std::to_string(line) +
                                   ": quote inside unquoted field");
                }
                in_quotes = true;
                ++i;
            } else if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
                ++i;
            } else if (c == '\n' || (c == '\r' && i + 1 < n && text[i + 1] == '\n')) {
                i += (c == '\r') ? 2 : 1;
                ++line;
                row_done = true;
            } else {
                field += c;
                ++i;
            }
        }
        if (in_quotes) {
            throw CsvError("line " + std::to_string(row_line) + ": unterminated quoted field");
        }
        fields.push_back(std::move(field));
        rows.emplace_back(row_line, std::move(fields));
    }
    return rows;
}

bool row_less(const std::vector<std::string>& a, const std::vector<std::string>& b,
              const Schema& s) {
    if (a[s.unit_col] != b[s.unit_col]) return a[s.unit_col] < b[s.unit_col];
    long la = std::strtol(a[s.line_col].c_str(), nullptr, 10);
    long lb = std::strtol(b[s.line_col].c_str(), nullptr, 10);
    if (la != lb) return la < lb;
    return a < b;
}

std::string arg_to_json(const ArgValue& arg) {
    return arg_as_json(arg).dump();
}

ArgValue arg_from_json(const std::string& text, size_t line_no) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        throw CsvError("line " + std::to_string(line_no) + ": malformed argument cell");
    }
    return arg_of_json(j, line_no);
}

std::string args_to_json(const std::vector<ArgValue>& args) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& a : args) j.push_back(arg_as_json(a));
    return j.dump();
}

std::vector<ArgValue> args_from_json(const std::string& text, size_t line_no) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_array()) {
        throw CsvError("line " + std::to_string(line_no) + ": malformed arguments cell");
    }
    std::vector<ArgValue> args;
    args.reserve(j.size());
    for (const auto& item : j) args.push_back(arg_of_json(item, line_no));
    return args;
}

template <>
const Schema& schema<FunctionDef>() {
    static const Schema s{"defs.csv",
                          {"unit", "line", "language", "scope", "name", "has_body", "is_anonymous"},
                          0, 1};
    return s;
}

template <>
const Schema& schema<CallSite>() {
    static const Schema s{"calls.csv",
                          {"unit", "line", "language", "caller_fqn", "callee_expr", "args"},
                          0, 1};
    return s;
}

template <>
const Schema& schema<ImportRecord>() {
    static const Schema s{"imports.csv",
                          {"unit", "line", "imported_name", "alias", "member", "mechanism"},
                          0, 1};
    return s;
}

template <>
const Schema& schema<AssignRecord>() {
    static const Schema s{"assigns.csv",
                          {"unit", "line", "language", "scope_fqn", "variable", "value_form",
                           "literal"},
                          0, 1};
    return s;
}

template <>
const Schema& schema<IncludeRecord>() {
    static const Schema s{"includes.csv",
                          {"unit", "line", "included_path", "is_first_substantive"},
                          0, 1};
    return s;
}

template <>
const Schema& schema<RawBinding>() {
    static const Schema s{"bindings_raw.csv",
                          {"unit", "line", "module", "module_var", "exposed_arg", "target_arg"},
                          0, 1};
    return s;
}

template <>
const Schema& schema<BindingRecord>() {
    static const Schema s{"bindings.csv",
                          {"module", "unit", "line", "exposed_name", "target_fqn", "status"},
                          1, 2};
    return s;
}

template <>
const Schema& schema<ResolvedCall>() {
    static const Schema s{"calls_resolved.csv",
                          {"unit", "line", "language", "caller_fqn", "callee_expr", "args",
                           "cross_language", "resolved_callee", "flag"},
                          0, 1};
    return s;
}

template <>
std::vector<std::string> to_row(const FunctionDef& r) {
    return {r.unit, std::to_string(r.line), to_string(r.language), join_scope(r.scope), r.name,
            r.has_body ? "true" : "false", r.is_anonymous ? "true" : "false"};
}

template <>
std::vector<std::string> to_row(const CallSite& r) {
    return {r.unit, std::to_string(r.line), to_string(r.language), r.caller_fqn, r.callee_expr,
            args_to_json(r.args)};
}

template <>
std::vector<std::string> to_row(const ImportRecord& r) {
    return {r.unit, std::to_string(r.line), r.imported_name, r.alias, r.member,
            to_string(r.mechanism)};
}

template <>
std::vector<std::string> to_row(const AssignRecord& r) {
    return {r.unit, std::to_string(r.line), to_string(r.language), r.scope_fqn, r.variable,
            to_string(r.value_form), r.literal};
}

template <>
std::vector<std::string> to_row(const IncludeRecord& r) {
    return {r.unit, std::to_string(r.line), r.included_path,
            r.is_first_substantive ? "true" : "false"};
}

template <>
std::vector<std::string> to_row(const RawBinding& r) {
    return {r.unit, std::to_string(r.line), r.module, r.module_var, arg_to_json(r.exposed_arg),
            arg_to_json(r.target_arg)};
}

template <>
std::vector<std::string> to_row(const BindingRecord& r) {
    return {r.module, r.unit, std::to_string(r.line), r.exposed_name, r.target_fqn,
            to_string(r.status)};
}

template <>
std::vector<std::string> to_row(const ResolvedCall& r) {
    return {r.call.unit, std::to_string(r.call.line), to_string(r.call.language),
            r.call.caller_fqn, r.call.callee_expr, args_to_json(r.call.args),
            r.cross_language ? "true" : "false", r.resolved_callee, r.flag};
}

template <>
FunctionDef from_row(const std::vector<std::string>& row, size_t line_no) {
    FunctionDef r;
    r.unit = row[0];
    r.line = parse_line_number(row[1], line_no);
    r.language = parse_enum(parse_lang, row[2], line_no);
    r.scope = split_scope(row[3]);
    r.name = row[4];
    r.has_body = parse_bool(row[5], line_no);
    r.is_anonymous = parse_bool(row[6], line_no);
    return r;
}

template <>
CallSite from_row(const std::vector<std::string>& row, size_t line_no) {
    CallSite r;
    r.unit = row[0];
    r.line = parse_line_number(row[1], line_no);
    r.language = parse_enum(parse_lang, row[2], line_no);
    r.caller_fqn = row[3];
    r.callee_expr = row[4];
    if (r.callee_expr.empty()) {
        throw CsvError("line " + std::to_string(line_no) + ": empty callee expression");
    }
    r.args = args_from_json(row[5], line_no);
    return r;
}

template <>
ImportRecord from_row(const std::vector<std::string>& row, size_t line_no) {
    ImportRecord r;
    r.unit = row[0];
    r.line = parse_line_number(row[1], line_no);
    r.imported_name = row[2];
    r.alias = row[3];
    r.member = row[4];
    r.mechanism = parse_enum(parse_import_mechanism, row[5], line_no);
    return r;
}

template <>
AssignRecord from_row(const std::vector<std::string>& row, size_t line_no) {
    AssignRecord r;
    r.unit = row[0];
    r.line = parse_line_number(row[1], line_no);
    r.language = parse_enum(parse_lang, row[2], line_no);
    r.scope_fqn = row[3];
    r.variable = row[4];
    r.value_form = parse_enum(parse_value_form, row[5], line_no);
    r.literal = row[6];
    if (r.value_form == ValueForm::Other && !r.literal.empty()) {
        throw CsvError("line " + std::to_string(line_no) + ": literal value on OTHER assignment");
    }
    return r;
}

template <>
IncludeRecord from_row(const std::vector<std::string>& row, size_t line_no) {
    IncludeRecord r;
    r.unit = row[0];
    r.line = parse_line_number(row[1], line_no);
    r.included_path = row[2];
    r.is_first_substantive = parse_bool(row[3], line_no);
    return r;
}

template <>
RawBinding from_row(const std::vector<std::string>& row, size_t line_no) {
    RawBinding r;
    r.unit = row[0];
    r.line = parse_line_number(row[1], line_no);
    r.module = row[2];
    r.module_var = row[3];
    r.exposed_arg = arg_from_json(row[4], line_no);
    r.target_arg = arg_from_json(row[5], line_no);
    return r;
}

template <>
BindingRecord from_row(const std::vector<std::string>& row, size_t line_no) {
    BindingRecord r;
    r.module = row[0];
    r.unit = row[1];
    r.line = parse_line_number(row[2], line_no);
    r.exposed_name = row[3];
    r.target_fqn = row[4];
    r.status = parse_enum(parse_binding_status, row[5], line_no);
    return r;
}

template <>
ResolvedCall from_row(const std::vector<std::string>& row, size_t line_no) {
    ResolvedCall r;
    r.call.unit = row[0];
    r.call.line = parse_line_number(row[1], line_no);
    r.call.language = parse_enum(parse_lang, row[2], line_no);
    r.call.caller_fqn = row[3];
    r.call.callee_expr = row[4];
    r.call.args = args_from_json(row[5], line_no);
    r.cross_language = parse_bool(row[6], line_no);
    r.resolved_callee = row[7];
    r.flag = row[8];
    return r;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError("cannot open file for reading: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CsvError("cannot open file for writing: " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw CsvError("write failed: " + path.string());
}

template <class T>
std::filesystem::path write_file(const std::vector<T>& records, const std::filesystem::path& dir) {
    std::filesystem::path path = csv_path<T>(dir);
    write_text_file(path, to_csv(records));
    return path;
}

template <class T>
std::vector<T> read_file(const std::filesystem::path& dir) {
    std::filesystem::path path = csv_path<T>(dir);
    try {
        return from_csv<T>(read_text_file(path));
    } catch (const CsvError& e) {
        throw CsvError(path.string() + ": " + e.what());
    }
}

template std::filesystem::path write_file(const std::vector<FunctionDef>&, const std::filesystem::path&);
template std::filesystem::path write_file(const std::vector<CallSite>&, const std::filesystem::path&);
template std::filesystem::path write_file(const std::vector<ImportRecord>&, const std::filesystem::path&);
template std::filesystem::path write_file(const std::vector<AssignRecord>&, const std::filesystem::path&);
template std::filesystem::path write_file(const std::vector<IncludeRecord>&, const std::filesystem::path&);
template std::filesystem::path write_file(const std::vector<RawBinding>&, const std::filesystem::path&);
template std::filesystem::path write_file(const std::vector<BindingRecord>&, const std::filesystem::path&);
template std::filesystem::path write_file(const std::vector<ResolvedCall>&, const std::filesystem::path&);

template std::vector<FunctionDef> read_file(const std::filesystem::path&);
template std::vector<CallSite> read_file(const std::filesystem::path&);
template std::vector<ImportRecord> read_file(const std::filesystem::path&);
template std::vector<AssignRecord> read_file(const std::filesystem::path&);
template std::vector<IncludeRecord> read_file(const std::filesystem::path&);
template std::vector<RawBinding> read_file(const std::filesystem::path&);
template std::vector<BindingRecord> read_file(const std::filesystem::path&);
template std::vector<ResolvedCall> read_file(const std::filesystem::path&);

}  // namespace polycall::csv
