#pragma once

#include <algorithm>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "polycall/ir.hpp"

namespace polycall::csv {

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Schema {
    std::string file_name;
    std::vector<std::string> columns;
    size_t unit_col;  // primary sort key
    size_t line_col;  // secondary sort key, compared numerically
};

template <class T> const Schema& schema();
template <class T> std::vector<std::string> to_row(const T& record);
template <class T> T from_row(const std::vector<std::string>& row, size_t line_no);

template <> const Schema& schema<FunctionDef>();
template <> const Schema& schema<CallSite>();
template <> const Schema& schema<ImportRecord>();
template <> const Schema& schema<AssignRecord>();
template <> const Schema& schema<IncludeRecord>();
template <> const Schema& schema<RawBinding>();
template <> const Schema& schema<BindingRecord>();
template <> const Schema& schema<ResolvedCall>();

template <> std::vector<std::string> to_row(const FunctionDef&);
template <> std::vector<std::string> to_row(const CallSite&);
template <> std::vector<std::string> to_row(const ImportRecord&);
template <> std::vector<std::string> to_row(const AssignRecord&);
template <> std::vector<std::string> to_row(const IncludeRecord&);
template <> std::vector<std::string> to_row(const RawBinding&);
template <> std::vector<std::string> to_row(const BindingRecord&);
template <> std::vector<std::string> to_row(const ResolvedCall&);

template <> FunctionDef from_row(const std::vector<std::string>&, size_t);
template <> CallSite from_row(const std::vector<std::string>&, size_t);
template <> ImportRecord from_row(const std::vector<std::string>&, size_t);
template <> AssignRecord from_row(const std::vector<std::string>&, size_t);
template <> IncludeRecord from_row(const std::vector<std::string>&, size_t);
template <> RawBinding from_row(const std::vector<std::string>&, size_t);
template <> BindingRecord from_row(const std::vector<std::string>&, size_t);
template <> ResolvedCall from_row(const std::vector<std::string>&, size_t);

// Post-read/pre-write invariant hooks; default is no check.
template <class T> inline void validate_records(const std::vector<T>&) {}
template <> inline void validate_records(const std::vector<FunctionDef>& r) { validate_defs(r); }
template <> inline void validate_records(const std::vector<IncludeRecord>& r) { validate_includes(r); }
template <> inline void validate_records(const std::vector<RawBinding>& r) { validate_raw_bindings(r); }

// RFC-4180 quoting; fields are quoted only when they need to be.
std::string escape_field(const std::string& field);

// Parses CSV text into rows of fields, each tagged with the 1-based physical
// line the row starts on. Accepts LF and CRLF terminators.
std::vector<std::pair<size_t, std::vector<std::string>>> parse_rows(std::string_view text);

bool row_less(const std::vector<std::string>& a, const std::vector<std::string>& b,
              const Schema& s);

// JSON cell encoding for ArgValue columns.
std::string arg_to_json(const ArgValue& arg);
ArgValue arg_from_json(const std::string& text, size_t line_no);
std::string args_to_json(const std::vector<ArgValue>& args);
std::vector<ArgValue> args_from_json(const std::string& text, size_t line_no);

template <class T>
void canonical_sort(std::vector<T>& records) {
    const Schema& s = schema<T>();
    std::vector<std::pair<std::vector<std::string>, size_t>> keyed;
    keyed.reserve(records.size());
    for (size_t i = 0; i < records.size(); ++i) keyed.emplace_back(to_row(records[i]), i);
    std::sort(keyed.begin(), keyed.end(), [&s](const auto& a, const auto& b) {
        if (a.first == b.first) return a.second < b.second;
        return row_less(a.first, b.first, s);
    });
    std::vector<T> sorted;
    sorted.reserve(records.size());
    for (const auto& [row, index] : keyed) sorted.push_back(std::move(records[index]));
    records = std::move(sorted);
}

template <class T>
std::string to_csv(std::vector<T> records) {
    validate_records(records);
    canonical_sort(records);
    const Schema& s = schema<T>();
    std::string out;
    for (size_t i = 0; i < s.columns.size(); ++i) {
        if (i) out += ',';
        out += s.columns[i];
    }
    out += '\n';
    for (const T& record : records) {
        std::vector<std::string> row = to_row(record);
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += escape_field(row[i]);
        }
        out += '\n';
    }
    return out;
}

template <class T>
std::vector<T> from_csv(std::string_view text) {
    const Schema& s = schema<T>();
    auto rows = parse_rows(text);
    if (rows.empty()) {
        throw CsvError("missing header row (expected '" + s.file_name + "' schema)");
    }
    const auto& header = rows.front().second;
    if (header != s.columns) {
        std::string expected, found;
        for (const auto& c : s.columns) expected += (expected.empty() ? "" : ",") + c;
        for (const auto& c : header) found += (found.empty() ? "" : ",") + c;
        throw CsvError("schema mismatch for " + s.file_name + ": expected columns [" + expected +
                       "], found [" + found + "]");
    }
    std::vector<T> records;
    records.reserve(rows.size() - 1);
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& [line_no, fields] = rows[i];
        if (fields.size() != s.columns.size()) {
            throw CsvError("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(s.columns.size()) + " columns, found " +
                           std::to_string(fields.size()));
        }
        records.push_back(from_row<T>(fields, line_no));
    }
    validate_records(records);
    return records;
}

template <class T>
std::filesystem::path csv_path(const std::filesystem::path& dir) {
    return dir / schema<T>().file_name;
}

// Writes <dir>/<schema file name>; returns the path written.
template <class T>
std::filesystem::path write_file(const std::vector<T>& records, const std::filesystem::path& dir);

template <class T>
std::vector<T> read_file(const std::filesystem::path& dir);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace polycall::csv
