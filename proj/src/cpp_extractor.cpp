#include "polycall/cpp_extractor.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "polycall/masking.hpp"

namespace polycall {

namespace {

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

const std::set<std::string>& non_callee_keywords() {
    static const std::set<std::string> kw = {
        "if", "while", "for", "switch", "catch", "return", "sizeof", "alignof",
        "decltype", "static_assert", "new", "delete", "throw", "typeid",
        "case", "goto", "else", "do", "co_await", "co_return", "co_yield",
        "and", "or", "not", "defined", "noexcept", "alignas", "requires",
    };
    return kw;
}

// Keywords that may directly precede a call expression.
const std::set<std::string>& control_keywords() {
    static const std::set<std::string> kw = {
        "return", "else", "do", "case", "goto", "throw", "co_return",
        "co_await", "co_yield", "and", "or", "not",
    };
    return kw;
}

const std::set<std::string>& type_keywords() {
    static const std::set<std::string> kw = {
        "void", "int", "bool", "char", "float", "double", "long", "short",
        "unsigned", "signed", "auto", "const", "constexpr", "inline",
        "static", "virtual", "explicit", "friend", "typename", "wchar_t",
        "char8_t", "char16_t", "char32_t", "register", "volatile", "extern",
    };
    return kw;
}

const std::set<std::string>& declaration_tail_tokens() {
    static const std::set<std::string> kw = {"const", "noexcept", "override", "final",
                                             "volatile", "mutable", "&", "&&"};
    return kw;
}

struct Token {
    enum Kind { Ident, Number, Punct, End };
    Kind kind = End;
    std::string text;
    size_t offset = 0;
};

std::vector<Token> tokenize(const std::string& text) {
    static const std::vector<std::string> multi = {
        "...", "->*", "<<=", ">>=", "::", "->", "==", "!=", "<=", ">=", "+=", "-=",
        "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "&&", "||", "++", "--", ".*",
    };
    std::vector<Token> out;
    const size_t n = text.size();
    size_t i = 0;
    while (i < n) {
        char c = text[i];
        if (is_space(c)) {
            ++i;
            continue;
        }
        Token tok;
        tok.offset = i;
        if (is_ident_start(c)) {
            size_t j = i;
            while (j < n && is_ident_char(text[j])) ++j;
            tok.kind = Token::Ident;
            tok.text = text.substr(i, j - i);
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < n && (is_ident_char(text[j]) || text[j] == '.')) ++j;
            tok.kind = Token::Number;
            tok.text = text.substr(i, j - i);
            i = j;
        } else {
            tok.kind = Token::Punct;
            bool matched = false;
            for (const auto& m : multi) {
                if (text.compare(i, m.size(), m) == 0) {
                    tok.text = m;
                    i += m.size();
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                tok.text = std::string(1, c);
                ++i;
            }
        }
        out.push_back(std::move(tok));
    }
    Token end_tok;
    end_tok.kind = Token::End;
    end_tok.offset = n;
    out.push_back(end_tok);
    return out;
}

struct Frame {
    enum Kind { Namespace, Class, Function, Pybind, Opaque };
    Kind kind = Namespace;
    std::string name;        // scope contribution (namespaces/classes only)
    int open_depth = 0;      // brace depth inside the block
    std::string module_var;  // Pybind frames
    std::string fqn;         // Function frames: caller fqn
};

class CppParser {
public:
    CppParser(std::string_view source, const std::string& path)
        : src_(source), path_(path), masked_(mask_cpp_source(source)), lines_(source) {
        for (const auto& w : masked_.warnings) out_.diagnostics.warnings.push_back(w);
    }

    CppExtraction run() {
        extract_includes_and_blank_preprocessor();
        toks_ = tokenize(masked_.text);
        scan();
        if (pybind_unbalanced_) {
            out_.diagnostics.warnings.push_back(
                "unbalanced PYBIND11_MODULE block in " + path_ + "; bindings suppressed");
            out_.raw_bindings.clear();
        }
        return std::move(out_);
    }

private:
    std::string_view src_;
    const std::string& path_;
    MaskedSource masked_;
    LineIndex lines_;
    std::vector<Token> toks_;
    std::vector<Frame> frames_;
    CppExtraction out_;
    int brace_depth_ = 0;
    int paren_depth_ = 0;
    int anon_counter_ = 0;
    bool pybind_unbalanced_ = false;

    // ---------------- preprocessor ----------------

    void extract_includes_and_blank_preprocessor() {
        std::vector<std::string> masked_lines;
        std::vector<size_t> line_offsets;
        {
            size_t start = 0;
            const std::string& text = masked_.text;
            for (size_t i = 0; i <= text.size(); ++i) {
                if (i == text.size() || text[i] == '\n') {
                    masked_lines.push_back(text.substr(start, i - start));
                    line_offsets.push_back(start);
                    start = i + 1;
                }
            }
        }

        struct LineInfo {
            bool preprocessor = false;
            std::string directive;
            bool blank_or_comment = false;
            int include_index = -1;
        };
        std::vector<LineInfo> info(masked_lines.size());

        bool continuation = false;
        for (size_t li = 0; li < masked_lines.size(); ++li) {
            const std::string& masked_line = masked_lines[li];
            std::string trimmed = trim(masked_line);
            if (continuation) {
                info[li].preprocessor = true;
                continuation = ends_with_backslash(masked_line);
                continue;
            }
            if (trimmed.empty()) {
                info[li].blank_or_comment = true;
                continue;
            }
            if (trimmed[0] != '#') continue;
            info[li].preprocessor = true;
            continuation = ends_with_backslash(masked_line);
            size_t p = trimmed.find_first_not_of(" \t", 1);
            if (p == std::string::npos) continue;
            size_t d = p;
            while (d < trimmed.size() && is_ident_char(trimmed[d])) ++d;
            info[li].directive = trimmed.substr(p, d - p);
            if (info[li].directive == "include") {
                size_t line_end = li + 1 < line_offsets.size() ? line_offsets[li + 1] - 1
                                                               : src_.size();
                std::string original_line(
                    src_.substr(line_offsets[li], line_end - line_offsets[li]));
                std::string inc_path = include_path_of(original_line);
                if (!inc_path.empty()) {
                    IncludeRecord rec;
                    rec.unit = path_;
                    rec.line = static_cast<int>(li + 1);
                    rec.included_path = inc_path;
                    info[li].include_index = static_cast<int>(out_.includes.size());
                    out_.includes.push_back(std::move(rec));
                } else {
                    out_.diagnostics.skip("malformed_include");
                }
            }
        }

        // Include-guard detection: the first two directive lines of the file
        // forming an #ifndef/#define pair over the same symbol.
        std::set<size_t> guard_lines;
        {
            std::vector<size_t> leading;
            for (size_t li = 0; li < masked_lines.size(); ++li) {
                if (info[li].blank_or_comment) continue;
                if (!info[li].preprocessor) break;
                leading.push_back(li);
                if (leading.size() == 2) break;
            }
            if (leading.size() == 2 && info[leading[0]].directive == "ifndef" &&
                info[leading[1]].directive == "define") {
                std::string a = directive_symbol(masked_lines[leading[0]], "ifndef");
                std::string b = directive_symbol(masked_lines[leading[1]], "define");
                if (!a.empty() && a == b) {
                    guard_lines.insert(leading[0]);
                    guard_lines.insert(leading[1]);
                }
            }
        }

        // First substantive line: not blank/comment-only, not #pragma once,
        // not an include-guard line, not #endif.
        int first_substantive = -1;
        for (size_t li = 0; li < masked_lines.size(); ++li) {
            if (info[li].blank_or_comment) continue;
            if (guard_lines.count(li)) continue;
            if (info[li].directive == "endif" || info[li].directive == "pragma") continue;
            first_substantive = static_cast<int>(li);
            break;
        }
        if (first_substantive >= 0) {
            int idx = info[static_cast<size_t>(first_substantive)].include_index;
            if (idx >= 0) out_.includes[static_cast<size_t>(idx)].is_first_substantive = true;
        }

        // Blank every preprocessor line so the token scan never sees them.
        for (size_t li = 0; li < masked_lines.size(); ++li) {
            if (!info[li].preprocessor) continue;
            size_t begin = line_offsets[li];
            size_t end = begin + masked_lines[li].size();
            for (size_t k = begin; k < end && k < masked_.text.size(); ++k) {
                if (masked_.text[k] != '\n') masked_.text[k] = ' ';
            }
        }
    }

    static bool ends_with_backslash(const std::string& line) {
        size_t e = line.size();
        while (e > 0 && (line[e - 1] == ' ' || line[e - 1] == '\t' || line[e - 1] == '\r')) --e;
        return e > 0 && line[e - 1] == '\\';
    }

    static std::string include_path_of(const std::string& line) {
        size_t q1 = line.find('"');
        size_t a1 = line.find('<');
        if (q1 != std::string::npos && (a1 == std::string::npos || q1 < a1)) {
            size_t q2 = line.find('"', q1 + 1);
            if (q2 != std::string::npos) return line.substr(q1 + 1, q2 - q1 - 1);
        }
        if (a1 != std::string::npos) {
            size_t a2 = line.find('>', a1 + 1);
            if (a2 != std::string::npos) return line.substr(a1 + 1, a2 - a1 - 1);
        }
        return "";
    }

    static std::string directive_symbol(const std::string& line, const std::string& directive) {
        size_t pos = line.find(directive);
        if (pos == std::string::npos) return "";
        pos += directive.size();
        while (pos < line.size() && is_space(line[pos])) ++pos;
        size_t end = pos;
        while (end < line.size() && is_ident_char(line[end])) ++end;
        return line.substr(pos, end - pos);
    }

    static std::string trim(const std::string& s) {
        size_t b = 0, e = s.size();
        while (b < e && is_space(s[b])) ++b;
        while (e > b && is_space(s[e - 1])) --e;
        return s.substr(b, e - b);
    }

    // ---------------- frames & context ----------------

    std::vector<std::string> scope_names() const {
        std::vector<std::string> names;
        for (const auto& f : frames_) {
            if ((f.kind == Frame::Namespace || f.kind == Frame::Class) && !f.name.empty()) {
                names.push_back(f.name);
            }
        }
        return names;
    }

    const Frame* innermost(Frame::Kind kind) const {
        for (size_t i = frames_.size(); i-- > 0;) {
            if (frames_[i].kind == kind) return &frames_[i];
        }
        return nullptr;
    }

    bool in_body() const {
        if (innermost(Frame::Function) != nullptr || innermost(Frame::Pybind) != nullptr) {
            return true;
        }
        return brace_depth_ > static_cast<int>(frames_.size());
    }

    bool in_opaque() const {
        return !frames_.empty() && frames_.back().kind == Frame::Opaque;
    }

    bool at_decl_scope() const {
        if (in_opaque() || in_body()) return false;
        return brace_depth_ == static_cast<int>(frames_.size());
    }

    std::string caller_fqn() const {
        const Frame* f = innermost(Frame::Function);
        return f != nullptr ? f->fqn : kFileScope;
    }

    std::string assign_scope() const {
        for (size_t i = frames_.size(); i-- > 0;) {
            if (frames_[i].kind == Frame::Function) return frames_[i].fqn;
            if (frames_[i].kind == Frame::Pybind) return module_block_scope(frames_[i].name);
        }
        return kFileScope;
    }

    std::string enclosing_class() const {
        for (size_t i = frames_.size(); i-- > 0;) {
            if (frames_[i].kind == Frame::Class) return frames_[i].name;
        }
        return "";
    }

    void push_frame(Frame f) {
        f.open_depth = ++brace_depth_;
        frames_.push_back(std::move(f));
    }

    // ---------------- token helpers ----------------

    const Token& tok(size_t i) const { return i < toks_.size() ? toks_[i] : toks_.back(); }

    bool is_punct(size_t i, const char* p) const {
        return tok(i).kind == Token::Punct && tok(i).text == p;
    }

    size_t matching_paren_tok(size_t open) const {
        int depth = 0;
        for (size_t i = open; i < toks_.size(); ++i) {
            if (is_punct(i, "(")) ++depth;
            else if (is_punct(i, ")")) {
                --depth;
                if (depth == 0) return i;
            }
        }
        return toks_.size();
    }

    size_t skip_angle_brackets(size_t open) const {
        int depth = 0;
        for (size_t i = open; i < toks_.size(); ++i) {
            if (is_punct(i, "<")) ++depth;
            else if (is_punct(i, ">")) {
                if (--depth == 0) return i + 1;
            } else if (is_punct(i, ">>")) {
                depth -= 2;
                if (depth <= 0) return i + 1;
            } else if (is_punct(i, ";") || is_punct(i, "{")) {
                return i;  // not a template argument list after all
            }
        }
        return toks_.size();
    }

    // ---------------- main scan ----------------

    void scan() {
        size_t i = 0;
        while (tok(i).kind != Token::End) {
            const Token& t = tok(i);
            if (t.kind == Token::Punct) {
                if (t.text == "{") {
                    ++brace_depth_;
                    ++i;
                    continue;
                }
                if (t.text == "}") {
                    if (brace_depth_ > 0) --brace_depth_;
                    while (!frames_.empty() && frames_.back().open_depth > brace_depth_) {
                        frames_.pop_back();
                    }
                    ++i;
                    continue;
                }
                if (t.text == "(") {
                    ++paren_depth_;
                    ++i;
                    continue;
                }
                if (t.text == ")") {
                    if (paren_depth_ > 0) --paren_depth_;
                    ++i;
                    continue;
                }
                if (t.text == "=" && paren_depth_ == 0 && !in_opaque()) {
                    handle_assignment(i);
                    ++i;
                    continue;
                }
                if (t.text == "~" && at_decl_scope() && tok(i + 1).kind == Token::Ident) {
                    size_t next = try_function_header(i);
                    if (next != i) {
                        i = next;
                        continue;
                    }
                }
                ++i;
                continue;
            }
            if (t.kind == Token::Number) {
                ++i;
                continue;
            }
            if (in_opaque()) {
                ++i;
                continue;
            }
            if (t.text == "template") {
                i = is_punct(i + 1, "<") ? skip_angle_brackets(i + 1) : i + 1;
                continue;
            }
            if (t.text == "namespace" && at_decl_scope()) {
                i = handle_namespace(i);
                continue;
            }
            if ((t.text == "class" || t.text == "struct" || t.text == "union") &&
                at_decl_scope()) {
                i = handle_class(i);
                continue;
            }
            if (t.text == "enum" && at_decl_scope()) {
                i = handle_enum(i);
                continue;
            }
            if (t.text == "extern" && at_decl_scope() && is_punct(i + 1, "{")) {
                Frame f;
                f.kind = Frame::Namespace;
                ++i;
                push_frame(f);
                ++i;
                continue;
            }
            if (t.text == "PYBIND11_MODULE") {
                i = handle_pybind_module(i);
                continue;
            }
            if ((t.text == "using" || t.text == "typedef") && at_decl_scope()) {
                while (!is_punct(i, ";") && tok(i).kind != Token::End) ++i;
                continue;
            }
            i = handle_identifier(i);
        }
        if (innermost(Frame::Pybind) != nullptr) pybind_unbalanced_ = true;
    }

    size_t handle_namespace(size_t i) {
        ++i;
        std::vector<std::string> parts;
        while (tok(i).kind == Token::Ident) {
            parts.push_back(tok(i).text);
            if (is_punct(i + 1, "::")) {
                i += 2;
            } else {
                ++i;
                break;
            }
        }
        if (is_punct(i, "=")) {  // namespace alias
            while (!is_punct(i, ";") && tok(i).kind != Token::End) ++i;
            return i + 1;
        }
        while (!is_punct(i, "{") && !is_punct(i, ";") && tok(i).kind != Token::End) ++i;
        if (!is_punct(i, "{")) return i + 1;
        if (parts.empty()) parts.push_back("(anonymous)");
        // nested shorthand A::B shares a single brace
        for (size_t k = 0; k + 1 < parts.size(); ++k) {
            Frame f;
            f.kind = Frame::Namespace;
            f.name = parts[k];
            f.open_depth = brace_depth_ + 1;
            frames_.push_back(f);
        }
        Frame last;
        last.kind = Frame::Namespace;
        last.name = parts.back();
        push_frame(last);
        return i + 1;
    }

    size_t handle_class(size_t i) {
        ++i;
        while (tok(i).kind == Token::Ident && tok(i).text == "alignas" && is_punct(i + 1, "(")) {
            i = matching_paren_tok(i + 1) + 1;
        }
        if (tok(i).kind != Token::Ident) return i;
        std::string name = tok(i).text;
        ++i;
        if (is_punct(i, "<")) i = skip_angle_brackets(i);
        while (tok(i).kind != Token::End) {
            if (is_punct(i, ";")) return i + 1;  // forward declaration
            if (is_punct(i, "{")) break;
            if (is_punct(i, "(")) return i;  // "struct X(...)": not a class header
            ++i;
        }
        if (tok(i).kind == Token::End) return i;
        Frame f;
        f.kind = Frame::Class;
        f.name = name;
        push_frame(f);
        return i + 1;
    }

    size_t handle_enum(size_t i) {
        ++i;
        if (tok(i).kind == Token::Ident && (tok(i).text == "class" || tok(i).text == "struct")) ++i;
        if (tok(i).kind == Token::Ident) ++i;
        while (tok(i).kind != Token::End && !is_punct(i, "{") && !is_punct(i, ";")) ++i;
        if (is_punct(i, ";")) return i + 1;
        if (tok(i).kind == Token::End) return i;
        Frame f;
        f.kind = Frame::Opaque;
        push_frame(f);
        return i + 1;
    }

    size_t handle_pybind_module(size_t i) {
        if (!is_punct(i + 1, "(")) return i + 1;
        size_t close = matching_paren_tok(i + 1);
        if (close >= toks_.size()) {
            pybind_unbalanced_ = true;
            return toks_.size() - 1;
        }
        std::string module_name, module_var;
        if (tok(i + 2).kind == Token::Ident) module_name = tok(i + 2).text;
        if (is_punct(i + 3, ",") && tok(i + 4).kind == Token::Ident) module_var = tok(i + 4).text;
        size_t body = close + 1;
        if (module_name.empty() || module_var.empty() || !is_punct(body, "{")) {
            out_.diagnostics.warnings.push_back("malformed PYBIND11_MODULE header in " + path_);
            out_.diagnostics.skip("malformed_binding_macro");
            return close + 1;
        }
        Frame f;
        f.kind = Frame::Pybind;
        f.name = module_name;
        f.module_var = module_var;
        push_frame(f);
        return body + 1;
    }

    // "[type] name = rhs [,|;]" at function, module-block, or namespace scope.
    void handle_assignment(size_t i) {
        if (i == 0) return;
        const Token& var = toks_[i - 1];
        if (var.kind != Token::Ident) return;
        if (i >= 2) {
            const Token& before = toks_[i - 2];
            if (before.kind == Token::Punct &&
                (before.text == "." || before.text == "->" || before.text == "::")) {
                return;
            }
        }
        if (!frames_.empty() && frames_.back().kind == Frame::Class && !in_body()) {
            return;  // member default initializers are not tracked
        }
        if (non_callee_keywords().count(var.text) || type_keywords().count(var.text) ||
            var.text == "operator" || var.text == "namespace") {
            return;
        }

        size_t j = i + 1;
        int depth = 0;
        while (tok(j).kind != Token::End) {
            if (is_punct(j, "(") || is_punct(j, "[") || is_punct(j, "{")) ++depth;
            else if (is_punct(j, ")") || is_punct(j, "]") || is_punct(j, "}")) {
                if (depth == 0) break;
                --depth;
            } else if ((is_punct(j, ";") || is_punct(j, ",")) && depth == 0) {
                break;
            }
            ++j;
        }
        // character offsets: a blanked string literal has no tokens at all
        size_t rhs_begin = toks_[i].offset + 1;
        size_t rhs_end = tok(j).offset;
        if (rhs_begin >= rhs_end) return;

        AssignRecord rec;
        rec.unit = path_;
        rec.line = lines_.line_of(var.offset);
        rec.language = Lang::Cpp;
        rec.scope_fqn = assign_scope();
        rec.variable = var.text;
        const MaskedLiteral* lit = single_literal_span(rhs_begin, rhs_end);
        if (lit != nullptr) {
            rec.value_form = ValueForm::StringLiteral;
            rec.literal = lit->value;
        } else {
            rec.value_form = ValueForm::Other;
        }
        out_.assigns.push_back(std::move(rec));
    }

    const MaskedLiteral* single_literal_span(size_t begin, size_t end) const {
        while (begin < end && is_space(src_[begin])) ++begin;
        while (end > begin && is_space(src_[end - 1])) --end;
        if (begin >= end) return nullptr;
        const MaskedLiteral* lit = masked_.literal_spanning(begin, end);
        return (lit != nullptr && lit->plain) ? lit : nullptr;
    }

    size_t handle_identifier(size_t i) {
        const Frame* pybind = innermost(Frame::Pybind);
        if (pybind != nullptr && tok(i).text == pybind->module_var && is_punct(i + 1, ".") &&
            tok(i + 2).kind == Token::Ident && tok(i + 2).text == "def" && is_punct(i + 3, "(")) {
            return handle_binding_defs(i + 3, *pybind);
        }
        if (pybind != nullptr && tok(i).text == "def" && is_punct(i + 1, "(") && i >= 1 &&
            (is_punct(i - 1, ".") || is_punct(i - 1, "->"))) {
            out_.diagnostics.skip("unhandled_binding_construct");
            size_t close = matching_paren_tok(i + 1);
            return close >= toks_.size() ? close : close + 1;
        }
        if (at_decl_scope()) {
            size_t next = try_function_header(i);
            if (next != i) return next;
            return try_call(i, /*decl_scope=*/true);
        }
        if (in_body()) {
            return try_call(i, /*decl_scope=*/false);
        }
        return i + 1;
    }

    // m.def("name", target, ...) possibly chained: m.def(...).def(...)
    size_t handle_binding_defs(size_t open, const Frame& pybind) {
        while (true) {
            size_t close = matching_paren_tok(open);
            if (close >= toks_.size()) {
                pybind_unbalanced_ = true;
                return toks_.size() - 1;
            }
            emit_raw_binding(open, close, pybind);
            size_t next = close + 1;
            if (is_punct(next, ".") && tok(next + 1).kind == Token::Ident &&
                tok(next + 1).text == "def" && is_punct(next + 2, "(")) {
                open = next + 2;
                continue;
            }
            if (is_punct(next, ".")) {
                out_.diagnostics.skip("unhandled_binding_construct");
            }
            return next;
        }
    }

    void emit_raw_binding(size_t open_tok, size_t close_tok, const Frame& pybind) {
        size_t begin = toks_[open_tok].offset + 1;
        size_t end = toks_[close_tok].offset;
        auto spans = split_arg_spans(begin, end, /*angle_aware=*/true);
        RawBinding rb;
        rb.unit = path_;
        rb.line = lines_.line_of(toks_[open_tok].offset);
        rb.module = pybind.name;
        rb.module_var = pybind.module_var;
        if (!spans.empty()) rb.exposed_arg = classify_exposed_arg(spans[0].first, spans[0].second);
        if (spans.size() >= 2) {
            rb.target_arg = classify_target_arg(spans[1].first, spans[1].second, rb.line);
        } else {
            rb.target_arg = plain_arg(ArgForm::Other, "");
        }
        out_.raw_bindings.push_back(std::move(rb));
    }

    std::vector<std::pair<size_t, size_t>> split_arg_spans(size_t begin, size_t end,
                                                           bool angle_aware) const {
        std::vector<std::pair<size_t, size_t>> spans;
        const std::string& text = masked_.text;
        int depth = 0;
        int angle = 0;
        size_t start = begin;
        for (size_t i = begin; i < end && i < text.size(); ++i) {
            char c = text[i];
            if (c == '(' || c == '[' || c == '{') ++depth;
            else if (c == ')' || c == ']' || c == '}') {
                if (depth > 0) --depth;
            } else if (angle_aware && c == '<') {
                ++angle;
            } else if (angle_aware && c == '>' && angle > 0) {
                --angle;
            } else if (c == ',' && depth == 0 && angle == 0) {
                spans.emplace_back(start, i);
                start = i + 1;
            }
        }
        spans.emplace_back(start, end);
        while (!spans.empty() && blank_span(spans.back().first, spans.back().second)) {
            spans.pop_back();
        }
        return spans;
    }

    bool blank_span(size_t begin, size_t end) const {
        const std::string& text = masked_.text;
        for (size_t i = begin; i < end && i < text.size(); ++i) {
            if (!is_space(text[i])) return false;
        }
        return masked_.literal_within(begin, end) == nullptr;
    }

    void trim_span(size_t& begin, size_t& end) const {
        while (begin < end && is_space(src_[begin])) ++begin;
        while (end > begin && is_space(src_[end - 1])) --end;
    }

    std::string source_span(size_t begin, size_t end) const {
        return std::string(src_.substr(begin, std::min(end, src_.size()) - begin));
    }

    std::string masked_span(size_t begin, size_t end) const {
        return masked_.text.substr(begin, end - begin);
    }

    ArgValue classify_exposed_arg(size_t begin, size_t end) const {
        trim_span(begin, end);
        std::string raw = source_span(begin, end);
        const MaskedLiteral* lit = masked_.literal_spanning(begin, end);
        if (lit != nullptr && lit->plain) return string_literal_arg(raw, lit->value);
        std::string view = masked_span(begin, end);
        if (!view.empty() && is_ident_start(view[0]) &&
            std::all_of(view.begin(), view.end(), is_ident_char)) {
            return plain_arg(ArgForm::Identifier, raw);
        }
        if (!view.empty() && view[0] == '[') return plain_arg(ArgForm::Lambda, raw);
        return plain_arg(ArgForm::Other, raw);
    }

    ArgValue classify_target_arg(size_t begin, size_t end, int def_line) {
        trim_span(begin, end);
        std::string raw = source_span(begin, end);
        std::string view = masked_span(begin, end);
        std::string stripped = strip_cast_wrapper(view);
        std::string stripped_raw = stripped == view ? trim(raw) : strip_cast_wrapper(raw);
        if (!stripped.empty() && stripped[0] == '[') {
            emit_anonymous_def(def_line);
            return plain_arg(ArgForm::Lambda, stripped_raw);
        }
        if (!stripped.empty() && (stripped[0] == '&' || is_ident_start(stripped[0]))) {
            std::string body = stripped[0] == '&' ? trim(stripped.substr(1)) : stripped;
            if (is_qualified_identifier(body)) {
                return plain_arg(ArgForm::FunctionRef, stripped_raw);
            }
        }
        return plain_arg(ArgForm::Other, raw);
    }

    static bool is_qualified_identifier(const std::string& s) {
        if (s.empty()) return false;
        size_t i = 0;
        while (i < s.size()) {
            if (!is_ident_start(s[i])) return false;
            while (i < s.size() && is_ident_char(s[i])) ++i;
            if (i == s.size()) return true;
            if (s.compare(i, 2, "::") == 0) {
                i += 2;
                continue;
            }
            return false;
        }
        return false;
    }

    static std::string strip_cast_wrapper(const std::string& s) {
        std::string t = trim(s);
        size_t angle = t.find('<');
        if (angle == std::string::npos) return t;
        std::string head = t.substr(0, angle);
        if (head.find("cast") == std::string::npos) return t;
        int depth = 0;
        size_t i = angle;
        for (; i < t.size(); ++i) {
            if (t[i] == '<') ++depth;
            else if (t[i] == '>') {
                if (--depth == 0) break;
            }
        }
        if (i >= t.size()) return t;
        size_t open = t.find('(', i);
        if (open == std::string::npos) return t;
        int pdepth = 0;
        size_t close = open;
        for (; close < t.size(); ++close) {
            if (t[close] == '(') ++pdepth;
            else if (t[close] == ')') {
                if (--pdepth == 0) break;
            }
        }
        if (close >= t.size()) return t;
        return trim(t.substr(open + 1, close - open - 1));
    }

    void emit_anonymous_def(int line) {
        FunctionDef def;
        def.unit = path_;
        def.line = line;
        def.language = Lang::Cpp;
        def.scope = scope_names();
        def.name = anonymous_name(++anon_counter_);
        def.has_body = true;
        def.is_anonymous = true;
        out_.defs.push_back(std::move(def));
    }

    // ---------------- function headers ----------------

    // Returns the index to continue from, or `i` unchanged when the tokens do
    // not form a function declaration/definition.
    size_t try_function_header(size_t i) {
        const size_t start = i;
        std::string name;
        std::vector<std::string> qualifiers;

        bool tilde = false;
        if (is_punct(i, "~")) {
            tilde = true;
            ++i;
        }
        while (tok(i).kind == Token::Ident) {
            std::string part = tok(i).text;
            if (part == "operator") {
                std::string op = "operator";
                ++i;
                while (tok(i).kind != Token::End && !is_punct(i, "(") && !is_punct(i, ";")) {
                    op += tok(i).text;
                    ++i;
                }
                name = op;
                break;
            }
            size_t after = i + 1;
            if (is_punct(after, "<")) {
                size_t closed = skip_angle_brackets(after);
                if (closed < toks_.size() && is_punct(closed, "::")) after = closed;
            }
            if (is_punct(after, "::") && (tok(after + 1).kind == Token::Ident ||
                                          is_punct(after + 1, "~"))) {
                qualifiers.push_back(part);
                i = after + 1;
                if (is_punct(i, "~")) {
                    tilde = true;
                    ++i;
                }
                continue;
            }
            name = part;
            ++i;
            break;
        }
        if (name.empty()) return start;
        if (tilde) name = "~" + name;
        if (!is_punct(i, "(")) return start;
        if (non_callee_keywords().count(name) || type_keywords().count(name)) return start;

        bool type_ish = false;
        bool boundary = start == 0;
        if (start > 0) {
            const Token& prev = toks_[start - 1];
            if (prev.kind == Token::Ident) {
                type_ish = control_keywords().count(prev.text) == 0;
            } else if (prev.kind == Token::Punct) {
                const std::string& p = prev.text;
                type_ish = p == ">" || p == "*" || p == "&" || p == "&&" || p == "]";
                boundary = p == ";" || p == "{" || p == "}" || p == ":";
            }
        }
        std::string plain = tilde ? name.substr(1) : name;
        bool ctor_like = plain == enclosing_class() ||
                         (!qualifiers.empty() && qualifiers.back() == plain);
        if (!(type_ish || (boundary && ctor_like))) return start;

        size_t close = matching_paren_tok(i);
        if (close >= toks_.size()) return start;

        // Disambiguate "T x(3);" variable initialization from declarations:
        // parameter lists start with a type-ish token or are empty.
        if (!ctor_like) {
            const Token& first_arg = tok(i + 1);
            if (first_arg.kind == Token::Number) return start;
            if (first_arg.kind == Token::Punct && first_arg.text != ")" && first_arg.text != "*" &&
                first_arg.text != "&") {
                return start;
            }
        }

        size_t j = close + 1;
        while (tok(j).kind != Token::End) {
            const Token& t = tok(j);
            if (declaration_tail_tokens().count(t.text)) {
                ++j;
                continue;
            }
            if (t.kind == Token::Ident && t.text == "throw" && is_punct(j + 1, "(")) {
                j = matching_paren_tok(j + 1) + 1;
                continue;
            }
            if (t.kind == Token::Punct && t.text == "->") {
                ++j;
                while (tok(j).kind != Token::End && !is_punct(j, "{") && !is_punct(j, ";") &&
                       !is_punct(j, "=")) {
                    if (is_punct(j, "<")) {
                        j = skip_angle_brackets(j);
                        continue;
                    }
                    ++j;
                }
                continue;
            }
            break;
        }

        if (is_punct(j, ";")) {
            emit_function(name, qualifiers, toks_[start].offset, /*has_body=*/false);
            return j + 1;
        }
        if (is_punct(j, "{")) {
            emit_function(name, qualifiers, toks_[start].offset, /*has_body=*/true);
            push_function_frame(name, qualifiers);
            return j + 1;
        }
        if (is_punct(j, "=")) {
            const Token& next = tok(j + 1);
            if (next.kind == Token::Ident && (next.text == "default" || next.text == "delete")) {
                emit_function(name, qualifiers, toks_[start].offset, /*has_body=*/true);
                return j + 2;
            }
            if (next.kind == Token::Number && next.text == "0") {
                emit_function(name, qualifiers, toks_[start].offset, /*has_body=*/false);
                return j + 2;
            }
            return start;
        }
        if (is_punct(j, ":")) {
            // constructor initializer list: find the body brace
            ++j;
            int paren = 0;
            while (tok(j).kind != Token::End) {
                if (is_punct(j, "(")) ++paren;
                else if (is_punct(j, ")")) --paren;
                else if (is_punct(j, "{") && paren == 0) {
                    if (j > 0 && toks_[j - 1].kind == Token::Ident) {
                        // brace member initializer m{...}: skip it
                        int b = 0;
                        while (tok(j).kind != Token::End) {
                            if (is_punct(j, "{")) ++b;
                            else if (is_punct(j, "}")) {
                                if (--b == 0) {
                                    ++j;
                                    break;
                                }
                            }
                            ++j;
                        }
                        continue;
                    }
                    emit_function(name, qualifiers, toks_[start].offset, /*has_body=*/true);
                    push_function_frame(name, qualifiers);
                    return j + 1;
                } else if (is_punct(j, ";") && paren <= 0) {
                    return j + 1;
                }
                ++j;
            }
            return j;
        }
        return start;
    }

    void emit_function(const std::string& name, const std::vector<std::string>& qualifiers,
                       size_t offset, bool has_body) {
        FunctionDef def;
        def.unit = path_;
        def.line = lines_.line_of(offset);
        def.language = Lang::Cpp;
        def.scope = scope_names();
        def.scope.insert(def.scope.end(), qualifiers.begin(), qualifiers.end());
        def.name = name;
        def.has_body = has_body;
        def.is_anonymous = false;
        out_.defs.push_back(std::move(def));
    }

    void push_function_frame(const std::string& name, const std::vector<std::string>& qualifiers) {
        Frame f;
        f.kind = Frame::Function;
        std::vector<std::string> scope = scope_names();
        scope.insert(scope.end(), qualifiers.begin(), qualifiers.end());
        f.fqn = make_fqn(path_, scope, name);
        push_frame(f);
    }

    // ---------------- calls ----------------

    size_t try_call(size_t i, bool decl_scope) {
        const Frame* pybind = innermost(Frame::Pybind);
        // receiver chains on an expression result are not tracked
        if (i > 0 && toks_[i - 1].kind == Token::Punct &&
            (toks_[i - 1].text == "." || toks_[i - 1].text == "->")) {
            return i + 1;
        }

        std::string chain = tok(i).text;
        size_t j = i + 1;
        while (tok(j).kind == Token::Punct &&
               (tok(j).text == "." || tok(j).text == "->" || tok(j).text == "::") &&
               tok(j + 1).kind == Token::Ident) {
            chain += tok(j).text;
            chain += tok(j + 1).text;
            j += 2;
        }
        if (!is_punct(j, "(")) return std::max(j, i + 1);
        std::string head = tok(i).text;
        if (non_callee_keywords().count(head) || type_keywords().count(head)) return j;
        std::string last = chain;
        size_t sep = chain.find_last_of(">:.");
        if (sep != std::string::npos) last = chain.substr(sep + 1);
        if (non_callee_keywords().count(last)) return j;
        if (pybind != nullptr && last == "def") {
            // .def through a receiver other than the module variable
            out_.diagnostics.skip("unhandled_binding_construct");
            return j;
        }

        if (i > 0) {
            const Token& prev = toks_[i - 1];
            if (prev.kind == Token::Ident && control_keywords().count(prev.text) == 0) {
                return i + 1;  // declaration: "T f(...)"
            }
            if (prev.kind == Token::Punct &&
                (prev.text == ">" || prev.text == "*" || prev.text == "&" || prev.text == "&&")) {
                return i + 1;
            }
            if (decl_scope && prev.kind == Token::Punct && prev.text != "=" && prev.text != "," &&
                prev.text != "(") {
                return i + 1;
            }
        } else if (decl_scope) {
            return i + 1;
        }

        size_t close = matching_paren_tok(j);
        if (close >= toks_.size()) return j;

        CallSite call;
        call.unit = path_;
        call.line = lines_.line_of(toks_[i].offset);
        call.language = Lang::Cpp;
        call.caller_fqn = caller_fqn();
        call.callee_expr = chain;
        size_t begin = toks_[j].offset + 1;
        size_t end = toks_[close].offset;
        for (const auto& [s, e] : split_arg_spans(begin, end, /*angle_aware=*/false)) {
            call.args.push_back(classify_call_arg(s, e));
        }
        out_.calls.push_back(std::move(call));
        return j;  // the scan continues into the argument list
    }

    ArgValue classify_call_arg(size_t begin, size_t end) const {
        trim_span(begin, end);
        std::string raw = source_span(begin, end);
        const MaskedLiteral* lit = masked_.literal_spanning(begin, end);
        if (lit != nullptr && lit->plain) return string_literal_arg(raw, lit->value);
        std::string view = masked_span(begin, end);
        if (!view.empty() && view[0] == '[') return plain_arg(ArgForm::Lambda, raw);
        if (!view.empty() && view[0] == '&') {
            std::string body = trim(view.substr(1));
            if (is_qualified_identifier(body)) return plain_arg(ArgForm::FunctionRef, raw);
        }
        if (!view.empty() && is_ident_start(view[0]) &&
            std::all_of(view.begin(), view.end(), is_ident_char) &&
            non_callee_keywords().count(view) == 0 && type_keywords().count(view) == 0) {
            return plain_arg(ArgForm::Identifier, raw);
        }
        return plain_arg(ArgForm::Other, raw);
    }
};

}  // namespace

CppExtraction parse_cpp_unit(std::string_view source, const std::string& path) {
    if (!is_valid_utf8(source)) {
        CppExtraction out;
        out.diagnostics.warnings.push_back("skipping " + path + ": not valid UTF-8");
        out.diagnostics.skip("undecodable_unit");
        return out;
    }
    return CppParser(source, path).run();
}

}  // namespace polycall
