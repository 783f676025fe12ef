#include "polycall/python_extractor.hpp"

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

bool is_identifier(const std::string& s) {
    return !s.empty() && is_ident_start(s[0]) && std::all_of(s.begin(), s.end(), is_ident_char);
}

const std::set<std::string>& keyword_set() {
    static const std::set<std::string> kw = {
        "if", "elif", "while", "for", "return", "yield", "assert", "del",
        "not", "and", "or", "in", "is", "lambda", "with", "except", "raise",
        "def", "class", "import", "from", "as", "pass", "break", "continue",
        "global", "nonlocal", "else", "finally", "try", "await", "async",
        "None", "True", "False", "match", "case",
    };
    return kw;
}

struct LogicalLine {
    size_t begin = 0;  // offsets into the masked buffer
    size_t end = 0;
    int line = 0;  // 1-based first physical line
    int indent = 0;
};

struct ScopeFrame {
    int indent = 0;
    std::string name;
    bool is_function = false;
};

class PythonParser {
public:
    PythonParser(std::string_view source, const std::string& path)
        : src_(source), path_(path), masked_(mask_python_source(source)), lines_(source) {
        for (const auto& w : masked_.warnings) out_.diagnostics.warnings.push_back(w);
    }

    PythonExtraction run() {
        split_logical_lines();
        for (const auto& ll : logical_) parse_line(ll);
        return std::move(out_);
    }

private:
    std::string_view src_;
    const std::string& path_;
    MaskedSource masked_;
    LineIndex lines_;
    std::vector<LogicalLine> logical_;
    std::vector<ScopeFrame> scopes_;
    PythonExtraction out_;
    std::set<std::string> seen_defs_;
    int anon_counter_ = 0;

    const std::string& masked() const { return masked_.text; }

    static bool opens(char c) { return c == '(' || c == '[' || c == '{'; }
    static bool closes(char c) { return c == ')' || c == ']' || c == '}'; }

    void split_logical_lines() {
        const std::string& text = masked();
        const size_t n = text.size();
        size_t i = 0;
        while (i < n) {
            size_t start = i;
            int depth = 0;
            size_t j = i;
            while (j < n) {
                char c = text[j];
                if (opens(c)) ++depth;
                else if (closes(c) && depth > 0) --depth;
                else if (c == '\n') {
                    bool continued = j > start && text[j - 1] == '\\';
                    if (depth == 0 && !continued) break;
                }
                ++j;
            }
            // ';' separates statements; segments share the line's indent
            int indent = indent_of(start);
            size_t seg_begin = start;
            int seg_depth = 0;
            for (size_t k = start; k <= j; ++k) {
                bool at_end = k == j;
                char c = at_end ? ';' : text[k];
                if (!at_end) {
                    if (opens(c)) ++seg_depth;
                    else if (closes(c) && seg_depth > 0) --seg_depth;
                }
                if (c != ';' || seg_depth != 0) continue;
                if (!blank_span(seg_begin, k)) {
                    LogicalLine ll;
                    ll.begin = seg_begin;
                    ll.end = k;
                    ll.line = lines_.line_of(seg_begin);
                    ll.indent = indent;
                    logical_.push_back(ll);
                }
                seg_begin = k + 1;
            }
            if (j >= n && depth > 0) {
                out_.diagnostics.warnings.push_back("unbalanced brackets in " + path_ +
                                                    " near line " + std::to_string(
                                                        lines_.line_of(start)) +
                                                    "; recovering at end of file");
                out_.diagnostics.skip("unbalanced_brackets");
            }
            i = j + 1;
        }
    }

    int indent_of(size_t offset) const {
        int col = 0;
        const std::string& text = masked();
        for (size_t i = offset; i < text.size(); ++i) {
            if (text[i] == ' ') ++col;
            else if (text[i] == '\t') col += 8 - (col % 8);
            else break;
        }
        return col;
    }

    // True when the span holds no token and no masked-away literal.
    bool blank_span(size_t begin, size_t end) const {
        const std::string& text = masked();
        for (size_t i = begin; i < end; ++i) {
            if (!is_space(text[i]) && text[i] != '\\') return false;
        }
        return masked_.literal_within(begin, end) == nullptr;
    }

    // Trims [begin, end) against the original buffer, where spaces are real.
    void trim_span(size_t& begin, size_t& end) const {
        while (begin < end && is_space(src_[begin])) ++begin;
        while (end > begin && is_space(src_[end - 1])) --end;
    }

    std::string masked_span(size_t begin, size_t end) const {
        return masked().substr(begin, end - begin);
    }

    std::string source_span(size_t begin, size_t end) const {
        return std::string(src_.substr(begin, end - begin));
    }

    void pop_to_indent(int indent) {
        while (!scopes_.empty() && indent <= scopes_.back().indent) scopes_.pop_back();
    }

    std::vector<std::string> scope_names() const {
        std::vector<std::string> names;
        names.reserve(scopes_.size());
        for (const auto& s : scopes_) names.push_back(s.name);
        return names;
    }

    // Fqn of the innermost enclosing function, or <module>.
    std::string enclosing_caller() const {
        for (size_t i = scopes_.size(); i-- > 0;) {
            if (!scopes_[i].is_function) continue;
            std::vector<std::string> enclosing;
            for (size_t k = 0; k < i; ++k) enclosing.push_back(scopes_[k].name);
            return make_fqn(path_, enclosing, scopes_[i].name);
        }
        return kModuleScope;
    }

    void parse_line(const LogicalLine& ll) {
        pop_to_indent(ll.indent);
        size_t begin = ll.begin;
        size_t end = ll.end;
        trim_span(begin, end);
        std::string stmt = masked_span(begin, end);
        if (stmt.empty()) {
            // pure literal statement (docstring); nothing to extract
            return;
        }

        if (stmt.rfind("import ", 0) == 0) {
            parse_import(stmt, ll.line);
            return;
        }
        if (stmt.rfind("from ", 0) == 0) {
            parse_from_import(stmt, ll.line);
            return;
        }
        if (stmt[0] == '@') {
            parse_decorator(ll, begin, end);
            return;
        }
        bool is_async_def = stmt.rfind("async def ", 0) == 0;
        if (stmt.rfind("def ", 0) == 0 || is_async_def) {
            parse_def(ll, begin, end, stmt, is_async_def);
            return;
        }
        if (stmt.rfind("class ", 0) == 0) {
            std::string name = read_name(stmt, 6);
            if (!name.empty()) {
                scopes_.push_back({ll.indent, name, false});
            } else {
                out_.diagnostics.skip("malformed_class");
            }
            return;
        }

        parse_assignment(ll, begin, end);
        scan_expressions(begin, end, enclosing_caller(), ll);
    }

    static std::string read_name(const std::string& stmt, size_t pos) {
        while (pos < stmt.size() && is_space(stmt[pos])) ++pos;
        size_t start = pos;
        while (pos < stmt.size() && is_ident_char(stmt[pos])) ++pos;
        if (pos == start || !is_ident_start(stmt[start])) return "";
        return stmt.substr(start, pos - start);
    }

    void parse_import(const std::string& stmt, int line) {
        for (const std::string& item : split_top_level(stmt.substr(7))) {
            std::string name = item;
            std::string alias;
            size_t as_pos = find_word(item, "as");
            if (as_pos != std::string::npos) {
                name = trim(item.substr(0, as_pos));
                alias = trim(item.substr(as_pos + 2));
            } else {
                name = trim(name);
                alias = name;
            }
            if (name.empty()) continue;
            ImportRecord rec;
            rec.unit = path_;
            rec.line = line;
            rec.imported_name = name;
            rec.alias = alias;
            rec.mechanism = ImportMechanism::Standard;
            out_.imports.push_back(std::move(rec));
        }
    }

    void parse_from_import(const std::string& stmt, int line) {
        size_t import_pos = find_word(stmt, "import");
        if (import_pos == std::string::npos) {
            out_.diagnostics.skip("malformed_import");
            return;
        }
        std::string module = trim(stmt.substr(5, import_pos - 5));
        std::string members = trim(stmt.substr(import_pos + 6));
        if (module.empty() || members.empty()) {
            out_.diagnostics.skip("malformed_import");
            return;
        }
        if (members == "*") {
            out_.diagnostics.skip("star_import");
            return;
        }
        if (members.front() == '(') {
            members = trim(members.substr(1, members.size() - (members.back() == ')' ? 2 : 1)));
        }
        for (const std::string& item : split_top_level(members)) {
            std::string member = item;
            std::string alias;
            size_t as_pos = find_word(item, "as");
            if (as_pos != std::string::npos) {
                member = trim(item.substr(0, as_pos));
                alias = trim(item.substr(as_pos + 2));
            } else {
                member = trim(member);
                alias = member;
            }
            if (member.empty()) continue;
            ImportRecord rec;
            rec.unit = path_;
            rec.line = line;
            rec.imported_name = module;
            rec.alias = alias;
            rec.member = member;
            rec.mechanism = ImportMechanism::Standard;
            out_.imports.push_back(std::move(rec));
        }
    }

    void parse_decorator(const LogicalLine& ll, size_t begin, size_t end) {
        const std::string& text = masked();
        size_t i = begin + 1;  // past '@'
        while (i < end && is_space(text[i])) ++i;
        size_t name_begin = i;
        while (i < end && (is_ident_char(text[i]) || text[i] == '.')) ++i;
        size_t probe = i;
        while (probe < end && is_space(text[probe])) ++probe;
        if (probe < end && text[probe] == '(') {
            scan_expressions(name_begin, end, enclosing_caller(), ll);
            return;
        }
        if (i > name_begin) {
            CallSite call;
            call.unit = path_;
            call.line = ll.line;
            call.language = Lang::Python;
            call.caller_fqn = enclosing_caller();
            call.callee_expr = text.substr(name_begin, i - name_begin);
            out_.calls.push_back(std::move(call));
        }
    }

    void parse_def(const LogicalLine& ll, size_t begin, size_t end, const std::string& stmt,
                   bool is_async) {
        std::string name = read_name(stmt, is_async ? 10 : 4);
        if (name.empty()) {
            out_.diagnostics.skip("malformed_def");
            return;
        }
        FunctionDef def;
        def.unit = path_;
        def.line = ll.line;
        def.language = Lang::Python;
        def.scope = scope_names();
        def.name = name;
        def.has_body = true;
        def.is_anonymous = false;
        // redefinitions keep the first record so (scope, name) stays unique
        if (!seen_defs_.insert(join_scope(def.scope) + "\x1f" + name).second) {
            out_.diagnostics.skip("redefinition");
        } else {
            out_.defs.push_back(def);
        }

        const std::string& text = masked();
        size_t open = begin;
        while (open < end && text[open] != '(') ++open;
        size_t close = open < end ? matching_paren(open, end) : std::string::npos;
        // Default-argument expressions evaluate in the enclosing scope.
        if (close != std::string::npos) {
            scan_expressions(open, close + 1, enclosing_caller(), ll);
        }
        std::string def_fqn = make_fqn(path_, scope_names(), name);
        scopes_.push_back({ll.indent, name, true});
        if (close != std::string::npos && close + 1 < end) {
            // single-line body after the colon belongs to the new function
            size_t body = close + 1;
            while (body < end && text[body] != ':') ++body;
            if (body + 1 < end) scan_expressions(body + 1, end, def_fqn, ll);
        }
    }

    void parse_assignment(const LogicalLine& ll, size_t begin, size_t end) {
        const std::string& text = masked();
        int depth = 0;
        size_t eq = std::string::npos;
        bool augmented = false;
        for (size_t i = begin; i < end; ++i) {
            char c = text[i];
            if (opens(c)) ++depth;
            else if (closes(c)) --depth;
            else if (c == '=' && depth == 0) {
                char prev = i > begin ? text[i - 1] : ' ';
                char next = i + 1 < end ? text[i + 1] : ' ';
                if (next == '=') {
                    ++i;
                    continue;
                }
                if (prev == '=' || prev == '!' || prev == '<' || prev == '>' || prev == ':') {
                    continue;
                }
                augmented = std::string("+-*/%&|^@").find(prev) != std::string::npos;
                eq = i;
                break;
            }
        }
        if (eq == std::string::npos) return;

        size_t lhs_begin = begin;
        size_t lhs_end = augmented ? eq - 1 : eq;
        trim_span(lhs_begin, lhs_end);
        std::string lhs = masked_span(lhs_begin, lhs_end);
        size_t colon = lhs.find(':');
        if (colon != std::string::npos) lhs = trim(lhs.substr(0, colon));
        if (!is_identifier(lhs)) {
            out_.diagnostics.skip("complex_assignment");
            return;
        }
        if (keyword_set().count(lhs)) return;

        AssignRecord rec;
        rec.unit = path_;
        rec.line = ll.line;
        rec.language = Lang::Python;
        rec.scope_fqn = enclosing_caller();
        rec.variable = lhs;
        const MaskedLiteral* lit = augmented ? nullptr : single_literal_span(eq + 1, end);
        if (lit != nullptr) {
            rec.value_form = ValueForm::StringLiteral;
            rec.literal = lit->value;
        } else {
            rec.value_form = ValueForm::Other;
        }
        out_.assigns.push_back(std::move(rec));
    }

    // The span consists of exactly one plain string literal (and whitespace).
    const MaskedLiteral* single_literal_span(size_t begin, size_t end) const {
        trim_span(begin, end);
        if (begin >= end) return nullptr;
        const MaskedLiteral* lit = masked_.literal_spanning(begin, end);
        return (lit != nullptr && lit->plain) ? lit : nullptr;
    }

    // Scans [begin, end) for calls and lambdas; nested calls are found by
    // continuing the scan inside argument lists.
    void scan_expressions(size_t begin, size_t end, const std::string& caller,
                          const LogicalLine& ll) {
        const std::string& text = masked();
        size_t i = begin;
        while (i < end) {
            char c = text[i];
            if (!is_ident_start(c) || (i > 0 && is_ident_char(text[i - 1]))) {
                ++i;
                continue;
            }
            size_t chain_begin = i;
            size_t j = i;
            std::string chain;
            while (j < end) {
                size_t part_begin = j;
                while (j < end && is_ident_char(text[j])) ++j;
                chain.append(text, part_begin, j - part_begin);
                size_t probe = j;
                while (probe < end && is_space(text[probe])) ++probe;
                if (probe < end && text[probe] == '.') {
                    size_t after = probe + 1;
                    while (after < end && is_space(text[after])) ++after;
                    if (after < end && is_ident_start(text[after])) {
                        chain += '.';
                        j = after;
                        continue;
                    }
                }
                break;
            }
            std::string head = chain.substr(0, chain.find('.'));
            if (head == "lambda") {
                emit_lambda(chain_begin);
                i = chain_begin + 6;
                continue;
            }
            size_t probe = j;
            while (probe < end && is_space(text[probe])) ++probe;
            if (probe >= end || text[probe] != '(' || keyword_set().count(head) != 0 ||
                chain.empty()) {
                i = std::max(j, i + 1);
                continue;
            }
            if (preceded_by_dot(chain_begin)) {
                out_.diagnostics.skip("chained_call");
                i = probe + 1;
                continue;
            }
            size_t close = matching_paren(probe, end);
            if (close == std::string::npos) {
                out_.diagnostics.warnings.push_back(
                    "unbalanced call near " + path_ + ":" +
                    std::to_string(lines_.line_of(chain_begin)) + "; skipping");
                out_.diagnostics.skip("unbalanced_brackets");
                i = probe + 1;
                continue;
            }
            emit_call(ll, caller, chain, chain_begin, probe, close);
            i = probe + 1;  // keep scanning inside the argument list
        }
    }

    bool preceded_by_dot(size_t offset) const {
        const std::string& text = masked();
        size_t i = offset;
        while (i > 0 && is_space(text[i - 1])) --i;
        return i > 0 && text[i - 1] == '.';
    }

    size_t matching_paren(size_t open, size_t end) const {
        const std::string& text = masked();
        int depth = 0;
        for (size_t i = open; i < end; ++i) {
            if (opens(text[i])) ++depth;
            else if (closes(text[i])) {
                --depth;
                if (depth == 0) return i;
            }
        }
        return std::string::npos;
    }

    void emit_lambda(size_t offset) {
        FunctionDef def;
        def.unit = path_;
        def.line = lines_.line_of(offset);
        def.language = Lang::Python;
        def.scope = scope_names();
        def.name = anonymous_name(++anon_counter_);
        def.has_body = true;
        def.is_anonymous = true;
        out_.defs.push_back(std::move(def));
    }

    void emit_call(const LogicalLine& ll, const std::string& caller, const std::string& chain,
                   size_t chain_begin, size_t open, size_t close) {
        CallSite call;
        call.unit = path_;
        call.line = lines_.line_of(chain_begin);
        call.language = Lang::Python;
        call.caller_fqn = caller;
        call.callee_expr = chain;
        call.args = parse_args(open + 1, close);
        maybe_dynamic_import(call, ll);
        out_.calls.push_back(std::move(call));
    }

    std::vector<ArgValue> parse_args(size_t begin, size_t end) {
        std::vector<ArgValue> args;
        for (const auto& [s, e] : split_arg_spans(begin, end)) {
            args.push_back(classify_arg(s, e));
        }
        return args;
    }

    std::vector<std::pair<size_t, size_t>> split_arg_spans(size_t begin, size_t end) const {
        std::vector<std::pair<size_t, size_t>> spans;
        const std::string& text = masked();
        int depth = 0;
        size_t start = begin;
        for (size_t i = begin; i < end; ++i) {
            char c = text[i];
            if (opens(c)) ++depth;
            else if (closes(c)) --depth;
            else if (c == ',' && depth == 0) {
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

    ArgValue classify_arg(size_t begin, size_t end) const {
        trim_span(begin, end);
        std::string raw = source_span(begin, end);
        const MaskedLiteral* lit = masked_.literal_spanning(begin, end);
        if (lit != nullptr && lit->plain) return string_literal_arg(raw, lit->value);
        std::string view = masked_span(begin, end);
        if (view.rfind("lambda", 0) == 0 && (view.size() == 6 || !is_ident_char(view[6]))) {
            return plain_arg(ArgForm::Lambda, raw);
        }
        if (is_identifier(view) && keyword_set().count(view) == 0) {
            return plain_arg(ArgForm::Identifier, raw);
        }
        return plain_arg(ArgForm::Other, raw);
    }

    void maybe_dynamic_import(const CallSite& call, const LogicalLine& ll) {
        if (call.callee_expr != "__import__" && call.callee_expr != "importlib.import_module") {
            return;
        }
        if (call.args.empty() || call.args[0].form != ArgForm::StringLiteral) {
            out_.diagnostics.skip("dynamic_import_nonliteral");
            return;
        }
        ImportRecord rec;
        rec.unit = path_;
        rec.line = call.line;
        rec.imported_name = call.args[0].literal;
        rec.mechanism = ImportMechanism::Dynamic;
        rec.alias = assigned_target(ll);
        if (rec.alias.empty()) rec.alias = rec.imported_name;
        out_.imports.push_back(std::move(rec));
    }

    // For "name = <dynamic import call>" the alias is the assigned name.
    std::string assigned_target(const LogicalLine& ll) const {
        const std::string& text = masked();
        int depth = 0;
        for (size_t i = ll.begin; i < ll.end; ++i) {
            char c = text[i];
            if (opens(c)) ++depth;
            else if (closes(c)) --depth;
            else if (c == '=' && depth == 0) {
                char next = i + 1 < ll.end ? text[i + 1] : ' ';
                char prev = i > ll.begin ? text[i - 1] : ' ';
                if (next == '=' || prev == '=' || prev == '!' || prev == '<' || prev == '>' ||
                    prev == ':') {
                    continue;
                }
                size_t b = ll.begin, e = i;
                trim_span(b, e);
                std::string lhs = masked_span(b, e);
                return is_identifier(lhs) ? lhs : "";
            }
        }
        return "";
    }

    static std::string trim(const std::string& s) {
        size_t b = 0, e = s.size();
        while (b < e && is_space(s[b])) ++b;
        while (e > b && is_space(s[e - 1])) --e;
        return s.substr(b, e - b);
    }

    static std::vector<std::string> split_top_level(const std::string& s) {
        std::vector<std::string> out;
        int depth = 0;
        std::string cur;
        for (char c : s) {
            if (c == '(' || c == '[') ++depth;
            else if (c == ')' || c == ']') --depth;
            if (c == ',' && depth == 0) {
                out.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!trim(cur).empty()) out.push_back(cur);
        return out;
    }

    // Position of `word` surrounded by whitespace, npos otherwise.
    static size_t find_word(const std::string& s, const std::string& word) {
        size_t pos = 0;
        while ((pos = s.find(word, pos)) != std::string::npos) {
            bool left_ok = pos == 0 || is_space(s[pos - 1]);
            size_t after = pos + word.size();
            bool right_ok = after >= s.size() || is_space(s[after]);
            if (left_ok && right_ok) return pos;
            pos = after;
        }
        return std::string::npos;
    }
};

}  // namespace

PythonExtraction parse_python_unit(std::string_view source, const std::string& path) {
    if (!is_valid_utf8(source)) {
        PythonExtraction out;
        out.diagnostics.warnings.push_back("skipping " + path + ": not valid UTF-8");
        out.diagnostics.skip("undecodable_unit");
        return out;
    }
    return PythonParser(source, path).run();
}

}  // namespace polycall
