#include "polycall/masking.hpp"

#include <algorithm>
#include <cctype>

namespace polycall {

namespace {

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

char unescape_char(char c) {
    switch (c) {
        case 'n': return '\n';
        case 't': return '\t';
        case 'r': return '\r';
        case '0': return '\0';
        case '\\': return '\\';
        case '\'': return '\'';
        case '"': return '"';
        default: return c;
    }
}

void blank_range(std::string& buf, size_t from, size_t to) {
    for (size_t i = from; i < to && i < buf.size(); ++i) {
        if (buf[i] != '\n') buf[i] = ' ';
    }
}

int line_of_offset(std::string_view src, size_t offset) {
    return 1 + static_cast<int>(std::count(src.begin(), src.begin() + std::min(offset, src.size()),
                                           '\n'));
}

}  // namespace

const MaskedLiteral* MaskedSource::literal_spanning(size_t begin, size_t end) const {
    auto it = std::lower_bound(literals.begin(), literals.end(), begin,
                               [](const MaskedLiteral& lit, size_t b) { return lit.begin < b; });
    if (it != literals.end() && it->begin == begin && it->end == end) return &*it;
    return nullptr;
}

const MaskedLiteral* MaskedSource::literal_within(size_t begin, size_t end) const {
    auto it = std::lower_bound(literals.begin(), literals.end(), begin,
                               [](const MaskedLiteral& lit, size_t b) { return lit.begin < b; });
    if (it != literals.end() && it->begin >= begin && it->begin < end) return &*it;
    return nullptr;
}

MaskedSource mask_python_source(std::string_view src) {
    MaskedSource m;
    m.text.assign(src.begin(), src.end());
    const size_t n = src.size();
    size_t i = 0;
    while (i < n) {
        char c = src[i];
        if (c == '#') {
            size_t j = i;
            while (j < n && src[j] != '\n') ++j;
            blank_range(m.text, i, j);
            i = j;
            continue;
        }
        if (c != '\'' && c != '"') {
            ++i;
            continue;
        }
        // Pull back over a possible literal prefix (r, b, f, u combinations).
        size_t prefix_begin = i;
        while (prefix_begin > 0 && is_ident_char(src[prefix_begin - 1])) --prefix_begin;
        std::string prefix;
        for (size_t k = prefix_begin; k < i; ++k) {
            prefix += static_cast<char>(std::tolower(static_cast<unsigned char>(src[k])));
        }
        bool prefix_valid = prefix.size() <= 2 &&
                            prefix.find_first_not_of("rbfu") == std::string::npos;
        if (!prefix_valid) prefix.clear();
        size_t lit_begin = prefix_valid && !prefix.empty() ? prefix_begin : i;
        bool raw = prefix.find('r') != std::string::npos;
        bool plain = prefix.find('f') == std::string::npos &&
                     prefix.find('b') == std::string::npos;

        char quote = c;
        bool triple = i + 2 < n && src[i + 1] == quote && src[i + 2] == quote;
        size_t j = i + (triple ? 3 : 1);
        std::string value;
        bool closed = false;
        while (j < n) {
            if (!triple && src[j] == '\n') break;
            if (src[j] == '\\' && j + 1 < n) {
                if (raw) {
                    value += '\\';
                    value += src[j + 1];
                } else {
                    value += unescape_char(src[j + 1]);
                }
                j += 2;
                continue;
            }
            if (src[j] == quote) {
                if (!triple) {
                    closed = true;
                    j += 1;
                    break;
                }
                if (j + 2 < n && src[j + 1] == quote && src[j + 2] == quote) {
                    closed = true;
                    j += 3;
                    break;
                }
            }
            value += src[j];
            ++j;
        }
        if (!closed && triple && j >= n) {
            m.warnings.push_back("unterminated triple-quoted string starting at line " +
                                 std::to_string(line_of_offset(src, i)));
            plain = false;
        } else if (!closed) {
            m.warnings.push_back("unterminated string literal at line " +
                                 std::to_string(line_of_offset(src, i)));
            plain = false;
        }
        size_t lit_end = j;
        blank_range(m.text, lit_begin, lit_end);
        m.literals.push_back({lit_begin, lit_end, value, plain});
        i = lit_end;
    }
    return m;
}

MaskedSource mask_cpp_source(std::string_view src) {
    MaskedSource m;
    m.text.assign(src.begin(), src.end());
    const size_t n = src.size();
    size_t i = 0;
    while (i < n) {
        char c = src[i];
        if (c == '/' && i + 1 < n && src[i + 1] == '/') {
            size_t j = i;
            while (j < n && src[j] != '\n') {
                // line continuation extends the comment
                if (src[j] == '\\' && j + 1 < n && src[j + 1] == '\n') j += 2;
                else ++j;
            }
            blank_range(m.text, i, j);
            i = j;
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '*') {
            size_t j = i + 2;
            while (j + 1 < n && !(src[j] == '*' && src[j + 1] == '/')) ++j;
            size_t end = (j + 1 < n) ? j + 2 : n;
            if (j + 1 >= n) {
                m.warnings.push_back("unterminated block comment at line " +
                                     std::to_string(line_of_offset(src, i)));
            }
            blank_range(m.text, i, end);
            i = end;
            continue;
        }
        if (c == '"') {
            // raw string literal: R"delim( ... )delim"
            bool is_raw = i > 0 && src[i - 1] == 'R' &&
                          (i < 2 || !is_ident_char(src[i - 2]) || src[i - 2] == 'u' ||
                           src[i - 2] == 'U' || src[i - 2] == 'L' || src[i - 2] == '8');
            size_t lit_begin = i;
            if (is_raw) lit_begin = i - 1;
            std::string value;
            size_t j;
            bool closed = false;
            if (is_raw) {
                size_t d = i + 1;
                std::string delim;
                while (d < n && src[d] != '(' && src[d] != '\n' && delim.size() <= 16) {
                    delim += src[d];
                    ++d;
                }
                if (d >= n || src[d] != '(') {
                    // not actually a raw literal; treat as ordinary string
                    is_raw = false;
                    lit_begin = i;
                    j = i + 1;
                } else {
                    std::string closer = ")" + delim + "\"";
                    size_t body = d + 1;
                    size_t found = src.find(closer, body);
                    if (found == std::string_view::npos) {
                        m.warnings.push_back("unterminated raw string literal at line " +
                                             std::to_string(line_of_offset(src, i)));
                        j = n;
                    } else {
                        value.assign(src.substr(body, found - body));
                        j = found + closer.size();
                        closed = true;
                    }
                }
            }
            if (!is_raw) {
                j = i + 1;
                while (j < n && src[j] != '\n') {
                    if (src[j] == '\\' && j + 1 < n) {
                        value += unescape_char(src[j + 1]);
                        j += 2;
                        continue;
                    }
                    if (src[j] == '"') {
                        closed = true;
                        ++j;
                        break;
                    }
                    value += src[j];
                    ++j;
                }
                if (!closed) {
                    m.warnings.push_back("unterminated string literal at line " +
                                         std::to_string(line_of_offset(src, i)));
                }
            }
            blank_range(m.text, lit_begin, j);
            m.literals.push_back({lit_begin, j, value, closed});
            i = j;
            continue;
        }
        if (c == '\'') {
            // skip digit separators: 1'000'000
            if (i > 0 && is_ident_char(src[i - 1])) {
                bool prefixed = src[i - 1] == 'L' || src[i - 1] == 'u' || src[i - 1] == 'U' ||
                                src[i - 1] == '8';
                bool separator = i + 1 < n && std::isalnum(static_cast<unsigned char>(src[i + 1])) &&
                                 std::isdigit(static_cast<unsigned char>(src[i - 1]));
                if (!prefixed || separator) {
                    ++i;
                    continue;
                }
            }
            size_t j = i + 1;
            while (j < n && src[j] != '\'' && src[j] != '\n') {
                if (src[j] == '\\' && j + 1 < n) ++j;
                ++j;
            }
            size_t end = (j < n && src[j] == '\'') ? j + 1 : j;
            blank_range(m.text, i, end);
            i = end;
            continue;
        }
        ++i;
    }
    return m;
}

bool is_valid_utf8(std::string_view text) {
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        size_t extra;
        if (c < 0x80) extra = 0;
        else if ((c & 0xE0) == 0xC0) extra = 1;
        else if ((c & 0xF0) == 0xE0) extra = 2;
        else if ((c & 0xF8) == 0xF0) extra = 3;
        else return false;
        if (i + extra >= n) return false;
        for (size_t k = 1; k <= extra; ++k) {
            if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) return false;
        }
        i += extra + 1;
    }
    return true;
}

LineIndex::LineIndex(std::string_view text) : size_(text.size()) {
    starts_.push_back(0);
    for (size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\n') starts_.push_back(i + 1);
    }
}

int LineIndex::line_of(size_t offset) const {
    offset = std::min(offset, size_);
    auto it = std::upper_bound(starts_.begin(), starts_.end(), offset);
    return static_cast<int>(it - starts_.begin());
}

size_t LineIndex::line_start(int line) const {
    if (line < 1) return 0;
    if (static_cast<size_t>(line) > starts_.size()) return size_;
    return starts_[static_cast<size_t>(line) - 1];
}

}  // namespace polycall
