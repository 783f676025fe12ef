#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace polycall {

// One string literal found while masking. `begin`/`end` span the literal in
// the original buffer including quotes and any prefix. `plain` is false for
// literals that do not denote a plain string value (f-strings, byte strings,
// unterminated literals).
struct MaskedLiteral {
    size_t begin = 0;
    size_t end = 0;
    std::string value;
    bool plain = true;
};

// Masked view of a source buffer: comments and literal bodies are blanked
// with spaces (newlines kept) so structural scans cannot match inside them.
struct MaskedSource {
    std::string text;
    std::vector<MaskedLiteral> literals;  // sorted by begin
    std::vector<std::string> warnings;

    // Literal exactly covering [begin, end) after trimming, if any.
    const MaskedLiteral* literal_spanning(size_t begin, size_t end) const;
    // Any literal starting inside [begin, end).
    const MaskedLiteral* literal_within(size_t begin, size_t end) const;
};

MaskedSource mask_python_source(std::string_view src);
MaskedSource mask_cpp_source(std::string_view src);

bool is_valid_utf8(std::string_view text);

// Maps byte offsets to 1-based line numbers.
class LineIndex {
public:
    explicit LineIndex(std::string_view text);
    int line_of(size_t offset) const;
    size_t line_start(int line) const;  // 1-based
    int line_count() const { return static_cast<int>(starts_.size()); }

private:
    std::vector<size_t> starts_;
    size_t size_;
};

}  // namespace polycall
