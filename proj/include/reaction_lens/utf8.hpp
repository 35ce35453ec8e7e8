#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace reaction_lens::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

// Decodes the code point starting at `pos` and advances `pos` past it.
// Ill-formed sequences (overlong forms, surrogates, values above U+10FFFF,
// truncated input) yield U+FFFD and consume a single byte.
char32_t decode_next(std::string_view text, std::size_t& pos) noexcept;

bool is_valid(std::string_view text) noexcept;

void append(std::string& out, char32_t cp);

// General category Cc.
bool is_control(char32_t cp) noexcept;

// General category Cf (Unicode 15).
bool is_format(char32_t cp) noexcept;

// White_Space code points other than the Cc ones (U+0020 and category Zs,
// plus the line and paragraph separators).
bool is_space_separator(char32_t cp) noexcept;

inline bool is_sinhala(char32_t cp) noexcept { return cp >= 0x0D80 && cp <= 0x0DFF; }
inline bool is_sinhala_digit(char32_t cp) noexcept { return cp >= 0x0DE6 && cp <= 0x0DEF; }

}  // namespace reaction_lens::utf8
