#pragma once

#include <cstddef>
#include <string>
#include <string_view>

// Minimal UTF-8 and character-class helpers. Case mapping covers Latin
// (Basic, Latin-1, Extended-A), Greek and Cyrillic; other scripts are left
// unchanged.
namespace wikimrc::text {

// Decodes the code point starting at byte `pos` and advances `pos` past it.
// Invalid sequences decode as U+FFFD and consume one byte.
char32_t next_code_point(std::string_view s, std::size_t &pos);

void append_utf8(std::string &out, char32_t cp);

bool is_space(char32_t cp);
bool is_punct(char32_t cp);

char32_t to_upper(char32_t cp);
char32_t to_lower(char32_t cp);

std::string lowercase(std::string_view s);

// Uppercases the first code point only.
std::string uppercase_first(std::string_view s);

// Trims ASCII and Unicode whitespace from both ends.
std::string_view trim(std::string_view s);

bool iequals_ascii(std::string_view a, std::string_view b);

}  // namespace wikimrc::text
