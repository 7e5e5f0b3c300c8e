#pragma once

#include <string>
#include <string_view>

namespace llmaudit::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

// Total decoder: malformed sequences yield U+FFFD and consume one byte.
std::u32string decode(std::string_view bytes);
std::string encode(std::u32string_view cps);
void append(std::string& out, char32_t cp);

bool is_whitespace(char32_t cp);
bool is_punctuation(char32_t cp);

// Simple case folding for ASCII, Latin-1, Latin Extended-A, Greek and
// Cyrillic. Other scripts pass through unchanged.
char32_t fold_case(char32_t cp);

std::string rtrim_whitespace(std::string_view text);

}  // namespace llmaudit::utf8
