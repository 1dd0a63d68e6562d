#pragma once

#include <string>
#include <string_view>

namespace scriptkit::utf8 {

// Invalid byte sequences decode to U+FFFD, one replacement per bad byte.
std::u32string decode(std::string_view bytes);
std::string encode(std::u32string_view text);
std::string encode(char32_t cp);

bool is_whitespace(char32_t cp);

}  // namespace scriptkit::utf8
