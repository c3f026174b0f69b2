#pragma once

#include <cstdint>
#include <string>
#include <string_view>

// UTF-8 aware string primitives used by the elemental operations. Case
// mapping covers ASCII, Latin-1 Supplement and Latin Extended-A, which is
// everything the shipped English/French/Spanish lexicons contain.
namespace curriculum::text {

std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
bool is_valid_utf8(std::string_view s) noexcept;

char32_t to_upper(char32_t c) noexcept;
char32_t to_lower(char32_t c) noexcept;

std::string to_upper(std::string_view s);
std::string to_lower(std::string_view s);
std::string reverse(std::string_view s);
// Empty input yields an empty string.
std::string first_char(std::string_view s);
std::string last_char(std::string_view s);

std::string_view trim(std::string_view s) noexcept;
std::string strip_diacritics(std::string_view s);

std::uint64_t fnv1a64(std::string_view s) noexcept;

}  // namespace curriculum::text
