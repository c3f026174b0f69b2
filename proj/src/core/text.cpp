#include "core/text.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace curriculum::text {

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      throw Error(Errc::invalid_argument, "invalid UTF-8 lead byte", i);
    }
    if (i + len > s.size()) throw Error(Errc::invalid_argument, "truncated UTF-8 sequence", i);
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) throw Error(Errc::invalid_argument, "invalid UTF-8 continuation", i);
      cp = (cp << 6) | (b & 0x3F);
    }
    const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000);
    if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      throw Error(Errc::invalid_argument, "invalid UTF-8 code point", i);
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

bool is_valid_utf8(std::string_view s) noexcept {
  try {
    decode_utf8(s);
    return true;
  } catch (const Error&) {
    return false;
  }
}

namespace {

// Latin Extended-A alternates upper/lower in pairs; the parity of the
// uppercase member flips at U+0138 and again at U+0149 / U+0178.
bool ext_a_upper_is_even(char32_t c) {
  return (c >= 0x0100 && c <= 0x0137) || (c >= 0x014A && c <= 0x0177);
}
bool ext_a_upper_is_odd(char32_t c) {
  return (c >= 0x0139 && c <= 0x0148) || (c >= 0x0179 && c <= 0x017E);
}

}  // namespace

char32_t to_upper(char32_t c) noexcept {
  if (c >= U'a' && c <= U'z') return c - 0x20;
  if (c < 0x80) return c;
  if (c >= 0x00E0 && c <= 0x00FE && c != 0x00F7) return c - 0x20;
  if (c == 0x00FF) return 0x0178;
  if (ext_a_upper_is_even(c)) return c & ~char32_t{1};
  if (ext_a_upper_is_odd(c) && (c % 2 == 0)) return c - 1;
  if (c >= 0x0218 && c <= 0x021B) return c & ~char32_t{1};
  return c;
}

char32_t to_lower(char32_t c) noexcept {
  if (c >= U'A' && c <= U'Z') return c + 0x20;
  if (c < 0x80) return c;
  if (c >= 0x00C0 && c <= 0x00DE && c != 0x00D7) return c + 0x20;
  if (c == 0x0178) return 0x00FF;
  if (ext_a_upper_is_even(c)) return c | char32_t{1};
  if (ext_a_upper_is_odd(c) && (c % 2 == 1)) return c + 1;
  if (c >= 0x0218 && c <= 0x021B) return c | char32_t{1};
  return c;
}

std::string to_upper(std::string_view s) {
  std::u32string cps = decode_utf8(s);
  for (auto& c : cps) c = to_upper(c);
  return encode_utf8(cps);
}

std::string to_lower(std::string_view s) {
  std::u32string cps = decode_utf8(s);
  for (auto& c : cps) c = to_lower(c);
  return encode_utf8(cps);
}

std::string reverse(std::string_view s) {
  std::u32string cps = decode_utf8(s);
  std::reverse(cps.begin(), cps.end());
  return encode_utf8(cps);
}

std::string first_char(std::string_view s) {
  const std::u32string cps = decode_utf8(s);
  if (cps.empty()) return {};
  return encode_utf8(std::u32string_view(cps).substr(0, 1));
}

std::string last_char(std::string_view s) {
  const std::u32string cps = decode_utf8(s);
  if (cps.empty()) return {};
  return encode_utf8(std::u32string_view(cps).substr(cps.size() - 1));
}

std::string_view trim(std::string_view s) noexcept {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string strip_diacritics(std::string_view s) {
  std::u32string out;
  for (char32_t c : decode_utf8(s)) {
    switch (c) {
      case U'à': case U'á': case U'â': case U'ã': case U'ä': case U'å': out += U'a'; break;
      case U'À': case U'Á': case U'Â': case U'Ã': case U'Ä': case U'Å': out += U'A'; break;
      case U'è': case U'é': case U'ê': case U'ë': out += U'e'; break;
      case U'È': case U'É': case U'Ê': case U'Ë': out += U'E'; break;
      case U'ì': case U'í': case U'î': case U'ï': out += U'i'; break;
      case U'Ì': case U'Í': case U'Î': case U'Ï': out += U'I'; break;
      case U'ò': case U'ó': case U'ô': case U'õ': case U'ö': out += U'o'; break;
      case U'Ò': case U'Ó': case U'Ô': case U'Õ': case U'Ö': out += U'O'; break;
      case U'ù': case U'ú': case U'û': case U'ü': out += U'u'; break;
      case U'Ù': case U'Ú': case U'Û': case U'Ü': out += U'U'; break;
      case U'ý': case U'ÿ': out += U'y'; break;
      case U'Ý': case U'Ÿ': out += U'Y'; break;
      case U'ñ': out += U'n'; break;
      case U'Ñ': out += U'N'; break;
      case U'ç': out += U'c'; break;
      case U'Ç': out += U'C'; break;
      case U'œ': out += U"oe"; break;
      case U'Œ': out += U"OE"; break;
      case U'æ': out += U"ae"; break;
      case U'Æ': out += U"AE"; break;
      default: out += c;
    }
  }
  return encode_utf8(out);
}

std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace curriculum::text
