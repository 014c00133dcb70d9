#pragma once

// Minimal UTF-8 codec plus Unicode-aware case mapping and word-character
// classification backed by the C.UTF-8 wide-character tables.

#include <cwctype>
#include <locale>
#include <string>
#include <string_view>

namespace triage::detail {

inline constexpr char32_t kInvalidCodePoint = 0xFFFFFFFF;

// Decodes one code point at `i` and advances it. Malformed sequences yield
// kInvalidCodePoint and consume a single byte.
inline char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return kInvalidCodePoint;
  }
  if (i + len > s.size()) {
    ++i;
    return kInvalidCodePoint;
  }
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return kInvalidCodePoint;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  return cp;
}

inline void encode_utf8(char32_t cp, std::string& out) {
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

class UnicodeTables {
 public:
  static const UnicodeTables& instance() {
    static const UnicodeTables tables;
    return tables;
  }

  char32_t to_lower(char32_t cp) const {
    if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
    if (!ctype_ || cp > 0x10FFFF) return cp;
    return static_cast<char32_t>(ctype_->tolower(static_cast<wchar_t>(cp)));
  }

  // Letters, digits and underscore.
  bool is_word(char32_t cp) const {
    if (cp < 0x80) {
      return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9') ||
             cp == '_';
    }
    if (cp == kInvalidCodePoint || cp > 0x10FFFF) return false;
    if (!ctype_) return false;
    return ctype_->is(std::ctype_base::alnum, static_cast<wchar_t>(cp));
  }

 private:
  UnicodeTables() {
    try {
      locale_ = std::locale("C.UTF-8");
      ctype_ = &std::use_facet<std::ctype<wchar_t>>(locale_);
    } catch (const std::exception&) {
      ctype_ = nullptr;  // ASCII-only fallback
    }
  }

  std::locale locale_;
  const std::ctype<wchar_t>* ctype_ = nullptr;
};

}  // namespace triage::detail
