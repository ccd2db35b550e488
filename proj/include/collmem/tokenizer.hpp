#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace collmem {

// Splits UTF-8 text into lower-cased word tokens.
//
// A token is a maximal run of letters and digits. ASCII punctuation, ASCII
// whitespace, Latin-1 symbols, the General Punctuation block, CJK symbols and
// malformed byte sequences all separate tokens. Any other non-ASCII code
// point counts as a letter. Case folding covers ASCII, Latin-1, Latin
// Extended-A, Greek and Cyrillic capitals; other scripts are left as is.
class Tokenizer {
 public:
  // Calls `emit(std::string_view token)` for every token in order.
  template <typename Fn>
  static void for_each_token(std::string_view text, Fn&& emit) {
    std::string buf;
    for_each_token_impl(text, buf, emit);
  }

  static std::vector<std::string> tokenize(std::string_view text);

  // Tokens joined by a single space; the canonical key of a name surface.
  static std::string normalize(std::string_view text);

 private:
  template <typename Fn>
  static void for_each_token_impl(std::string_view text, std::string& buf, Fn& emit) {
    std::size_t i = 0;
    while (i < text.size()) {
      char32_t cp;
      std::size_t len = decode(text, i, cp);
      i += len;
      if (is_word(cp)) {
        append_utf8(buf, fold(cp));
      } else if (!buf.empty()) {
        emit(std::string_view(buf));
        buf.clear();
      }
    }
    if (!buf.empty()) {
      emit(std::string_view(buf));
      buf.clear();
    }
  }

  // Returns bytes consumed (>= 1). Malformed input yields U+FFFD-like
  // sentinel 0xFFFFFFFF, which is treated as a separator.
  static std::size_t decode(std::string_view s, std::size_t i, char32_t& cp);
  static bool is_word(char32_t cp);
  static char32_t fold(char32_t cp);
  static void append_utf8(std::string& out, char32_t cp);
};

}  // namespace collmem
