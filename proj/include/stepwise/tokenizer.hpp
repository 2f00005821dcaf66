#pragma once

#include <cctype>
#include <functional>
#include <string_view>

namespace stepwise {

// Token counting is pluggable so a model tokenizer can be injected; the
// default counts whitespace-delimited words.
using Tokenizer = std::function<int(std::string_view)>;

inline int whitespace_token_count(std::string_view text) {
  int count = 0;
  bool in_token = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

inline Tokenizer default_tokenizer() {
  return [](std::string_view text) { return whitespace_token_count(text); };
}

}  // namespace stepwise
