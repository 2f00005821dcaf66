#include "stepwise/answer.hpp"

#include <cctype>

namespace stepwise {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

// Reads the balanced-brace body starting right after "\boxed{". Returns
// nullopt when the braces never close.
std::optional<std::string> read_braced_body(std::string_view text, std::size_t open) {
  int depth = 1;
  for (std::size_t i = open + 1; i < text.size(); ++i) {
    if (text[i] == '{') {
      ++depth;
    } else if (text[i] == '}') {
      if (--depth == 0) return std::string(text.substr(open + 1, i - open - 1));
    }
  }
  return std::nullopt;
}

std::string trim_punctuation(std::string_view token) {
  std::size_t begin = 0;
  std::size_t end = token.size();
  auto is_edge = [](char c) {
    return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' ||
           c == '?' || c == '(' || c == ')' || c == '[' || c == ']' ||
           c == '"' || c == '\'';
  };
  while (begin < end && is_edge(token[begin])) ++begin;
  while (end > begin && is_edge(token[end - 1])) --end;
  return std::string(token.substr(begin, end - begin));
}

}  // namespace

std::string normalize_answer(std::string_view raw) {
  std::string compact;
  compact.reserve(raw.size());
  for (char c : raw) {
    if (!is_space(c)) compact.push_back(c);
  }
  std::size_t start = 0;
  while (start + 1 < compact.size() && compact[start] == '0' &&
         is_digit(compact[start + 1])) {
    ++start;
  }
  return compact.substr(start);
}

std::optional<std::string> extract_answer(std::string_view answer_text) {
  static constexpr std::string_view kBoxed = "\\boxed{";

  // Last balanced \boxed{...} wins.
  for (std::size_t pos = answer_text.rfind(kBoxed); pos != std::string_view::npos;
       pos = (pos == 0) ? std::string_view::npos : answer_text.rfind(kBoxed, pos - 1)) {
    if (auto body = read_braced_body(answer_text, pos + kBoxed.size() - 1)) {
      std::string normalized = normalize_answer(*body);
      if (!normalized.empty()) return normalized;
    }
    if (pos == 0) break;
  }

  // Fallback: last token containing a digit.
  std::size_t end = answer_text.size();
  while (end > 0) {
    while (end > 0 && is_space(answer_text[end - 1])) --end;
    if (end == 0) break;
    std::size_t begin = end;
    while (begin > 0 && !is_space(answer_text[begin - 1])) --begin;
    const std::string token = trim_punctuation(answer_text.substr(begin, end - begin));
    bool has_digit = false;
    for (char c : token) has_digit = has_digit || is_digit(c);
    if (has_digit) {
      std::string normalized = normalize_answer(token);
      if (!normalized.empty()) return normalized;
    }
    end = begin;
  }
  return std::nullopt;
}

AnswerChecker exact_match_checker() {
  return [](const std::string& a, const std::string& b) { return a == b; };
}

}  // namespace stepwise
