#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace stepwise {

// Normalizes an answer for comparison: strips all whitespace, then strips
// leading zeros (a zero is removed only when another digit follows, so "0"
// and "0.5" survive).
std::string normalize_answer(std::string_view raw);

// Pulls the final answer out of the answer region. Preference order:
//   1. the last \boxed{...} with balanced braces,
//   2. the last whitespace-delimited token containing a digit (surrounding
//      punctuation trimmed).
// Returns the normalized answer, or nullopt when nothing extractable exists.
std::optional<std::string> extract_answer(std::string_view answer_text);

// Pluggable equivalence predicate over two normalized answers.
using AnswerChecker = std::function<bool(const std::string&, const std::string&)>;

// Default checker: exact match after normalization.
AnswerChecker exact_match_checker();

}  // namespace stepwise
