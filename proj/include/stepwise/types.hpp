#pragma once

#include <optional>
#include <string>
#include <vector>

namespace stepwise {

// One reasoning step: a contiguous piece of the thinking region.
struct Step {
  int index = 0;          // 0-based position within the response
  std::string text;       // nonempty after trimming
  int token_count = 0;    // >= 1 for any real step
};

// One model response, split into its thinking region and the answer region.
struct Response {
  std::string prompt_id;
  std::string raw_text;
  std::string think_text;
  std::string answer_text;
  std::optional<std::string> extracted_answer;  // normalized; empty when extraction failed
  std::vector<Step> steps;                      // computed on think_text only
  int token_count = 0;                          // whole-response tokens
};

inline int count_steps(const Response& response) {
  return static_cast<int>(response.steps.size());
}

// A group of candidate responses to the same prompt. s_star is the reference
// step count: present iff at least one response is correct (default flags).
struct Group {
  std::string prompt_id;
  std::string gold_answer;  // normalized
  std::vector<Response> responses;
  std::optional<int> s_star;
};

}  // namespace stepwise
