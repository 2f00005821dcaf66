#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stepwise/types.hpp"

namespace stepwise {

// Semantic role of one sentence within a reasoning trace.
enum class ReasoningCategory {
  pivotal_reasoning,
  productive_elaboration_calculation,
  exploring_alternatives,
  verification_self_correction,
  non_substantive,
};

inline constexpr int kReasoningCategoryCount = 5;

// Human-readable category name as it appears in prompts and reports.
std::string_view display_name(ReasoningCategory category);
// One-line definition shown to the judge alongside the name.
std::string_view category_definition(ReasoningCategory category);
// Inverse of display_name: case-insensitive, surrounding whitespace ignored.
std::optional<ReasoningCategory> category_from_label(std::string_view label);

// Corpus-level distribution over categories.
struct ProfileReport {
  std::array<double, kReasoningCategoryCount> fractions{};
  int sentence_count = 0;
  // Sentences whose judge label stayed unreadable after one retry; they are
  // counted as non_substantive and surfaced here so callers can see it.
  int unparseable_count = 0;
};

// Text-completion interface for the labeling model.
class JudgeClient {
 public:
  virtual ~JudgeClient() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

// Deterministic prompt asking the judge to label each sentence; sentences are
// embedded one per line (inner newlines collapsed to spaces) in a
// SENTENCES/END block, and the judge is told to answer in a LABELS/END block.
std::string build_judge_prompt(const std::vector<std::string>& sentences);
// Splits the response's reasoning region into sentences first.
// Throws EmptyInput when the region yields no sentences.
std::string build_judge_prompt(const Response& response);

// Extracts per-sentence labels from a judge reply's LABELS/END block.
// Slot i holds nullopt when sentence i+1 is missing or its label is not one
// of the five category names.
std::vector<std::optional<ReasoningCategory>> parse_judge_reply(
    const std::string& reply, int expected_count);

struct ProfilerConfig {
  int batch_size = 20;  // sentences per judge request
};

// Labels every sentence across the responses and aggregates the category
// frequencies. Unreadable labels are retried once with a single-sentence
// prompt, then fall back to non_substantive (tallied in unparseable_count).
// Throws EmptyInput when the corpus yields no sentences; judge transport
// errors propagate.
ProfileReport profile(const std::vector<Response>& responses, JudgeClient& judge,
                      const ProfilerConfig& config = {});

// Report lines, one per category: "<name>: <percent>" with two decimals.
std::string format_profile(const ProfileReport& report);

// Offline judge for tests and demos: labels each sentence with the supplied
// function and answers in the real wire format, so the parse path is
// exercised end to end.
class MockJudge : public JudgeClient {
 public:
  using Labeler = std::function<ReasoningCategory(const std::string& sentence)>;
  explicit MockJudge(Labeler labeler) : labeler_(std::move(labeler)) {}
  std::string complete(const std::string& prompt) override;

 private:
  Labeler labeler_;
};

// Chat-completions HTTP judge:
// request {"model": ..., "messages": [{"role": "user", "content": prompt}]}
// -> response {"choices": [{"message": {"content": ...}}]}.
// Raises JudgeUnavailable on transport, status, or shape problems.
class HttpJudgeClient : public JudgeClient {
 public:
  struct Config {
    std::string endpoint;  // e.g. "http://127.0.0.1:8080/v1/chat/completions"
    std::string api_key;   // optional bearer token
    std::string model;     // optional model name forwarded verbatim
  };

  explicit HttpJudgeClient(Config config);

  // Reads STEPWISE_JUDGE_ENDPOINT / STEPWISE_JUDGE_API_KEY /
  // STEPWISE_JUDGE_MODEL. Raises JudgeUnavailable when the endpoint is unset.
  static HttpJudgeClient from_environment();

  std::string complete(const std::string& prompt) override;

 private:
  Config config_;
};

}  // namespace stepwise
