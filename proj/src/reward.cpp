#include "stepwise/reward.hpp"

#include <algorithm>
#include <limits>

#include "stepwise/errors.hpp"

namespace stepwise {

std::string to_string(Ablation ablation) {
  switch (ablation) {
    case Ablation::disable_correct_reward: return "disable_correct_reward";
    case Ablation::incorrect_responses_set_Sstar: return "incorrect_responses_set_Sstar";
    case Ablation::unmask_wrong_brevity: return "unmask_wrong_brevity";
    case Ablation::no_skip_all_wrong: return "no_skip_all_wrong";
  }
  return "disable_correct_reward";
}

Ablation ablation_from_string(std::string_view name) {
  if (name == "disable_correct_reward") return Ablation::disable_correct_reward;
  if (name == "incorrect_responses_set_Sstar") return Ablation::incorrect_responses_set_Sstar;
  if (name == "unmask_wrong_brevity") return Ablation::unmask_wrong_brevity;
  if (name == "no_skip_all_wrong") return Ablation::no_skip_all_wrong;
  throw ConfigInvalid("unknown ablation flag: " + std::string(name));
}

std::string to_string(RewardCase reward_case) {
  switch (reward_case) {
    case RewardCase::correct_excess: return "correct_excess";
    case RewardCase::correct_optimal: return "correct_optimal";
    case RewardCase::incorrect_excess: return "incorrect_excess";
    case RewardCase::incorrect_brevity_masked: return "incorrect_brevity_masked";
    case RewardCase::group_skipped: return "group_skipped";
  }
  return "group_skipped";
}

int accuracy_reward(const Response& response, const std::string& gold_answer,
                    const AnswerChecker& checker) {
  if (!response.extracted_answer.has_value()) return 0;
  return checker(*response.extracted_answer, normalize_answer(gold_answer)) ? 1 : 0;
}

std::optional<int> optimal_steps(const std::vector<int>& step_counts,
                                 const std::vector<int>& correctness,
                                 const RewardConfig& config) {
  int best = std::numeric_limits<int>::max();
  if (config.has(Ablation::incorrect_responses_set_Sstar)) {
    for (int s : step_counts) best = std::min(best, s);
    return step_counts.empty() ? std::nullopt : std::optional<int>(best);
  }
  bool any_correct = false;
  for (std::size_t i = 0; i < step_counts.size(); ++i) {
    if (correctness[i] != 0) {
      any_correct = true;
      best = std::min(best, step_counts[i]);
    }
  }
  if (!any_correct) return std::nullopt;
  return best;
}

std::optional<int> resolve_reference_steps(const std::vector<int>& step_counts,
                                           const std::vector<int>& correctness,
                                           const RewardConfig& config) {
  if (auto s_star = optimal_steps(step_counts, correctness, config)) return s_star;
  if (config.has(Ablation::no_skip_all_wrong) && !step_counts.empty()) {
    // With the skip disabled the brevity race needs a reference; the shortest
    // response provides it, mirroring the all-responses pool.
    return *std::min_element(step_counts.begin(), step_counts.end());
  }
  return std::nullopt;
}

double step_reward(int step_count, int s_star, int r_acc, const RewardConfig& config) {
  const int excess = step_count - s_star;
  // Spelled as 0.0 - x rather than -x so a zero excess yields +0.0.
  if (r_acc != 0) {
    return 0.0 - static_cast<double>(std::max(0, excess));
  }
  if (step_count < s_star) {
    if (config.has(Ablation::unmask_wrong_brevity)) {
      return static_cast<double>(s_star - step_count);
    }
    return 0.0;
  }
  return 0.0 - static_cast<double>(excess);
}

SkipDecision apply_skip_all_wrong(const std::vector<int>& correctness,
                                  const RewardConfig& config) {
  if (config.has(Ablation::no_skip_all_wrong)) return SkipDecision::proceed;
  for (int c : correctness) {
    if (c != 0) return SkipDecision::proceed;
  }
  return SkipDecision::skip;
}

RewardBreakdown reward_from_counts(int step_count, int token_count, int r_acc,
                                   int s_star, std::optional<int> reference_tokens,
                                   const RewardConfig& config) {
  RewardBreakdown breakdown;
  breakdown.r_seg = step_reward(step_count, s_star, r_acc, config);
  if (r_acc != 0) {
    breakdown.case_label = step_count > s_star ? RewardCase::correct_excess
                                               : RewardCase::correct_optimal;
  } else if (step_count < s_star && breakdown.r_seg == 0.0) {
    breakdown.case_label = RewardCase::incorrect_brevity_masked;
  } else {
    breakdown.case_label = RewardCase::incorrect_excess;
  }
  breakdown.r_acc =
      (r_acc != 0 && !config.has(Ablation::disable_correct_reward)) ? 1.0 : 0.0;
  if (config.token_penalty_weight > 0.0 && reference_tokens.has_value()) {
    breakdown.r_token = -static_cast<double>(std::max(0, token_count - *reference_tokens));
  }
  breakdown.total = breakdown.r_acc + config.beta * breakdown.r_seg +
                    config.token_penalty_weight * breakdown.r_token;
  return breakdown;
}

namespace {

std::optional<int> min_correct_tokens(const Group& group,
                                      const std::vector<int>& correctness) {
  std::optional<int> best;
  for (std::size_t i = 0; i < group.responses.size(); ++i) {
    if (correctness[i] != 0) {
      const int tokens = group.responses[i].token_count;
      if (!best || tokens < *best) best = tokens;
    }
  }
  return best;
}

std::vector<int> score_correctness(const Group& group, const AnswerChecker& checker) {
  std::vector<int> correctness;
  correctness.reserve(group.responses.size());
  for (const Response& response : group.responses) {
    correctness.push_back(accuracy_reward(response, group.gold_answer, checker));
  }
  return correctness;
}

}  // namespace

RewardBreakdown total_reward(const Response& response, const Group& group,
                             const RewardConfig& config, const AnswerChecker& checker) {
  const std::vector<int> correctness = score_correctness(group, checker);
  std::vector<int> step_counts;
  step_counts.reserve(group.responses.size());
  for (const Response& r : group.responses) step_counts.push_back(count_steps(r));

  const std::optional<int> s_star =
      group.s_star.has_value()
          ? group.s_star
          : resolve_reference_steps(step_counts, correctness, config);
  if (!s_star.has_value()) {
    throw GroupSkipped("group has no correct response; skipped from training");
  }
  const int r_acc = accuracy_reward(response, group.gold_answer, checker);
  return reward_from_counts(count_steps(response), response.token_count, r_acc,
                            *s_star, min_correct_tokens(group, correctness), config);
}

GroupScore score_group(Group& group, const RewardConfig& config,
                       const AnswerChecker& checker) {
  GroupScore score;
  score.correctness = score_correctness(group, checker);

  std::vector<int> step_counts;
  step_counts.reserve(group.responses.size());
  for (const Response& r : group.responses) step_counts.push_back(count_steps(r));

  if (apply_skip_all_wrong(score.correctness, config) == SkipDecision::skip) {
    score.skipped = true;
    score.breakdowns.assign(group.responses.size(), RewardBreakdown{});
    group.s_star.reset();
    return score;
  }

  score.s_star = resolve_reference_steps(step_counts, score.correctness, config);
  group.s_star = score.s_star;
  const std::optional<int> reference_tokens = min_correct_tokens(group, score.correctness);
  score.breakdowns.reserve(group.responses.size());
  for (std::size_t i = 0; i < group.responses.size(); ++i) {
    score.breakdowns.push_back(reward_from_counts(
        step_counts[i], group.responses[i].token_count, score.correctness[i],
        *score.s_star, reference_tokens, config));
  }
  return score;
}

}  // namespace stepwise
