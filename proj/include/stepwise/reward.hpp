#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "stepwise/answer.hpp"
#include "stepwise/types.hpp"

namespace stepwise {

// Switches that remove one reward mechanism each, for direction studies.
enum class Ablation {
  disable_correct_reward,        // zero the correctness term
  incorrect_responses_set_Sstar, // reference step count over ALL responses
  unmask_wrong_brevity,          // pay incorrect-but-brief responses
  no_skip_all_wrong,             // keep groups where every response is wrong
};

std::string to_string(Ablation ablation);
Ablation ablation_from_string(std::string_view name);

struct RewardConfig {
  double beta = 0.01;                // step-penalty weight
  double token_penalty_weight = 0.0; // optional token-length penalty weight
  std::set<Ablation> ablation_flags;

  bool has(Ablation flag) const { return ablation_flags.count(flag) > 0; }
};

enum class RewardCase {
  correct_excess,
  correct_optimal,
  incorrect_excess,
  incorrect_brevity_masked,
  group_skipped,
};

std::string to_string(RewardCase reward_case);

struct RewardBreakdown {
  double r_acc = 0.0;   // effective correctness term ({0,1}; 0 under -CR)
  double r_seg = 0.0;   // step term (<= 0 except under unmask_wrong_brevity)
  double r_token = 0.0; // token term (<= 0)
  double total = 0.0;
  RewardCase case_label = RewardCase::group_skipped;
};

// 1 iff the response's extracted answer matches the gold answer under the
// checker; extraction failure scores 0.
int accuracy_reward(const Response& response, const std::string& gold_answer,
                    const AnswerChecker& checker);

// Minimum step count over correct responses; nullopt when none are correct.
// Under incorrect_responses_set_Sstar the minimum is over all responses.
std::optional<int> optimal_steps(const std::vector<int>& step_counts,
                                 const std::vector<int>& correctness,
                                 const RewardConfig& config);

// The reference step count actually used for scoring: optimal_steps, plus the
// no_skip_all_wrong fallback (minimum over all responses when nothing is
// correct and the skip is disabled). nullopt means the group must be skipped.
std::optional<int> resolve_reference_steps(const std::vector<int>& step_counts,
                                           const std::vector<int>& correctness,
                                           const RewardConfig& config);

// Step term for one response given the reference count. Correct responses pay
// for excess steps; incorrect long responses pay the same; incorrect brief
// responses earn nothing (or +excess-saved under unmask_wrong_brevity).
double step_reward(int step_count, int s_star, int r_acc, const RewardConfig& config);

enum class SkipDecision { proceed, skip };

// Skip iff every response is wrong and no_skip_all_wrong is absent.
SkipDecision apply_skip_all_wrong(const std::vector<int>& correctness,
                                  const RewardConfig& config);

// Full reward for one response within its group. The group's s_star must be
// resolvable; raises GroupSkipped when every response is wrong and the skip
// is active.
RewardBreakdown total_reward(const Response& response, const Group& group,
                             const RewardConfig& config, const AnswerChecker& checker);

// Scores a whole group in one pass: correctness, reference step count, and
// per-response breakdowns. `skipped` is true when the all-wrong skip removed
// the group (breakdowns then carry case_label = group_skipped, total 0).
struct GroupScore {
  bool skipped = false;
  std::optional<int> s_star;
  std::vector<int> correctness;
  std::vector<RewardBreakdown> breakdowns;
};

GroupScore score_group(Group& group, const RewardConfig& config,
                       const AnswerChecker& checker);

// Arithmetic core shared by the full scorer and the synthetic trainer: builds
// one breakdown from already-known step counts, correctness, and (for the
// token term) token counts. reference_tokens is the minimum token count among
// correct responses, when one exists.
RewardBreakdown reward_from_counts(int step_count, int token_count, int r_acc,
                                   int s_star, std::optional<int> reference_tokens,
                                   const RewardConfig& config);

}  // namespace stepwise
