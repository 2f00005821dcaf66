#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stepwise/grpo.hpp"
#include "stepwise/reward.hpp"
#include "stepwise/toy.hpp"

namespace stepwise {

struct TrainConfig {
  int group_size = 4;            // candidate responses per prompt
  int batch_prompts = 8;         // prompts per update (desk scale)
  double temperature = 0.9;
  int max_tokens = 8000;         // response-length ceiling (never binds at toy scale)
  int step_length_limit = 200;   // L_max: paragraph token bound for the stop check
  double learning_rate = 0.05;
  int max_updates = 3000;
  int consecutive_skip_halt = 50;  // halt after this many stop-skips in a row
  std::uint64_t seed = 0;
  GrpoConfig grpo;
  RewardConfig reward;
};

void validate_train_config(const TrainConfig& config,
                           const std::vector<ProblemSpec>& problems);

enum class SkipReason { all_wrong, step_length_exceeded };

std::string to_string(SkipReason reason);

struct TrainRecord {
  int update_index = 0;
  double mean_steps = 0.0;
  double mean_tokens = 0.0;
  int max_step_tokens = 0;
  double mean_reward = 0.0;
  double accuracy = 0.0;
  std::optional<SkipReason> skipped_reason;
  bool halted = false;
};

struct TrainResult {
  std::vector<TrainRecord> records;
  ToyPolicy initial_policy;
  ToyPolicy final_policy;
  bool halted = false;
  std::optional<int> first_stop_index;  // update of the first length-triggered skip
};

// Observes each record as it is produced (e.g. a JSONL writer).
using RecordSink = std::function<void(const TrainRecord&)>;

// Runs the full loop: sample groups for a batch of prompts, drop all-wrong
// groups, skip the update when any paragraph exceeds the step length limit,
// otherwise score rewards, normalize advantages per group, and take one
// gradient step on the policy logits. Skipped updates leave the policy
// parameters bitwise unchanged. Halts early after consecutive_skip_halt
// length-triggered skips in a row.
TrainResult train(ToyPolicy policy, const std::vector<ProblemSpec>& problems,
                  const TrainConfig& config, const RecordSink& sink = nullptr);

// The gradient of the batch loss with respect to the policy logits.
struct PolicyGradient {
  std::vector<double> step_logits;
  std::vector<double> verbosity_logits;
  double merge_logit = 0.0;
};

// The loss and its analytic gradient for one batch of already-sampled groups
// with fixed advantages. The loss is the per-group clipped-surrogate loss
// summed over groups; log-probabilities of the sampled decisions are
// recomputed under `policy` while the sample-time values stay frozen as the
// old policy. Exposed so gradient checks can compare the analytic path
// against finite differences of the loss.
double toy_batch_loss(const ToyPolicy& policy, const ToyPolicy& reference,
                      const std::vector<const ToyGroup*>& groups,
                      const std::vector<std::vector<double>>& advantages,
                      double temperature, const GrpoConfig& grpo_config);

PolicyGradient toy_batch_gradient(const ToyPolicy& policy, const ToyPolicy& reference,
                                  const std::vector<const ToyGroup*>& groups,
                                  const std::vector<std::vector<double>>& advantages,
                                  double temperature, const GrpoConfig& grpo_config);

// The six-problem bank the desk-scale defaults were tuned on: five solvable
// prompts requiring four reasoning steps and one low-yield prompt that keeps
// reward variance alive late in training.
std::vector<ProblemSpec> default_problem_bank();

}  // namespace stepwise
