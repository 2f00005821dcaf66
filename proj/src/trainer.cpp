#include "stepwise/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "stepwise/errors.hpp"
#include "stepwise/rng.hpp"

namespace stepwise {
namespace {

// Rewards for one sampled group, or nullopt when the all-wrong skip removes
// it. Uses the same arithmetic primitives as the full text-level scorer.
std::optional<std::vector<double>> group_rewards(const ToyGroup& group,
                                                 const RewardConfig& config) {
  const std::size_t n = group.samples.size();
  std::vector<int> step_counts(n);
  std::vector<int> correctness(n);
  for (std::size_t j = 0; j < n; ++j) {
    step_counts[j] = static_cast<int>(group.samples[j].paragraph_tokens.size());
    correctness[j] = group.samples[j].correct ? 1 : 0;
  }
  if (apply_skip_all_wrong(correctness, config) == SkipDecision::skip) {
    return std::nullopt;
  }
  const std::optional<int> s_star =
      resolve_reference_steps(step_counts, correctness, config);
  std::optional<int> reference_tokens;
  for (std::size_t j = 0; j < n; ++j) {
    if (correctness[j] != 0) {
      const int tokens = group.samples[j].token_count;
      if (!reference_tokens || tokens < *reference_tokens) reference_tokens = tokens;
    }
  }
  std::vector<double> totals(n);
  for (std::size_t j = 0; j < n; ++j) {
    totals[j] = reward_from_counts(step_counts[j], group.samples[j].token_count,
                                   correctness[j], *s_star, reference_tokens, config)
                    .total;
  }
  return totals;
}

// Chain rule from a decision's log-probability into the policy logits. The
// sampling distributions are tempered, so every path picks up a 1/T factor.
void accumulate_choice_gradient(PolicyGradient& grad, const PolicyDistributions& dists,
                                const Choice& choice, double d_loss_d_logp,
                                double temperature) {
  switch (choice.kind) {
    case Choice::Kind::step_count:
      for (std::size_t i = 0; i < dists.step_probs.size(); ++i) {
        const double indicator = static_cast<int>(i) == choice.value ? 1.0 : 0.0;
        grad.step_logits[i] +=
            d_loss_d_logp * (indicator - dists.step_probs[i]) / temperature;
      }
      break;
    case Choice::Kind::verbosity:
      for (std::size_t i = 0; i < dists.verbosity_probs.size(); ++i) {
        const double indicator = static_cast<int>(i) == choice.value ? 1.0 : 0.0;
        grad.verbosity_logits[i] +=
            d_loss_d_logp * (indicator - dists.verbosity_probs[i]) / temperature;
      }
      break;
    case Choice::Kind::merge:
      grad.merge_logit += d_loss_d_logp *
                          (choice.value != 0 ? (1.0 - dists.merge_prob)
                                             : -dists.merge_prob) /
                          temperature;
      break;
  }
}

}  // namespace

std::string to_string(SkipReason reason) {
  switch (reason) {
    case SkipReason::all_wrong: return "all_wrong";
    case SkipReason::step_length_exceeded: return "step_length_exceeded";
  }
  return "all_wrong";
}

void validate_train_config(const TrainConfig& config,
                           const std::vector<ProblemSpec>& problems) {
  if (config.group_size < 2) {
    throw ConfigInvalid("group_size must be at least 2 for nonzero advantage variance");
  }
  if (problems.empty()) throw ConfigInvalid("problem bank must be nonempty");
  if (config.batch_prompts < 1) throw ConfigInvalid("batch_prompts must be positive");
  if (config.step_length_limit <= 0) {
    throw ConfigInvalid("step_length_limit must be positive");
  }
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
    throw ConfigInvalid("learning_rate must be positive and finite");
  }
  if (config.max_updates < 1) throw ConfigInvalid("max_updates must be positive");
  if (config.consecutive_skip_halt < 1) {
    throw ConfigInvalid("consecutive_skip_halt must be positive");
  }
  if (!(config.temperature > 0.0)) throw ConfigInvalid("temperature must be positive");
  if (config.max_tokens < 1) throw ConfigInvalid("max_tokens must be positive");
  for (const ProblemSpec& problem : problems) {
    if (problem.required_steps < 1) {
      throw ConfigInvalid("required_steps must be at least 1");
    }
    if (problem.p_solve < 0.0 || problem.p_solve > 1.0 || problem.p_guess < 0.0 ||
        problem.p_guess > problem.p_solve) {
      throw ConfigInvalid(
          "problem probabilities need 0 <= p_guess <= p_solve <= 1");
    }
  }
}

double toy_batch_loss(const ToyPolicy& policy, const ToyPolicy& reference,
                      const std::vector<const ToyGroup*>& groups,
                      const std::vector<std::vector<double>>& advantages,
                      double temperature, const GrpoConfig& grpo_config) {
  const PolicyDistributions dists = make_distributions(policy, temperature);
  const PolicyDistributions reference_dists = make_distributions(reference, temperature);
  double loss = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    GrpoBatch batch;
    batch.responses.reserve(groups[g]->samples.size());
    for (std::size_t j = 0; j < groups[g]->samples.size(); ++j) {
      const ToySample& sample = groups[g]->samples[j];
      GrpoResponse response;
      response.advantage = advantages[g][j];
      response.tokens.reserve(sample.choices.size());
      for (std::size_t k = 0; k < sample.choices.size(); ++k) {
        GrpoToken token;
        token.logp_current = choice_log_prob(dists, sample.choices[k]);
        token.logp_old = sample.logp_old[k];
        token.logp_reference = choice_log_prob(reference_dists, sample.choices[k]);
        response.tokens.push_back(token);
      }
      batch.responses.push_back(std::move(response));
    }
    loss += grpo_loss(batch, grpo_config);
  }
  return loss;
}

PolicyGradient toy_batch_gradient(const ToyPolicy& policy, const ToyPolicy& reference,
                                  const std::vector<const ToyGroup*>& groups,
                                  const std::vector<std::vector<double>>& advantages,
                                  double temperature, const GrpoConfig& grpo_config) {
  const PolicyDistributions dists = make_distributions(policy, temperature);
  const PolicyDistributions reference_dists = make_distributions(reference, temperature);
  PolicyGradient grad;
  grad.step_logits.assign(policy.step_logits.size(), 0.0);
  grad.verbosity_logits.assign(policy.verbosity_logits.size(), 0.0);
  grad.merge_logit = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::size_t n = groups[g]->samples.size();
    for (std::size_t j = 0; j < n; ++j) {
      const ToySample& sample = groups[g]->samples[j];
      const double advantage = advantages[g][j];
      const double scale =
          -1.0 / (static_cast<double>(n) * static_cast<double>(sample.choices.size()));
      for (std::size_t k = 0; k < sample.choices.size(); ++k) {
        GrpoToken token;
        token.logp_current = choice_log_prob(dists, sample.choices[k]);
        token.logp_old = sample.logp_old[k];
        token.logp_reference = choice_log_prob(reference_dists, sample.choices[k]);
        const double d_loss_d_logp =
            scale * surrogate_grad_logp_current(token, advantage, grpo_config);
        accumulate_choice_gradient(grad, dists, sample.choices[k], d_loss_d_logp,
                                   temperature);
      }
    }
  }
  return grad;
}

TrainResult train(ToyPolicy policy, const std::vector<ProblemSpec>& problems,
                  const TrainConfig& config, const RecordSink& sink) {
  validate_policy(policy);
  validate_train_config(config, problems);

  TrainResult result;
  result.initial_policy = policy;
  const ToyPolicy reference = policy;
  const PolicyDistributions reference_dists =
      make_distributions(reference, config.temperature);
  const ToyTextCache cache = make_text_cache(policy.verbosity_buckets);
  Rng rng(config.seed);

  int consecutive_stops = 0;

  for (int update = 0; update < config.max_updates; ++update) {
    const PolicyDistributions dists = make_distributions(policy, config.temperature);

    // Sample one group per prompt in the batch, cycling through the bank.
    std::vector<ToyGroup> groups;
    groups.reserve(config.batch_prompts);
    for (int g = 0; g < config.batch_prompts; ++g) {
      const std::size_t problem_index =
          (static_cast<std::size_t>(update) * config.batch_prompts + g) %
          problems.size();
      ToyGroup group;
      group.problem = &problems[problem_index];
      group.samples.reserve(config.group_size);
      for (int j = 0; j < config.group_size; ++j) {
        group.samples.push_back(sample_response(dists, reference_dists,
                                                *group.problem, cache, rng));
      }
      groups.push_back(std::move(group));
    }

    // Batch-level telemetry over every sampled response.
    TrainRecord record;
    record.update_index = update;
    {
      double steps_sum = 0.0, tokens_sum = 0.0, correct_sum = 0.0;
      int max_step_tokens = 0;
      int count = 0;
      for (const ToyGroup& group : groups) {
        for (const ToySample& sample : group.samples) {
          steps_sum += static_cast<double>(sample.paragraph_tokens.size());
          tokens_sum += static_cast<double>(sample.token_count);
          correct_sum += sample.correct ? 1.0 : 0.0;
          for (int t : sample.paragraph_tokens) max_step_tokens = std::max(max_step_tokens, t);
          ++count;
        }
      }
      record.mean_steps = steps_sum / count;
      record.mean_tokens = tokens_sum / count;
      record.accuracy = correct_sum / count;
      record.max_step_tokens = max_step_tokens;
    }

    // All-wrong groups carry no reference step count and are dropped before
    // the stop check ever sees them.
    std::vector<const ToyGroup*> scored_groups;
    std::vector<std::vector<double>> scored_rewards;
    for (const ToyGroup& group : groups) {
      if (auto rewards = group_rewards(group, config.reward)) {
        scored_groups.push_back(&group);
        scored_rewards.push_back(std::move(*rewards));
      }
    }

    if (scored_groups.empty()) {
      record.skipped_reason = SkipReason::all_wrong;
      record.mean_reward = 0.0;
      consecutive_stops = 0;
      result.records.push_back(record);
      if (sink) sink(record);
      continue;
    }

    {
      double reward_sum = 0.0;
      int count = 0;
      for (const auto& rewards : scored_rewards) {
        for (double r : rewards) {
          reward_sum += r;
          ++count;
        }
      }
      record.mean_reward = reward_sum / count;
    }

    // Stop check: any paragraph over the length limit freezes this update.
    bool length_exceeded = false;
    for (const ToyGroup* group : scored_groups) {
      for (const ToySample& sample : group->samples) {
        for (int tokens : sample.paragraph_tokens) {
          if (tokens > config.step_length_limit) {
            length_exceeded = true;
            break;
          }
        }
        if (length_exceeded) break;
      }
      if (length_exceeded) break;
    }

    if (length_exceeded) {
      record.skipped_reason = SkipReason::step_length_exceeded;
      if (!result.first_stop_index) result.first_stop_index = update;
      ++consecutive_stops;
      if (consecutive_stops >= config.consecutive_skip_halt) {
        record.halted = true;
        result.halted = true;
      }
      result.records.push_back(record);
      if (sink) sink(record);
      if (result.halted) break;
      continue;
    }
    consecutive_stops = 0;

    // One gradient-descent step on the summed per-group losses.
    std::vector<std::vector<double>> advantages;
    advantages.reserve(scored_rewards.size());
    for (const auto& rewards : scored_rewards) {
      advantages.push_back(normalize_advantages(rewards).values);
    }
    const PolicyGradient grad =
        toy_batch_gradient(policy, reference, scored_groups, advantages,
                           config.temperature, config.grpo);
    for (std::size_t i = 0; i < policy.step_logits.size(); ++i) {
      policy.step_logits[i] -= config.learning_rate * grad.step_logits[i];
    }
    for (std::size_t i = 0; i < policy.verbosity_logits.size(); ++i) {
      policy.verbosity_logits[i] -= config.learning_rate * grad.verbosity_logits[i];
    }
    policy.merge_logit -= config.learning_rate * grad.merge_logit;

    result.records.push_back(record);
    if (sink) sink(record);
  }

  result.final_policy = std::move(policy);
  return result;
}

std::vector<ProblemSpec> default_problem_bank() {
  std::vector<ProblemSpec> bank;
  for (int i = 0; i < 5; ++i) {
    bank.push_back({"prompt-" + std::to_string(i), std::to_string(37 + i), 4, 0.9, 0.15});
  }
  bank.push_back({"prompt-5", "42", 4, 0.35, 0.15});
  return bank;
}

}  // namespace stepwise
