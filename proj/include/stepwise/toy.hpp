#pragma once

#include <string>
#include <vector>

#include "stepwise/rng.hpp"
#include "stepwise/types.hpp"

namespace stepwise {

// One synthetic problem. Correctness is a two-level step function of the
// sampled logical step count: responses reasoning for at least
// required_steps logical steps solve with probability p_solve, shorter ones
// fall back to the guessing floor p_guess (p_guess <= p_solve keeps the
// model nondecreasing in steps).
struct ProblemSpec {
  std::string id;
  std::string gold_answer;  // decimal integer string
  int required_steps = 4;
  double p_solve = 0.9;
  double p_guess = 0.15;
};

// Synthetic reasoning policy with three independent heads:
//   - a categorical over logical step counts 1..S_max,
//   - a categorical over per-step verbosity buckets (words per step),
//   - a Bernoulli merge propensity deciding, per step boundary, whether the
//     next logical step is emitted into the same paragraph.
struct ToyPolicy {
  std::vector<double> step_logits;       // index s-1 holds the logit for s steps
  std::vector<double> verbosity_logits;  // aligned with verbosity_buckets
  std::vector<int> verbosity_buckets;    // words per logical step
  double merge_logit = -4.0;

  // Desk-scale default: ten step choices with a gentle upward tilt (verbose
  // initial policy), four verbosity buckets, merging initially rare.
  static ToyPolicy make_default(int s_max = 10, double step_slope = 0.5,
                                double merge_logit = -4.0,
                                std::vector<int> buckets = {20, 35, 50, 60});
};

void validate_policy(const ToyPolicy& policy);

// Sampling distributions at a given temperature.
struct PolicyDistributions {
  std::vector<double> step_probs;
  std::vector<double> verbosity_probs;
  double merge_prob = 0.0;
  std::vector<double> log_step_probs;
  std::vector<double> log_verbosity_probs;
  double log_merge_yes = 0.0;
  double log_merge_no = 0.0;
};

PolicyDistributions make_distributions(const ToyPolicy& policy, double temperature);

// One policy decision made while sampling a response.
struct Choice {
  enum class Kind { step_count, verbosity, merge };
  Kind kind;
  int value;  // chosen index for categoricals, 0/1 for merge
};

// Everything the trainer needs about one sampled response. The materialized
// Response carries the paragraph-separated text; the numeric fields mirror it
// exactly (paragraph token counts add up under merging).
struct ToySample {
  int s_logical = 0;                // logical steps drawn
  std::vector<int> verbosity_idx;   // one bucket index per logical step
  std::vector<int> merges;          // one 0/1 per step boundary
  bool correct = false;
  std::vector<int> paragraph_tokens;
  int token_count = 0;
  std::vector<Choice> choices;          // all policy decisions, in draw order
  std::vector<double> logp_current;     // per choice, sampling policy
  std::vector<double> logp_old;         // per choice, identical at sample time
  std::vector<double> logp_reference;   // per choice, frozen reference policy
  Response response;
};

// Cached filler text so materialization is a concatenation of prebuilt
// word runs rather than per-word string work.
struct ToyTextCache {
  std::vector<std::string> fillers;  // one per verbosity bucket
  std::vector<int> bucket_tokens;    // word count of each filler
};

ToyTextCache make_text_cache(const std::vector<int>& buckets);

// Draws one response: step count, per-step verbosity, merge decisions, then
// the correctness coin. Materializes the paragraph text, the answer sentence
// (8 words including \boxed{...}), and the log-probabilities of every
// decision under both the sampling policy and the reference policy.
ToySample sample_response(const PolicyDistributions& dists,
                          const PolicyDistributions& reference_dists,
                          const ProblemSpec& problem, const ToyTextCache& cache,
                          Rng& rng);

// A group of samples for one problem plus its materialized Group.
struct ToyGroup {
  const ProblemSpec* problem = nullptr;
  std::vector<ToySample> samples;
};

ToyGroup sample_group(const ToyPolicy& policy, const ToyPolicy& reference,
                      const ProblemSpec& problem, int group_size,
                      double temperature, Rng& rng);

// Builds the materialized Group view (prompt id, gold answer, responses).
Group materialize_group(const ToyGroup& toy_group);

// Log-probability of one decision under the given distributions.
double choice_log_prob(const PolicyDistributions& dists, const Choice& choice);

}  // namespace stepwise
