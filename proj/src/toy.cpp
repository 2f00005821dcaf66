#include "stepwise/toy.hpp"

#include <algorithm>
#include <cmath>

#include "stepwise/answer.hpp"
#include "stepwise/errors.hpp"

namespace stepwise {
namespace {

constexpr const char* kFillerWords[] = {
    "we",     "expand", "the",  "expression", "and",  "collect",
    "like",   "terms",  "then", "simplify",   "each", "factor",
    "before", "moving", "on",   "carefully"};
constexpr int kFillerWordCount = static_cast<int>(std::size(kFillerWords));

// The answer sentence is exactly 8 whitespace tokens including the boxed
// value, so every response costs 8 tokens beyond its paragraphs.
std::string answer_sentence(const std::string& value) {
  return "Combining everything above the final answer is \\boxed{" + value + "}.";
}

std::string wrong_answer(const std::string& gold) {
  return std::to_string(std::stoll(gold) + 1);
}

std::vector<double> softmax(const std::vector<double>& logits, double temperature) {
  double max_scaled = logits[0] / temperature;
  for (double l : logits) max_scaled = std::max(max_scaled, l / temperature);
  std::vector<double> probs(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] / temperature - max_scaled);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
  return probs;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

ToyPolicy ToyPolicy::make_default(int s_max, double step_slope, double merge_logit,
                                  std::vector<int> buckets) {
  ToyPolicy policy;
  policy.step_logits.resize(s_max);
  for (int s = 0; s < s_max; ++s) {
    policy.step_logits[s] = step_slope * static_cast<double>(s + 1);
  }
  policy.verbosity_logits.assign(buckets.size(), 0.0);
  policy.verbosity_buckets = std::move(buckets);
  policy.merge_logit = merge_logit;
  return policy;
}

void validate_policy(const ToyPolicy& policy) {
  if (policy.step_logits.empty()) {
    throw ConfigInvalid("policy needs at least one step-count choice");
  }
  if (policy.verbosity_buckets.empty() ||
      policy.verbosity_buckets.size() != policy.verbosity_logits.size()) {
    throw ConfigInvalid("verbosity buckets and logits must align and be nonempty");
  }
  for (int bucket : policy.verbosity_buckets) {
    if (bucket < 1) throw ConfigInvalid("verbosity buckets must be positive word counts");
  }
  for (double l : policy.step_logits) {
    if (!std::isfinite(l)) throw ConfigInvalid("step logits must be finite");
  }
  for (double l : policy.verbosity_logits) {
    if (!std::isfinite(l)) throw ConfigInvalid("verbosity logits must be finite");
  }
  if (!std::isfinite(policy.merge_logit)) {
    throw ConfigInvalid("merge logit must be finite");
  }
}

PolicyDistributions make_distributions(const ToyPolicy& policy, double temperature) {
  PolicyDistributions dists;
  dists.step_probs = softmax(policy.step_logits, temperature);
  dists.verbosity_probs = softmax(policy.verbosity_logits, temperature);
  dists.merge_prob = sigmoid(policy.merge_logit / temperature);
  dists.log_step_probs.resize(dists.step_probs.size());
  for (std::size_t i = 0; i < dists.step_probs.size(); ++i) {
    dists.log_step_probs[i] = std::log(dists.step_probs[i]);
  }
  dists.log_verbosity_probs.resize(dists.verbosity_probs.size());
  for (std::size_t i = 0; i < dists.verbosity_probs.size(); ++i) {
    dists.log_verbosity_probs[i] = std::log(dists.verbosity_probs[i]);
  }
  dists.log_merge_yes = std::log(dists.merge_prob);
  dists.log_merge_no = std::log1p(-dists.merge_prob);
  return dists;
}

ToyTextCache make_text_cache(const std::vector<int>& buckets) {
  ToyTextCache cache;
  cache.fillers.reserve(buckets.size());
  for (int bucket : buckets) {
    std::string filler;
    filler.reserve(static_cast<std::size_t>(bucket) * 8);
    for (int w = 0; w < bucket; ++w) {
      if (w > 0) filler.push_back(' ');
      filler.append(kFillerWords[w % kFillerWordCount]);
    }
    cache.fillers.push_back(std::move(filler));
    cache.bucket_tokens.push_back(bucket);
  }
  return cache;
}

double choice_log_prob(const PolicyDistributions& dists, const Choice& choice) {
  switch (choice.kind) {
    case Choice::Kind::step_count:
      return dists.log_step_probs[choice.value];
    case Choice::Kind::verbosity:
      return dists.log_verbosity_probs[choice.value];
    case Choice::Kind::merge:
      return choice.value != 0 ? dists.log_merge_yes : dists.log_merge_no;
  }
  return 0.0;
}

ToySample sample_response(const PolicyDistributions& dists,
                          const PolicyDistributions& reference_dists,
                          const ProblemSpec& problem, const ToyTextCache& cache,
                          Rng& rng) {
  ToySample sample;

  // Draw order is part of the determinism contract: step count, then the
  // verbosity of every logical step, then every merge decision, then the
  // correctness coin.
  const int step_choice = rng.categorical(dists.step_probs);
  sample.s_logical = step_choice + 1;
  sample.choices.push_back({Choice::Kind::step_count, step_choice});

  sample.verbosity_idx.reserve(sample.s_logical);
  for (int s = 0; s < sample.s_logical; ++s) {
    const int v = rng.categorical(dists.verbosity_probs);
    sample.verbosity_idx.push_back(v);
    sample.choices.push_back({Choice::Kind::verbosity, v});
  }
  sample.merges.reserve(std::max(0, sample.s_logical - 1));
  for (int b = 0; b + 1 < sample.s_logical; ++b) {
    const int merged = rng.bernoulli(dists.merge_prob) ? 1 : 0;
    sample.merges.push_back(merged);
    sample.choices.push_back({Choice::Kind::merge, merged});
  }

  const double p_correct =
      sample.s_logical >= problem.required_steps ? problem.p_solve : problem.p_guess;
  sample.correct = rng.bernoulli(p_correct);

  // Fold merged logical steps into shared paragraphs; token counts add and
  // the paragraph text is the parts joined by single spaces.
  std::vector<std::string> paragraph_texts;
  std::string current_text = cache.fillers[sample.verbosity_idx[0]];
  int current_tokens = cache.bucket_tokens[sample.verbosity_idx[0]];
  for (int s = 1; s < sample.s_logical; ++s) {
    const int bucket_idx = sample.verbosity_idx[s];
    if (sample.merges[s - 1] != 0) {
      current_text.push_back(' ');
      current_text.append(cache.fillers[bucket_idx]);
      current_tokens += cache.bucket_tokens[bucket_idx];
    } else {
      sample.paragraph_tokens.push_back(current_tokens);
      paragraph_texts.push_back(std::move(current_text));
      current_text = cache.fillers[bucket_idx];
      current_tokens = cache.bucket_tokens[bucket_idx];
    }
  }
  sample.paragraph_tokens.push_back(current_tokens);
  paragraph_texts.push_back(std::move(current_text));

  int paragraph_total = 0;
  for (int t : sample.paragraph_tokens) paragraph_total += t;
  sample.token_count = paragraph_total + 8;

  // Log-probabilities of every decision under both snapshots. At sampling
  // time the optimized policy and the data-collecting policy coincide.
  sample.logp_current.reserve(sample.choices.size());
  sample.logp_reference.reserve(sample.choices.size());
  for (const Choice& choice : sample.choices) {
    sample.logp_current.push_back(choice_log_prob(dists, choice));
    sample.logp_reference.push_back(choice_log_prob(reference_dists, choice));
  }
  sample.logp_old = sample.logp_current;

  // Materialize the Response.
  Response& response = sample.response;
  response.prompt_id = problem.id;
  const std::string answer_value =
      sample.correct ? problem.gold_answer : wrong_answer(problem.gold_answer);
  std::string think_text;
  {
    std::size_t reserve = 0;
    for (const std::string& p : paragraph_texts) reserve += p.size() + 2;
    think_text.reserve(reserve);
  }
  for (std::size_t i = 0; i < paragraph_texts.size(); ++i) {
    if (i > 0) think_text.append("\n\n");
    think_text.append(paragraph_texts[i]);
  }
  const std::string answer_text = "\n" + answer_sentence(answer_value);
  response.raw_text.reserve(think_text.size() + answer_text.size() + 16);
  response.raw_text.append("<think>").append(think_text).append("</think>").append(
      answer_text);
  response.think_text = std::move(think_text);
  response.answer_text = answer_text;
  response.extracted_answer = normalize_answer(answer_value);
  response.token_count = sample.token_count;
  response.steps.reserve(paragraph_texts.size());
  for (std::size_t i = 0; i < paragraph_texts.size(); ++i) {
    Step step;
    step.index = static_cast<int>(i);
    step.text = std::move(paragraph_texts[i]);
    step.token_count = sample.paragraph_tokens[i];
    response.steps.push_back(std::move(step));
  }
  return sample;
}

ToyGroup sample_group(const ToyPolicy& policy, const ToyPolicy& reference,
                      const ProblemSpec& problem, int group_size, double temperature,
                      Rng& rng) {
  validate_policy(policy);
  validate_policy(reference);
  const PolicyDistributions dists = make_distributions(policy, temperature);
  const PolicyDistributions reference_dists = make_distributions(reference, temperature);
  const ToyTextCache cache = make_text_cache(policy.verbosity_buckets);
  ToyGroup group;
  group.problem = &problem;
  group.samples.reserve(group_size);
  for (int j = 0; j < group_size; ++j) {
    group.samples.push_back(sample_response(dists, reference_dists, problem, cache, rng));
  }
  return group;
}

Group materialize_group(const ToyGroup& toy_group) {
  Group group;
  group.prompt_id = toy_group.problem->id;
  group.gold_answer = toy_group.problem->gold_answer;
  group.responses.reserve(toy_group.samples.size());
  for (const ToySample& sample : toy_group.samples) {
    group.responses.push_back(sample.response);
  }
  return group;
}

}  // namespace stepwise
