// Acceptance gate for the step-aware reward pipeline.
//
// Eight independent checks, each printing exactly one PASS/FAIL line with its
// elapsed time; the process exits nonzero when any check fails. Every
// tolerance is pinned next to the check that uses it. The oracles in
// tests/support/oracles.hpp are independent re-derivations, so agreement here
// is two implementations meeting, not one implementation agreeing with
// itself.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stepwise/answer.hpp"
#include "stepwise/embedding.hpp"
#include "stepwise/errors.hpp"
#include "stepwise/evaluation.hpp"
#include "stepwise/grpo.hpp"
#include "stepwise/reward.hpp"
#include "stepwise/rng.hpp"
#include "stepwise/segmentation.hpp"
#include "stepwise/tokenizer.hpp"
#include "stepwise/toy.hpp"
#include "stepwise/trainer.hpp"
#include "stepwise/types.hpp"
#include "support/oracles.hpp"

namespace {

using namespace stepwise;

struct Outcome {
  bool ok = false;
  std::string detail;
};

Outcome pass(std::string detail = "") { return {true, std::move(detail)}; }
Outcome fail(std::string detail) { return {false, std::move(detail)}; }

double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

std::string two_decimals(double x) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << x;
  return out.str();
}

// ---------------------------------------------------------------------------
// 1. The accuracy-efficiency score reproduces its published working examples
//    to within 0.01 and renders the expected two-decimal displays.
// ---------------------------------------------------------------------------
Outcome check_efficiency_score_table() {
  struct Row {
    double base_acc, base_len, model_acc, model_len, expected;
    const char* display;
  };
  const Row rows[] = {
      {91.8, 4053.0, 92.0, 1353.0, 0.672709, "0.67"},
      {91.8, 4053.0, 76.4, 993.0, -0.083784, "-0.08"},
      {91.8, 4053.0, 83.6, 1005.0, 0.305413, "0.31"},
      {91.8, 4053.0, 91.6, 2403.0, 0.396213, "0.40"},
      {53.3, 14839.0, 50.0, 4502.0, 0.387042, "0.39"},
  };
  for (const Row& row : rows) {
    EvalSummary baseline;
    baseline.accuracy = row.base_acc;
    baseline.mean_length = row.base_len;
    EvalSummary model;
    model.accuracy = row.model_acc;
    model.mean_length = row.model_len;
    const AesReport report = aes(baseline, model);
    if (std::fabs(report.score - row.expected) > 0.01) {
      return fail("score " + std::to_string(report.score) + " not within 0.01 of " +
                  std::to_string(row.expected));
    }
    if (format_fixed2(report.score) != row.display) {
      return fail("display " + format_fixed2(report.score) + " != " + row.display);
    }
    const double literal = oracle::aes_literal(row.model_acc, row.model_len,
                                               row.base_acc, row.base_len);
    if (report.score != literal) {
      return fail("score diverges bitwise from the literal formula");
    }
  }
  return pass("5 rows within 0.01, displays exact");
}

// ---------------------------------------------------------------------------
// 2. The four-case group reward agrees exactly with an independent
//    enumeration oracle across every group shape of size 2..4 with step
//    counts 0..6, every correctness pattern, and every reward ablation.
// ---------------------------------------------------------------------------
Response synthetic_response(int step_count, bool correct) {
  Response response;
  response.prompt_id = "g";
  for (int k = 0; k < step_count; ++k) {
    Step step;
    step.index = k;
    step.text = "s";
    step.token_count = 1;
    response.steps.push_back(std::move(step));
  }
  response.token_count = 5;
  response.extracted_answer = correct ? "42" : "7";
  return response;
}

Outcome check_reward_matches_enumeration() {
  const double beta = 0.01;
  struct Arm {
    oracle::RewardFlags flags;
    std::set<Ablation> ablations;
  };
  const std::vector<Arm> arms = {
      {{}, {}},
      {{.zero_correct_reward = true}, {Ablation::disable_correct_reward}},
      {{.sstar_over_all = true}, {Ablation::incorrect_responses_set_Sstar}},
      {{.unmask_brevity = true}, {Ablation::unmask_wrong_brevity}},
      {{.keep_all_wrong = true}, {Ablation::no_skip_all_wrong}},
  };
  const AnswerChecker checker = exact_match_checker();

  long long evaluations = 0;
  for (int n = 2; n <= 4; ++n) {
    std::vector<int> steps(static_cast<std::size_t>(n), 0);
    while (true) {
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        Group group;
        group.prompt_id = "g";
        group.gold_answer = "42";
        std::vector<bool> correct(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
          correct[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
          group.responses.push_back(
              synthetic_response(steps[static_cast<std::size_t>(i)],
                                 correct[static_cast<std::size_t>(i)]));
        }
        for (const Arm& arm : arms) {
          RewardConfig config;
          config.beta = beta;
          config.ablation_flags = arm.ablations;
          const auto expected =
              oracle::reward_totals(steps, correct, beta, arm.flags);
          const GroupScore score = score_group(group, config, checker);
          ++evaluations;
          if (!expected.has_value()) {
            if (!score.skipped) return fail("group not skipped where oracle skips");
            for (const RewardBreakdown& b : score.breakdowns) {
              if (b.total != 0.0 || b.case_label != RewardCase::group_skipped) {
                return fail("skipped group carries a nonzero breakdown");
              }
            }
            continue;
          }
          if (score.skipped) return fail("group skipped where oracle does not skip");
          for (int i = 0; i < n; ++i) {
            const double got = score.breakdowns[static_cast<std::size_t>(i)].total;
            const double want = (*expected)[static_cast<std::size_t>(i)];
            if (got != want) {
              std::ostringstream msg;
              msg << "total mismatch at n=" << n << " i=" << i << ": got " << got
                  << " want " << want;
              return fail(msg.str());
            }
          }
        }
      }
      // Odometer over step counts 0..6 per response.
      int pos = 0;
      while (pos < n && ++steps[static_cast<std::size_t>(pos)] > 6) {
        steps[static_cast<std::size_t>(pos)] = 0;
        ++pos;
      }
      if (pos == n) break;
    }
  }
  return pass(std::to_string(evaluations) + " group evaluations, all exact");
}

// ---------------------------------------------------------------------------
// 3. Group-normalized advantages are invariant under reward shift and
//    positive rescaling, and non-degenerate outputs have mean 0 / std 1.
// ---------------------------------------------------------------------------
Outcome check_advantage_invariance() {
  std::mt19937_64 rng(20240817ULL);
  std::normal_distribution<double> reward_dist(0.0, 5.0);
  std::uniform_int_distribution<int> size_dist(2, 8);
  std::uniform_real_distribution<double> shift_dist(-100.0, 100.0);
  std::uniform_real_distribution<double> scale_dist(0.1, 50.0);
  const double tol = 1e-9;  // pinned: invariance and moment tolerance

  int non_degenerate = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = size_dist(rng);
    std::vector<double> rewards(static_cast<std::size_t>(n));
    for (double& r : rewards) r = reward_dist(rng);
    const double shift = shift_dist(rng);
    const double scale = scale_dist(rng);
    std::vector<double> transformed(rewards.size());
    for (std::size_t i = 0; i < rewards.size(); ++i) {
      transformed[i] = scale * rewards[i] + shift;
    }
    const auto base = normalize_advantages(rewards).values;
    const auto moved = normalize_advantages(transformed).values;
    bool all_zero = true;
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (std::fabs(base[i] - moved[i]) > tol) {
        return fail("shift/scale changed an advantage by more than 1e-9");
      }
      all_zero = all_zero && base[i] == 0.0;
    }
    const auto precise = oracle::advantages_longdouble(rewards);
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (std::fabs(base[i] - precise[i]) > 1e-12) {
        return fail("advantage diverges from the extended-precision oracle");
      }
    }
    if (all_zero) continue;
    ++non_degenerate;
    double mean = 0.0;
    for (double a : base) mean += a;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double a : base) var += (a - mean) * (a - mean);
    var /= static_cast<double>(n);
    if (std::fabs(mean) > tol || std::fabs(var - 1.0) > tol) {
      return fail("normalized advantages are not mean-0 / variance-1");
    }
  }
  if (non_degenerate < 900) {
    return fail("random trials were unexpectedly degenerate");
  }
  return pass("1000 trials, " + std::to_string(non_degenerate) + " non-degenerate");
}

// ---------------------------------------------------------------------------
// 4. The surrogate loss collapses to -mean(advantage) at identity ratios, the
//    per-token divergence estimate is nonnegative everywhere, and the toy
//    policy's analytic gradient matches central finite differences.
// ---------------------------------------------------------------------------
std::vector<double> pack_policy(const ToyPolicy& policy) {
  std::vector<double> x = policy.step_logits;
  x.insert(x.end(), policy.verbosity_logits.begin(), policy.verbosity_logits.end());
  x.push_back(policy.merge_logit);
  return x;
}

ToyPolicy policy_from(const std::vector<double>& x, const ToyPolicy& shape) {
  ToyPolicy policy = shape;
  const std::size_t s = shape.step_logits.size();
  const std::size_t v = shape.verbosity_logits.size();
  policy.step_logits.assign(x.begin(), x.begin() + static_cast<long>(s));
  policy.verbosity_logits.assign(x.begin() + static_cast<long>(s),
                                 x.begin() + static_cast<long>(s + v));
  policy.merge_logit = x[s + v];
  return policy;
}

Outcome check_loss_and_gradient() {
  // (a) Identity ratios and zero divergence: loss == -mean(advantage).
  {
    const std::vector<double> advantages = {1.25, -0.5, 0.0, 2.0, -3.75};
    const std::vector<int> lengths = {1, 2, 3, 2, 1};
    GrpoBatch batch;
    for (std::size_t j = 0; j < advantages.size(); ++j) {
      GrpoResponse response;
      response.advantage = advantages[j];
      for (int k = 0; k < lengths[j]; ++k) {
        response.tokens.push_back({-0.7, -0.7, -0.7});
      }
      batch.responses.push_back(std::move(response));
    }
    const double loss = grpo_loss(batch, {});
    if (loss != 0.2) {
      return fail("identity-ratio loss is not bitwise -mean(advantage)");
    }
  }
  // (b) Divergence nonnegativity over 100000 random gaps (pinned: >= 0.0
  //     exactly, and agreement with extended precision within 1e-12 rel).
  {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> center(-2.0, 1.0);
    std::uniform_real_distribution<double> exponent(-8.0, 1.4771);
    std::bernoulli_distribution negative(0.5);
    for (int trial = 0; trial < 100000; ++trial) {
      const double lc = center(rng);
      const double gap = std::pow(10.0, exponent(rng));
      const double lr = lc + (negative(rng) ? -gap : gap);
      const double kl = kl_estimate(lc, lr);
      if (!(kl >= 0.0)) return fail("divergence estimate dipped below zero");
      const double precise = oracle::kl_longdouble(lc, lr);
      if (std::fabs(kl - precise) > 1e-12 * std::max(1.0, std::fabs(precise))) {
        return fail("divergence estimate drifts from extended precision");
      }
    }
    if (kl_estimate(-1.3, -1.3) != 0.0) {
      return fail("divergence estimate is nonzero at equality");
    }
  }
  // (c) Analytic toy-policy gradient vs central differences of the loss,
  //     at the sampling policy and slightly off-policy.
  //     Pinned: |analytic - fd| <= 1e-6 + 1e-5 * |fd| per coordinate.
  {
    const ToyPolicy sampler = ToyPolicy::make_default(5, 0.4, -1.0, {3, 5});
    const std::vector<ProblemSpec> problems = {
        {"g0", "37", 3, 0.8, 0.2}, {"g1", "41", 2, 0.7, 0.1}};
    Rng rng(11);
    const ToyGroup group0 = sample_group(sampler, sampler, problems[0], 3, 0.9, rng);
    const ToyGroup group1 = sample_group(sampler, sampler, problems[1], 3, 0.9, rng);
    const std::vector<const ToyGroup*> groups = {&group0, &group1};
    const std::vector<std::vector<double>> advantages = {{1.0, -0.5, 0.2},
                                                         {0.3, 0.3, -1.2}};
    const GrpoConfig grpo_config;
    const auto objective = [&](const std::vector<double>& x) {
      return toy_batch_loss(policy_from(x, sampler), sampler, groups, advantages,
                            0.9, grpo_config);
    };

    ToyPolicy off = sampler;
    for (std::size_t i = 0; i < off.step_logits.size(); ++i) {
      off.step_logits[i] += 0.01 * static_cast<double>(i + 1);
    }
    for (double& logit : off.verbosity_logits) logit -= 0.02;
    off.merge_logit += 0.03;

    for (const ToyPolicy& at : {sampler, off}) {
      const PolicyGradient analytic =
          toy_batch_gradient(at, sampler, groups, advantages, 0.9, grpo_config);
      std::vector<double> flat = analytic.step_logits;
      flat.insert(flat.end(), analytic.verbosity_logits.begin(),
                  analytic.verbosity_logits.end());
      flat.push_back(analytic.merge_logit);
      const auto fd = oracle::central_differences(objective, pack_policy(at));
      for (std::size_t i = 0; i < fd.size(); ++i) {
        if (std::fabs(flat[i] - fd[i]) > 1e-6 + 1e-5 * std::fabs(fd[i])) {
          std::ostringstream msg;
          msg << "gradient coordinate " << i << ": analytic " << flat[i]
              << " vs finite-difference " << fd[i];
          return fail(msg.str());
        }
      }
    }
  }
  return pass("identity loss bitwise, 100000 nonnegative divergences, gradients match");
}

// ---------------------------------------------------------------------------
// 5. Desk-scale training shows the two-phase dynamic across 20 seeds: step
//    counts collapse under the step penalty (and only then), the per-step
//    length limit fires, and final accuracy is not significantly degraded
//    relative to the no-step-penalty arm.
// ---------------------------------------------------------------------------
struct RunSummary {
  bool fired = false;
  double step_ratio = 1.0;  // mean steps, last-10 window over first-10 window
  double tail_accuracy = 0.0;
};

RunSummary summarize_run(const TrainResult& result) {
  const auto& records = result.records;
  const std::size_t window = std::min<std::size_t>(10, records.size());
  double init = 0.0, fin = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < window; ++i) init += records[i].mean_steps;
  for (std::size_t i = records.size() - window; i < records.size(); ++i) {
    fin += records[i].mean_steps;
    acc += records[i].accuracy;
  }
  RunSummary summary;
  summary.fired = result.first_stop_index.has_value();
  summary.step_ratio = fin / init;
  summary.tail_accuracy = acc / static_cast<double>(window);
  return summary;
}

Outcome check_two_phase_dynamics() {
  const int seeds = 20;
  std::vector<double> ratios, ratios_no_penalty;
  std::vector<double> accs, accs_no_penalty;
  int fired = 0;
  for (int seed = 0; seed < seeds; ++seed) {
    TrainConfig config;
    config.seed = static_cast<std::uint64_t>(seed);
    const RunSummary with_penalty = summarize_run(
        train(ToyPolicy::make_default(), default_problem_bank(), config));
    fired += with_penalty.fired ? 1 : 0;
    ratios.push_back(with_penalty.step_ratio);
    accs.push_back(with_penalty.tail_accuracy);

    TrainConfig no_penalty = config;
    no_penalty.reward.beta = 0.0;
    const RunSummary without = summarize_run(
        train(ToyPolicy::make_default(), default_problem_bank(), no_penalty));
    ratios_no_penalty.push_back(without.step_ratio);
    accs_no_penalty.push_back(without.tail_accuracy);
  }

  const double ratio_median = oracle::median(ratios);
  const double ratio_median_no_penalty = oracle::median(ratios_no_penalty);
  const auto welch = oracle::welch_t(accs, accs_no_penalty);
  const double critical = oracle::t_critical_two_sided_001(welch.df);

  std::ostringstream detail;
  detail << "step-ratio median " << two_decimals(ratio_median) << " vs "
         << two_decimals(ratio_median_no_penalty) << " without penalty, limit fired "
         << fired << "/20, tail-accuracy t " << two_decimals(welch.t);

  // Pinned: median final/initial step ratio <= 0.60 with the penalty.
  if (ratio_median > 0.60) return fail("steps did not collapse: " + detail.str());
  // Pinned: the length limit must fire in at least 18 of 20 seeds.
  if (fired < 18) return fail("length limit rarely fired: " + detail.str());
  // Without the step penalty the collapse must not occur.
  if (!(ratio_median_no_penalty > ratio_median)) {
    return fail("no-penalty arm compressed as much: " + detail.str());
  }
  // Accuracy must not be significantly below the no-penalty arm
  // (two-sided alpha = 0.01 Welch test; fail only on a significant drop).
  if (welch.t < -critical) {
    return fail("tail accuracy significantly degraded: " + detail.str());
  }
  return pass(detail.str());
}

// ---------------------------------------------------------------------------
// 6. Disabling individual reward mechanisms moves training where the design
//    says it should: no correctness reward or no brevity masking collapses
//    accuracy into degenerate brevity, and keeping all-wrong groups drags
//    accuracy down. Medians over 20 seeds on a stress bank.
// ---------------------------------------------------------------------------
struct ArmResult {
  std::vector<double> accuracy;
  std::vector<double> tokens;
};

Outcome check_ablation_directions() {
  const std::vector<ProblemSpec> bank = {
      {"a0", "11", 3, 0.6, 0.15}, {"a1", "22", 4, 0.6, 0.15},
      {"a2", "33", 5, 0.6, 0.15}, {"a3", "44", 3, 0.6, 0.15},
      {"a4", "55", 4, 0.6, 0.15}, {"a5", "66", 9, 0.1, 0.1},
  };
  const auto run_arm = [&](const std::set<Ablation>& flags) {
    ArmResult result;
    for (int seed = 0; seed < 20; ++seed) {
      TrainConfig config;
      config.seed = static_cast<std::uint64_t>(seed);
      config.max_updates = 2000;
      config.reward.beta = 0.25;
      config.reward.ablation_flags = flags;
      const ToyPolicy policy = ToyPolicy::make_default(10, 0.0, -30.0);
      const TrainResult run = train(policy, bank, config);
      const auto& records = run.records;
      const std::size_t window = std::min<std::size_t>(10, records.size());
      double acc = 0.0, tokens = 0.0;
      for (std::size_t i = records.size() - window; i < records.size(); ++i) {
        acc += records[i].accuracy;
        tokens += records[i].mean_tokens;
      }
      result.accuracy.push_back(acc / static_cast<double>(window));
      result.tokens.push_back(tokens / static_cast<double>(window));
    }
    return result;
  };

  const ArmResult standard = run_arm({});
  const ArmResult no_correct = run_arm({Ablation::disable_correct_reward});
  const ArmResult no_mask = run_arm({Ablation::unmask_wrong_brevity});
  const ArmResult no_skip = run_arm({Ablation::no_skip_all_wrong});

  const double acc_standard = oracle::median(standard.accuracy);
  const double tokens_standard = oracle::median(standard.tokens);
  const double acc_no_correct = oracle::median(no_correct.accuracy);
  const double acc_no_mask = oracle::median(no_mask.accuracy);
  const double tokens_no_mask = oracle::median(no_mask.tokens);
  const double acc_no_skip = oracle::median(no_skip.accuracy);

  std::ostringstream detail;
  detail << "median tail accuracy " << two_decimals(acc_standard) << " full vs "
         << two_decimals(acc_no_correct) << " no-correct-reward, "
         << two_decimals(acc_no_mask) << " unmasked-brevity, "
         << two_decimals(acc_no_skip) << " no-all-wrong-skip; tokens "
         << two_decimals(tokens_standard) << " vs " << two_decimals(tokens_no_mask);

  // Pinned thresholds (medians over 20 seeds, last-10-update windows):
  if (acc_standard < 0.40) return fail("full reward underperformed: " + detail.str());
  if (acc_no_correct > 0.30) {
    return fail("dropping the correctness reward did not hurt: " + detail.str());
  }
  if (!(tokens_no_mask < tokens_standard - 25.0)) {
    return fail("unmasking wrong-brevity did not shorten responses: " + detail.str());
  }
  if (!(acc_no_mask < acc_standard - 0.10)) {
    return fail("unmasking wrong-brevity did not cost accuracy: " + detail.str());
  }
  if (!(acc_no_skip < acc_standard - 0.10)) {
    return fail("keeping all-wrong groups did not cost accuracy: " + detail.str());
  }
  return pass(detail.str());
}

// ---------------------------------------------------------------------------
// 7. Structural segmentation properties over 200 fuzzed documents: paragraph
//    splitting is a fixed point under rejoining, finer strategies never
//    produce fewer steps, similarity merging never produces more, and every
//    step is trimmed with an exact token count.
// ---------------------------------------------------------------------------
Outcome check_segmentation_properties() {
  SegmentationConfig paragraphs;
  SegmentationConfig sentences;
  sentences.strategy = SegmentationStrategy::sentence;
  SegmentationConfig conjunctions;
  conjunctions.strategy = SegmentationStrategy::conjunction;
  SegmentationConfig merged;
  merged.strategy = SegmentationStrategy::similarity_merge;
  HashingEmbedder embedder;
  const Tokenizer tokenizer = default_tokenizer();

  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::string doc = oracle::fuzz_document(seed);
    const auto para = segment(doc, paragraphs);
    const auto sent = segment(doc, sentences);
    const auto conj = segment(doc, conjunctions);
    const auto simi = segment(doc, merged, &embedder);

    if (para.empty()) return fail("fuzz document produced no paragraphs");
    if (sent.size() < para.size()) {
      return fail("sentence split produced fewer steps than paragraphs");
    }
    if (conj.size() < para.size()) {
      return fail("conjunction split produced fewer steps than paragraphs");
    }
    if (simi.size() > para.size() || simi.empty()) {
      return fail("similarity merge changed the step count the wrong way");
    }

    std::string rejoined;
    for (std::size_t i = 0; i < para.size(); ++i) {
      if (i > 0) rejoined += "\n\n";
      rejoined += para[i].text;
    }
    const auto again = segment(rejoined, paragraphs);
    if (again.size() != para.size()) {
      return fail("paragraph split is not a fixed point under rejoining");
    }
    for (std::size_t i = 0; i < para.size(); ++i) {
      if (again[i].text != para[i].text) {
        return fail("paragraph text changed across a rejoin round-trip");
      }
    }

    for (const auto* steps : {&para, &sent, &conj, &simi}) {
      for (const Step& step : *steps) {
        if (step.text.empty() || step.text.front() == ' ' ||
            step.text.back() == ' ' || step.text.front() == '\n' ||
            step.text.back() == '\n') {
          return fail("a step is empty or untrimmed");
        }
        if (step.token_count < 1 || step.token_count != tokenizer(step.text)) {
          return fail("a step token count disagrees with the tokenizer");
        }
      }
    }
  }
  return pass("200 documents, all structural properties hold");
}

// ---------------------------------------------------------------------------
// 8. Skipped updates leave the policy bitwise untouched: an unsolvable bank
//    (every group all-wrong) and an over-length policy (every update stopped
//    by the per-step token limit, halting at the consecutive-skip bound).
// ---------------------------------------------------------------------------
bool same_parameters(const ToyPolicy& a, const ToyPolicy& b) {
  return a.step_logits == b.step_logits && a.verbosity_logits == b.verbosity_logits &&
         a.verbosity_buckets == b.verbosity_buckets && a.merge_logit == b.merge_logit;
}

Outcome check_skips_leave_parameters_untouched() {
  {
    const std::vector<ProblemSpec> unsolvable = {{"aw", "37", 4, 0.0, 0.0}};
    TrainConfig config;
    config.max_updates = 15;
    const TrainResult result =
        train(ToyPolicy::make_default(), unsolvable, config);
    if (result.records.size() != 15) return fail("unsolvable run stopped early");
    for (const TrainRecord& record : result.records) {
      if (record.skipped_reason != SkipReason::all_wrong ||
          record.mean_reward != 0.0 || record.accuracy != 0.0 || record.halted) {
        return fail("an all-wrong update was not skipped cleanly");
      }
    }
    if (result.first_stop_index.has_value() || result.halted) {
      return fail("all-wrong skips were miscounted as length stops");
    }
    if (!same_parameters(result.initial_policy, result.final_policy)) {
      return fail("all-wrong updates moved the policy parameters");
    }
  }
  {
    ToyPolicy oversized;
    oversized.step_logits.assign(10, 0.0);
    oversized.step_logits[9] = 1000.0;  // always draw ten logical steps
    oversized.verbosity_logits = {0.0};
    oversized.verbosity_buckets = {60};
    oversized.merge_logit = 1000.0;  // merge everything into one paragraph
    const std::vector<ProblemSpec> solvable = {{"fs", "37", 4, 1.0, 1.0}};
    TrainConfig config;
    const TrainResult result = train(oversized, solvable, config);
    if (result.records.size() != 50) {
      return fail("stopped run did not halt at the consecutive-skip bound");
    }
    if (!result.halted || result.first_stop_index != 0) {
      return fail("length stop did not register from the first update");
    }
    for (const TrainRecord& record : result.records) {
      if (record.skipped_reason != SkipReason::step_length_exceeded ||
          record.max_step_tokens != 600 || record.accuracy != 1.0 ||
          record.mean_reward != 1.0) {
        return fail("a length-stopped update recorded unexpected telemetry");
      }
    }
    if (!result.records.back().halted) return fail("the final record is not marked halted");
    if (!same_parameters(result.initial_policy, result.final_policy)) {
      return fail("length-stopped updates moved the policy parameters");
    }
  }
  return pass("all-wrong and length-stopped runs left parameters bitwise unchanged");
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    std::function<Outcome()> run;
    double budget_seconds;
  };
  const std::vector<Entry> checks = {
      {"accuracy-efficiency score table", check_efficiency_score_table, 1.0},
      {"four-case reward matches the enumeration oracle",
       check_reward_matches_enumeration, 10.0},
      {"advantage normalization is shift/scale invariant",
       check_advantage_invariance, 5.0},
      {"surrogate loss and analytic gradient", check_loss_and_gradient, 30.0},
      {"two-phase training dynamics across 20 seeds", check_two_phase_dynamics,
       300.0},
      {"reward ablations move outcomes as designed", check_ablation_directions,
       600.0},
      {"segmentation structural properties on fuzzed documents",
       check_segmentation_properties, 10.0},
      {"skipped updates leave parameters untouched",
       check_skips_leave_parameters_untouched, 5.0},
  };

  bool all_ok = true;
  for (const Entry& entry : checks) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = entry.run();
    } catch (const std::exception& e) {
      outcome = fail(std::string("unexpected exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (outcome.ok && seconds > entry.budget_seconds) {
      outcome = fail("exceeded its " + two_decimals(entry.budget_seconds) +
                     "s time budget");
    }
    std::cout << (outcome.ok ? "PASS" : "FAIL") << ": " << entry.name;
    if (!outcome.detail.empty()) std::cout << " [" << outcome.detail << "]";
    std::cout << " (" << two_decimals(seconds) << "s of "
              << two_decimals(entry.budget_seconds) << "s budget)\n";
    all_ok = all_ok && outcome.ok;
  }
  std::cout << (all_ok ? "acceptance: all checks passed"
                       : "acceptance: at least one check FAILED")
            << "\n";
  return all_ok ? 0 : 1;
}
