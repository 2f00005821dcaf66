#pragma once

#include <vector>

namespace stepwise {

// Group-normalized advantages: (R - mean) / population-std, all zeros when
// the rewards are (numerically) constant.
struct AdvantageVector {
  std::vector<double> values;
};

AdvantageVector normalize_advantages(const std::vector<double>& rewards);

// Per-token log-likelihoods under the three policy snapshots involved in an
// update: the policy being optimized, the policy that sampled the data, and
// the frozen reference policy.
struct GrpoToken {
  double logp_current = 0.0;
  double logp_old = 0.0;
  double logp_reference = 0.0;
};

struct GrpoResponse {
  std::vector<GrpoToken> tokens;  // t_j = tokens.size() >= 1
  double advantage = 0.0;
};

struct GrpoBatch {
  std::vector<GrpoResponse> responses;
};

struct GrpoConfig {
  double clip_epsilon = 0.2;
  double kl_gamma = 0.001;
};

// Nonnegative divergence estimate between current and reference policies at
// one token: exp(x) - x - 1 with x = logp_reference - logp_current, computed
// as expm1(x) - x so it never dips below zero in floating point.
double kl_estimate(double logp_current, double logp_reference);

// Clipped-surrogate loss with per-response length normalization:
//   loss = -(1/n) sum_j (1/t_j) sum_k [ W_jk - gamma * KL_jk ]
// where ratio = exp(logp_current - logp_old) and
// W = min(ratio * A, clip(ratio, 1-eps, 1+eps) * A).
// Summation order is fixed (responses then tokens, ascending) so results are
// reproducible. Raises NonFiniteInput on NaN/infinite log-probabilities.
double grpo_loss(const GrpoBatch& batch, const GrpoConfig& config);

// d/d(logp_current) of [ W - gamma * KL ] for a single token: the surrogate
// derivative is ratio * A on the unclipped branch (inclusive at the clip
// boundary) and 0 on the clipped branch; the divergence contributes
// -gamma * (1 - exp(logp_reference - logp_current)).
double surrogate_grad_logp_current(const GrpoToken& token, double advantage,
                                   const GrpoConfig& config);

}  // namespace stepwise
