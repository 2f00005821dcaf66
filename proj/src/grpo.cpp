#include "stepwise/grpo.hpp"

#include <algorithm>
#include <cmath>

#include "stepwise/errors.hpp"

namespace stepwise {

AdvantageVector normalize_advantages(const std::vector<double>& rewards) {
  const std::size_t n = rewards.size();
  AdvantageVector result;
  result.values.assign(n, 0.0);
  if (n == 0) return result;

  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(n);

  double variance = 0.0;
  for (double r : rewards) variance += (r - mean) * (r - mean);
  variance /= static_cast<double>(n);

  const double sd = std::sqrt(variance);
  if (sd < 1e-8) return result;  // constant group: no signal
  for (std::size_t i = 0; i < n; ++i) result.values[i] = (rewards[i] - mean) / sd;
  return result;
}

double kl_estimate(double logp_current, double logp_reference) {
  const double x = logp_reference - logp_current;
  return std::expm1(x) - x;
}

double grpo_loss(const GrpoBatch& batch, const GrpoConfig& config) {
  if (batch.responses.empty()) throw EmptyInput("loss over an empty batch");
  double acc = 0.0;
  for (const GrpoResponse& response : batch.responses) {
    if (response.tokens.empty()) throw EmptyInput("response with no tokens");
    double inner = 0.0;
    for (const GrpoToken& token : response.tokens) {
      if (!std::isfinite(token.logp_current) || !std::isfinite(token.logp_old) ||
          !std::isfinite(token.logp_reference)) {
        throw NonFiniteInput("log-probability is NaN or infinite");
      }
      const double ratio = std::exp(token.logp_current - token.logp_old);
      const double clipped = std::clamp(ratio, 1.0 - config.clip_epsilon,
                                        1.0 + config.clip_epsilon);
      const double surrogate = std::min(ratio * response.advantage,
                                        clipped * response.advantage);
      inner += surrogate -
               config.kl_gamma * kl_estimate(token.logp_current, token.logp_reference);
    }
    acc += inner / static_cast<double>(response.tokens.size());
  }
  return -acc / static_cast<double>(batch.responses.size());
}

double surrogate_grad_logp_current(const GrpoToken& token, double advantage,
                                   const GrpoConfig& config) {
  const double ratio = std::exp(token.logp_current - token.logp_old);
  const bool unclipped = advantage >= 0.0 ? ratio <= 1.0 + config.clip_epsilon
                                          : ratio >= 1.0 - config.clip_epsilon;
  const double surrogate_grad = unclipped ? ratio * advantage : 0.0;
  const double kl_grad = 1.0 - std::exp(token.logp_reference - token.logp_current);
  return surrogate_grad - config.kl_gamma * kl_grad;
}

}  // namespace stepwise
