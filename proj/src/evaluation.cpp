#include "stepwise/evaluation.hpp"

#include <cmath>
#include <cstdio>

#include "stepwise/errors.hpp"

namespace stepwise {

AesReport aes(const EvalSummary& baseline, const EvalSummary& model,
              const AesConfig& config) {
  if (baseline.accuracy == 0.0) {
    throw BaselineDegenerate("baseline accuracy is zero; relative accuracy delta undefined");
  }
  if (baseline.mean_length == 0.0) {
    throw BaselineDegenerate("baseline mean length is zero; relative length delta undefined");
  }
  AesReport report;
  report.delta_length = (baseline.mean_length - model.mean_length) / baseline.mean_length;
  report.delta_acc = (model.accuracy - baseline.accuracy) / baseline.accuracy;
  if (report.delta_acc >= 0.0) {
    report.score = config.phi * report.delta_length + config.eta * report.delta_acc;
  } else {
    report.score =
        config.phi * report.delta_length - config.theta * std::fabs(report.delta_acc);
  }
  return report;
}

EvalSummary summarize(const std::vector<ScoredResponse>& responses) {
  if (responses.empty()) throw EmptyInput("cannot summarize an empty response set");
  EvalSummary summary;
  summary.sample_count = static_cast<int>(responses.size());
  double correct = 0.0;
  double length_sum = 0.0;
  for (const ScoredResponse& response : responses) {
    if (response.correct) correct += 1.0;
    length_sum += response.token_count;
  }
  summary.accuracy = 100.0 * correct / static_cast<double>(responses.size());
  summary.mean_length = length_sum / static_cast<double>(responses.size());
  return summary;
}

std::string format_fixed2(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.2f", value);
  return buffer;
}

}  // namespace stepwise
