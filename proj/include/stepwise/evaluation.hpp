#pragma once

#include <string>
#include <vector>

namespace stepwise {

// Aggregate accuracy/length statistics for one evaluated model.
struct EvalSummary {
  double accuracy = 0.0;     // percent correct, 0..100
  double mean_length = 0.0;  // mean response length in tokens
  int sample_count = 0;
};

// Weights for the combined efficiency score. Length savings earn phi per
// unit, accuracy gains earn eta, and accuracy losses cost theta — losses are
// penalized harder than gains are rewarded.
struct AesConfig {
  double phi = 1.0;
  double eta = 3.0;
  double theta = 5.0;
};

struct AesReport {
  double delta_length = 0.0;  // fraction of baseline length saved
  double delta_acc = 0.0;     // fractional accuracy change vs baseline
  double score = 0.0;
};

// Combined accuracy-efficiency score of `model` against `baseline`.
// Throws BaselineDegenerate when the baseline has zero accuracy or zero
// mean length (the relative deltas would divide by zero).
AesReport aes(const EvalSummary& baseline, const EvalSummary& model,
              const AesConfig& config = {});

// One response's outcome for summary purposes.
struct ScoredResponse {
  bool correct = false;
  double token_count = 0.0;
};

// Accuracy (percent) and mean length over a set of scored responses.
// Throws EmptyInput on an empty set.
EvalSummary summarize(const std::vector<ScoredResponse>& responses);

// Fixed two-decimal formatting for report tables ("6.7" -> "6.70").
std::string format_fixed2(double value);

}  // namespace stepwise
