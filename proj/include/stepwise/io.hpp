#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stepwise/evaluation.hpp"
#include "stepwise/profiler.hpp"
#include "stepwise/reward.hpp"
#include "stepwise/segmentation.hpp"
#include "stepwise/trainer.hpp"

namespace stepwise {

// One line of a rollout file: a single model response to a prompt.
struct RolloutRecord {
  std::string prompt_id;
  std::string prompt_text;
  std::string gold_answer;
  std::string response_text;               // may be empty (scores as incorrect)
  std::optional<int> token_count;          // trusted when precomputed upstream
};

// Reads a line-delimited rollout file. Malformed lines fail fast with a
// ParseError naming the 1-based line; blank lines are ignored.
std::vector<RolloutRecord> read_rollouts(const std::string& path);

// Writes content to path via a temp file and rename, so readers never see a
// half-written file.
void write_text_atomic(const std::string& path, const std::string& content);

// Loads a JSON array of problem definitions for the synthetic trainer.
std::vector<ProblemSpec> read_problem_bank(const std::string& path);

// Each run_* command reads input files, writes its output atomically, and
// drops a `<output>.config.json` sidecar recording the resolved
// configuration, so runs are reproducible from the outputs alone.

// Segments every response and writes the input lines back augmented with
// steps, per-step token counts, and the step count.
void run_segment(const std::string& input_path, const std::string& output_path,
                 const SegmentationConfig& config, EmbeddingClient* embedder = nullptr);

// Groups records by prompt_id and writes one reward report line per group:
// per-response breakdowns, the group's reference step count, the skip flag,
// and normalized advantages. Accepts raw rollouts or run_segment output; any
// stored steps are reused rather than recomputed.
void run_score(const std::string& input_path, const std::string& output_path,
               const SegmentationConfig& segmentation, const RewardConfig& reward,
               EmbeddingClient* embedder = nullptr);

struct TrainToyOptions {
  TrainConfig train;
  // Policy construction knobs (see ToyPolicy::make_default).
  int s_max = 10;
  double step_slope = 0.5;
  double merge_logit = -4.0;
  std::vector<int> verbosity_buckets = {20, 35, 50, 60};
  std::optional<std::string> problems_path;  // default bank when absent
  std::string out_dir;
};

// Runs the synthetic trainer and writes a run directory: config.json,
// records.jsonl (streamed, one record per update), and policy.json holding
// the initial and final policy parameters.
TrainResult run_train_toy(const TrainToyOptions& options);

// Reads two summary files ({"accuracy": percent, "mean_length": tokens}) and
// writes the combined accuracy-efficiency report.
AesReport run_aes(const std::string& baseline_path, const std::string& model_path,
                  const std::string& output_path, const AesConfig& config = {});

// Labels every sentence of every response via the judge and writes the
// aggregated category-frequency report.
ProfileReport run_profile(const std::string& input_path, const std::string& output_path,
                          JudgeClient& judge, const ProfilerConfig& config = {});

}  // namespace stepwise
