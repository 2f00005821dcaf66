#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stepwise/errors.hpp"
#include "stepwise/io.hpp"

namespace {

using namespace stepwise;

// Deterministic offline judge: keyword heuristics standing in for a hosted
// labeling model so the profile command works without network access.
ReasoningCategory keyword_label(const std::string& sentence) {
  std::string lower;
  lower.reserve(sentence.size());
  for (char c : sentence) {
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  auto has = [&lower](const char* needle) {
    return lower.find(needle) != std::string::npos;
  };
  if (has("check") || has("verify") || has("recheck") || has("correct")) {
    return ReasoningCategory::verification_self_correction;
  }
  if (has("alternativ") || has("another way") || has("instead") || has("other approach")) {
    return ReasoningCategory::exploring_alternatives;
  }
  if (has("hmm") || has("okay") || has("well,") || has("anyway")) {
    return ReasoningCategory::non_substantive;
  }
  for (char c : sentence) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      return ReasoningCategory::productive_elaboration_calculation;
    }
  }
  if (has("calculat") || has("comput") || has("=")) {
    return ReasoningCategory::productive_elaboration_calculation;
  }
  return ReasoningCategory::pivotal_reasoning;
}

std::unique_ptr<EmbeddingClient> pick_embedder(const SegmentationConfig& config) {
  if (config.strategy != SegmentationStrategy::similarity_merge) return nullptr;
  if (std::getenv("STEPWISE_EMBED_ENDPOINT") != nullptr) {
    return std::make_unique<HttpEmbeddingClient>(HttpEmbeddingClient::from_environment());
  }
  return std::make_unique<HashingEmbedder>();
}

std::unique_ptr<JudgeClient> pick_judge(bool offline) {
  if (!offline && std::getenv("STEPWISE_JUDGE_ENDPOINT") != nullptr) {
    return std::make_unique<HttpJudgeClient>(HttpJudgeClient::from_environment());
  }
  return std::make_unique<MockJudge>(keyword_label);
}

// Maps library errors onto the documented exit codes:
// 0 success, 1 usage/config, 2 data, 3 external service.
template <typename Fn>
int run_guarded(Fn&& fn) {
  try {
    fn();
    return 0;
  } catch (const ConfigInvalid& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const EmbedderUnavailable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const JudgeUnavailable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stepwise: step-aware reward shaping for reasoning traces"};
  app.require_subcommand(1);

  // ---- segment ----
  std::string seg_input, seg_output;
  std::string seg_strategy = "paragraph";
  double seg_threshold = 0.5;
  std::vector<std::string> seg_conjunctions;
  auto* segment_cmd =
      app.add_subcommand("segment", "Split rollout responses into reasoning steps");
  segment_cmd->add_option("-i,--input", seg_input, "Rollout JSONL file")->required();
  segment_cmd->add_option("-o,--output", seg_output, "Step-annotated JSONL output")
      ->required();
  segment_cmd->add_option("--strategy", seg_strategy,
                          "paragraph | sentence | conjunction | similarity-merge");
  segment_cmd->add_option("--similarity-threshold", seg_threshold,
                          "Cosine cutoff for similarity-merge");
  segment_cmd
      ->add_option("--conjunctions", seg_conjunctions,
                   "Marker words for the conjunction strategy")
      ->delimiter(',');

  // ---- score ----
  std::string score_input, score_output;
  std::string score_strategy = "paragraph";
  double score_threshold = 0.5;
  double score_beta = 0.01;
  double score_token_weight = 0.0;
  std::vector<std::string> score_ablations;
  auto* score_cmd =
      app.add_subcommand("score", "Compute group rewards and advantages");
  score_cmd->add_option("-i,--input", score_input, "Rollout or segmented JSONL file")
      ->required();
  score_cmd->add_option("-o,--output", score_output, "Reward report JSONL output")
      ->required();
  score_cmd->add_option("--strategy", score_strategy,
                        "Segmentation strategy for raw input lines");
  score_cmd->add_option("--similarity-threshold", score_threshold,
                        "Cosine cutoff for similarity-merge");
  score_cmd->add_option("--beta", score_beta, "Step-penalty weight");
  score_cmd->add_option("--token-penalty-weight", score_token_weight,
                        "Token-length penalty weight");
  score_cmd->add_option("--ablation", score_ablations,
                        "Reward mechanism to disable (repeatable)");

  // ---- train-toy ----
  TrainToyOptions toy;
  std::string toy_problems;
  std::vector<std::string> toy_ablations;
  auto* train_cmd = app.add_subcommand(
      "train-toy", "Run the synthetic policy trainer and write a run directory");
  train_cmd->add_option("-o,--out-dir", toy.out_dir, "Run directory")->required();
  train_cmd->add_option("--seed", toy.train.seed, "Sampling seed");
  train_cmd->add_option("--updates", toy.train.max_updates, "Maximum updates");
  train_cmd->add_option("--batch", toy.train.batch_prompts, "Prompts per update");
  train_cmd->add_option("--group-size", toy.train.group_size,
                        "Responses sampled per prompt");
  train_cmd->add_option("--beta", toy.train.reward.beta, "Step-penalty weight");
  train_cmd->add_option("--token-penalty-weight",
                        toy.train.reward.token_penalty_weight,
                        "Token-length penalty weight");
  train_cmd->add_option("--lr", toy.train.learning_rate, "Learning rate");
  train_cmd->add_option("--temperature", toy.train.temperature, "Sampling temperature");
  train_cmd->add_option("--step-limit", toy.train.step_length_limit,
                        "Per-step token ceiling for the stop check");
  train_cmd->add_option("--halt-after", toy.train.consecutive_skip_halt,
                        "Consecutive stop-skips before halting");
  train_cmd->add_option("--max-steps", toy.s_max, "Largest sampleable step count");
  train_cmd->add_option("--step-slope", toy.step_slope,
                        "Initial tilt of the step-count logits");
  train_cmd->add_option("--merge-init", toy.merge_logit, "Initial merge logit");
  train_cmd->add_option("--buckets", toy.verbosity_buckets, "Verbosity buckets (words)")
      ->delimiter(',');
  train_cmd->add_option("--problems", toy_problems,
                        "JSON array of problem definitions (default: built-in bank)");
  train_cmd->add_option("--ablation", toy_ablations,
                        "Reward mechanism to disable (repeatable)");

  // ---- aes ----
  std::string aes_baseline, aes_model, aes_output;
  AesConfig aes_config;
  auto* aes_cmd = app.add_subcommand(
      "aes", "Accuracy-efficiency score of a model summary against a baseline");
  aes_cmd->add_option("--baseline", aes_baseline, "Baseline summary JSON file")
      ->required();
  aes_cmd->add_option("--model", aes_model, "Model summary JSON file")->required();
  aes_cmd->add_option("-o,--output", aes_output, "Report JSON output")->required();
  aes_cmd->add_option("--phi", aes_config.phi, "Length-saving weight");
  aes_cmd->add_option("--eta", aes_config.eta, "Accuracy-gain weight");
  aes_cmd->add_option("--theta", aes_config.theta, "Accuracy-loss weight");

  // ---- profile ----
  std::string profile_input, profile_output;
  ProfilerConfig profiler_config;
  bool profile_offline = false;
  auto* profile_cmd = app.add_subcommand(
      "profile", "Label reasoning sentences by category and aggregate frequencies");
  profile_cmd->add_option("-i,--input", profile_input, "Rollout JSONL file")->required();
  profile_cmd->add_option("-o,--output", profile_output, "Profile report JSON output")
      ->required();
  profile_cmd->add_option("--batch-size", profiler_config.batch_size,
                          "Sentences per judge request");
  profile_cmd->add_flag("--offline-judge", profile_offline,
                        "Use the built-in keyword judge even if an endpoint is set");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (app.got_subcommand(segment_cmd)) {
    return run_guarded([&] {
      SegmentationConfig config;
      config.strategy = segmentation_strategy_from_string(seg_strategy);
      config.similarity_threshold = seg_threshold;
      if (!seg_conjunctions.empty()) config.conjunctions = seg_conjunctions;
      const auto embedder = pick_embedder(config);
      run_segment(seg_input, seg_output, config, embedder.get());
      std::cout << "wrote " << seg_output << "\n";
    });
  }

  if (app.got_subcommand(score_cmd)) {
    return run_guarded([&] {
      SegmentationConfig segmentation;
      segmentation.strategy = segmentation_strategy_from_string(score_strategy);
      segmentation.similarity_threshold = score_threshold;
      RewardConfig reward;
      reward.beta = score_beta;
      reward.token_penalty_weight = score_token_weight;
      for (const std::string& name : score_ablations) {
        reward.ablation_flags.insert(ablation_from_string(name));
      }
      const auto embedder = pick_embedder(segmentation);
      run_score(score_input, score_output, segmentation, reward, embedder.get());
      std::cout << "wrote " << score_output << "\n";
    });
  }

  if (app.got_subcommand(train_cmd)) {
    return run_guarded([&] {
      if (!toy_problems.empty()) toy.problems_path = toy_problems;
      for (const std::string& name : toy_ablations) {
        toy.train.reward.ablation_flags.insert(ablation_from_string(name));
      }
      const TrainResult result = run_train_toy(toy);
      double tail_steps = 0.0;
      const std::size_t tail =
          std::min<std::size_t>(10, result.records.size());
      for (std::size_t i = result.records.size() - tail; i < result.records.size(); ++i) {
        tail_steps += result.records[i].mean_steps;
      }
      if (tail > 0) tail_steps /= static_cast<double>(tail);
      std::cout << "updates: " << result.records.size() << "\n"
                << "halted: " << (result.halted ? "true" : "false") << "\n";
      if (result.first_stop_index) {
        std::cout << "first_stop_update: " << *result.first_stop_index << "\n";
      }
      std::cout << "tail_mean_steps: " << tail_steps << "\n"
                << "wrote " << toy.out_dir << "\n";
    });
  }

  if (app.got_subcommand(aes_cmd)) {
    return run_guarded([&] {
      const AesReport report = run_aes(aes_baseline, aes_model, aes_output, aes_config);
      std::cout << "score: " << format_fixed2(report.score)
                << " (delta_length " << report.delta_length << ", delta_acc "
                << report.delta_acc << ")\n"
                << "wrote " << aes_output << "\n";
    });
  }

  if (app.got_subcommand(profile_cmd)) {
    return run_guarded([&] {
      const auto judge = pick_judge(profile_offline);
      const ProfileReport report =
          run_profile(profile_input, profile_output, *judge, profiler_config);
      std::cout << format_profile(report) << "sentences: " << report.sentence_count
                << " (unparseable: " << report.unparseable_count << ")\n"
                << "wrote " << profile_output << "\n";
    });
  }

  std::cerr << "error: no subcommand selected\n";
  return 1;
}
