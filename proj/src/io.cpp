#include "stepwise/io.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "stepwise/answer.hpp"
#include "stepwise/errors.hpp"
#include "stepwise/grpo.hpp"

namespace stepwise {
namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool is_blank(const std::string& line) {
  for (char c : line) {
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

json parse_line(const std::string& line, std::size_t line_number) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(line_number, std::string("invalid JSON: ") + e.what());
  }
}

std::string require_string(const json& object, const char* key, std::size_t line_number) {
  if (!object.contains(key) || !object[key].is_string()) {
    throw ParseError(line_number, std::string("missing string field \"") + key + "\"");
  }
  return object[key].get<std::string>();
}

RolloutRecord record_from_json(const json& object, std::size_t line_number) {
  RolloutRecord record;
  record.prompt_id = require_string(object, "prompt_id", line_number);
  if (record.prompt_id.empty()) {
    throw ParseError(line_number, "prompt_id must be nonempty");
  }
  record.response_text = require_string(object, "response_text", line_number);
  if (object.contains("prompt_text")) {
    record.prompt_text = require_string(object, "prompt_text", line_number);
  }
  if (object.contains("gold_answer")) {
    record.gold_answer = require_string(object, "gold_answer", line_number);
  }
  if (object.contains("token_count")) {
    if (!object["token_count"].is_number_integer()) {
      throw ParseError(line_number, "token_count must be an integer");
    }
    record.token_count = object["token_count"].get<int>();
  }
  return record;
}

// Visits each nonblank line of a line-delimited file with its 1-based number.
template <typename Fn>
void for_each_line(const std::string& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (is_blank(line)) continue;
    fn(line, line_number);
  }
}

json steps_to_json(const std::vector<Step>& steps) {
  json array = json::array();
  for (const Step& step : steps) {
    array.push_back({{"index", step.index},
                     {"text", step.text},
                     {"token_count", step.token_count}});
  }
  return array;
}

// Builds the Response for one record line. Stored steps (run_segment output)
// are reused verbatim so re-scoring never drifts from the segmentation pass.
Response response_from_json(const json& object, const RolloutRecord& record,
                            std::size_t line_number, const SegmentationConfig& config,
                            EmbeddingClient* embedder) {
  if (!object.contains("steps")) {
    Response response =
        make_response(record.prompt_id, record.response_text, config, embedder);
    if (record.token_count) response.token_count = *record.token_count;
    return response;
  }
  if (!object["steps"].is_array()) {
    throw ParseError(line_number, "steps must be an array");
  }
  Response response;
  response.prompt_id = record.prompt_id;
  response.raw_text = record.response_text;
  auto [think, answer] = split_regions(response.raw_text);
  response.think_text = std::move(think);
  response.answer_text = std::move(answer);
  response.extracted_answer = extract_answer(response.answer_text);
  for (const json& item : object["steps"]) {
    try {
      Step step;
      step.index = item.at("index").get<int>();
      step.text = item.at("text").get<std::string>();
      step.token_count = item.at("token_count").get<int>();
      response.steps.push_back(std::move(step));
    } catch (const json::exception& e) {
      throw ParseError(line_number, std::string("malformed step entry: ") + e.what());
    }
  }
  response.token_count = record.token_count
                             ? *record.token_count
                             : config.tokenizer(response.raw_text);
  return response;
}

json segmentation_config_json(const SegmentationConfig& config) {
  return {{"strategy", to_string(config.strategy)},
          {"conjunctions", config.conjunctions},
          {"similarity_threshold", config.similarity_threshold},
          {"tokenizer", "whitespace"}};
}

json reward_config_json(const RewardConfig& config) {
  json ablations = json::array();
  for (Ablation flag : config.ablation_flags) ablations.push_back(to_string(flag));
  return {{"beta", config.beta},
          {"token_penalty_weight", config.token_penalty_weight},
          {"ablations", ablations}};
}

json grpo_config_json(const GrpoConfig& config) {
  return {{"clip_epsilon", config.clip_epsilon}, {"kl_gamma", config.kl_gamma}};
}

json train_config_json(const TrainConfig& config) {
  return {{"group_size", config.group_size},
          {"batch_prompts", config.batch_prompts},
          {"temperature", config.temperature},
          {"max_tokens", config.max_tokens},
          {"step_length_limit", config.step_length_limit},
          {"learning_rate", config.learning_rate},
          {"max_updates", config.max_updates},
          {"consecutive_skip_halt", config.consecutive_skip_halt},
          {"seed", config.seed},
          {"grpo", grpo_config_json(config.grpo)},
          {"reward", reward_config_json(config.reward)}};
}

json policy_json(const ToyPolicy& policy) {
  return {{"step_logits", policy.step_logits},
          {"verbosity_logits", policy.verbosity_logits},
          {"verbosity_buckets", policy.verbosity_buckets},
          {"merge_logit", policy.merge_logit}};
}

json problem_json(const ProblemSpec& problem) {
  return {{"id", problem.id},
          {"gold_answer", problem.gold_answer},
          {"required_steps", problem.required_steps},
          {"p_solve", problem.p_solve},
          {"p_guess", problem.p_guess}};
}

json record_json(const TrainRecord& record) {
  json object = {{"update", record.update_index},
                 {"mean_steps", record.mean_steps},
                 {"mean_tokens", record.mean_tokens},
                 {"max_step_tokens", record.max_step_tokens},
                 {"mean_reward", record.mean_reward},
                 {"accuracy", record.accuracy},
                 {"halted", record.halted}};
  if (record.skipped_reason) {
    object["skipped"] = to_string(*record.skipped_reason);
  } else {
    object["skipped"] = nullptr;
  }
  return object;
}

void write_config_sidecar(const std::string& output_path, json config) {
  write_text_atomic(output_path + ".config.json", config.dump(2) + "\n");
}

}  // namespace

std::vector<RolloutRecord> read_rollouts(const std::string& path) {
  std::vector<RolloutRecord> records;
  for_each_line(path, [&](const std::string& line, std::size_t line_number) {
    records.push_back(record_from_json(parse_line(line, line_number), line_number));
  });
  return records;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string temp = path + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + temp);
    out << content;
    if (!out.flush()) throw Error("failed writing file: " + temp);
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) throw Error("cannot rename " + temp + " to " + path + ": " + ec.message());
}

std::vector<ProblemSpec> read_problem_bank(const std::string& path) {
  json parsed;
  try {
    parsed = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError(1, std::string("invalid problem bank JSON: ") + e.what());
  }
  if (!parsed.is_array() || parsed.empty()) {
    throw ParseError(1, "problem bank must be a nonempty JSON array");
  }
  std::vector<ProblemSpec> bank;
  for (const json& item : parsed) {
    try {
      ProblemSpec problem;
      problem.id = item.at("id").get<std::string>();
      problem.gold_answer = item.at("gold_answer").get<std::string>();
      problem.required_steps = item.value("required_steps", problem.required_steps);
      problem.p_solve = item.value("p_solve", problem.p_solve);
      problem.p_guess = item.value("p_guess", problem.p_guess);
      bank.push_back(std::move(problem));
    } catch (const json::exception& e) {
      throw ParseError(1, std::string("malformed problem entry: ") + e.what());
    }
  }
  return bank;
}

void run_segment(const std::string& input_path, const std::string& output_path,
                 const SegmentationConfig& config, EmbeddingClient* embedder) {
  std::string output;
  for_each_line(input_path, [&](const std::string& line, std::size_t line_number) {
    json object = parse_line(line, line_number);
    const RolloutRecord record = record_from_json(object, line_number);
    const Response response =
        make_response(record.prompt_id, record.response_text, config, embedder);
    object["token_count"] = record.token_count.value_or(response.token_count);
    object["step_count"] = count_steps(response);
    object["steps"] = steps_to_json(response.steps);
    output += object.dump();
    output += '\n';
  });
  write_text_atomic(output_path, output);
  write_config_sidecar(output_path, {{"command", "segment"},
                                     {"segmentation", segmentation_config_json(config)}});
}

void run_score(const std::string& input_path, const std::string& output_path,
               const SegmentationConfig& segmentation, const RewardConfig& reward,
               EmbeddingClient* embedder) {
  // Group lines by prompt_id, preserving first-appearance order.
  std::vector<Group> groups;
  std::map<std::string, std::size_t> group_index;
  for_each_line(input_path, [&](const std::string& line, std::size_t line_number) {
    const json object = parse_line(line, line_number);
    const RolloutRecord record = record_from_json(object, line_number);
    Response response =
        response_from_json(object, record, line_number, segmentation, embedder);
    auto [it, inserted] = group_index.try_emplace(record.prompt_id, groups.size());
    if (inserted) {
      Group group;
      group.prompt_id = record.prompt_id;
      group.gold_answer = normalize_answer(record.gold_answer);
      groups.push_back(std::move(group));
    } else if (groups[it->second].gold_answer != normalize_answer(record.gold_answer)) {
      throw ParseError(line_number,
                       "gold_answer differs from earlier records for prompt_id \"" +
                           record.prompt_id + "\"");
    }
    groups[it->second].responses.push_back(std::move(response));
  });

  const AnswerChecker checker = exact_match_checker();
  std::string output;
  for (Group& group : groups) {
    const GroupScore score = score_group(group, reward, checker);
    json line = {{"prompt_id", group.prompt_id}, {"skipped", score.skipped}};
    if (score.s_star) {
      line["s_star"] = *score.s_star;
    } else {
      line["s_star"] = nullptr;
    }
    json responses = json::array();
    std::vector<double> totals;
    for (std::size_t j = 0; j < group.responses.size(); ++j) {
      const RewardBreakdown& breakdown = score.breakdowns[j];
      responses.push_back({{"step_count", count_steps(group.responses[j])},
                           {"token_count", group.responses[j].token_count},
                           {"correct", score.correctness[j] != 0},
                           {"r_acc", breakdown.r_acc},
                           {"r_seg", breakdown.r_seg},
                           {"r_token", breakdown.r_token},
                           {"total", breakdown.total},
                           {"case", to_string(breakdown.case_label)}});
      totals.push_back(breakdown.total);
    }
    line["responses"] = std::move(responses);
    if (!score.skipped) {
      line["advantages"] = normalize_advantages(totals).values;
    }
    output += line.dump();
    output += '\n';
  }
  write_text_atomic(output_path, output);
  write_config_sidecar(output_path,
                       {{"command", "score"},
                        {"segmentation", segmentation_config_json(segmentation)},
                        {"reward", reward_config_json(reward)}});
}

TrainResult run_train_toy(const TrainToyOptions& options) {
  const std::vector<ProblemSpec> problems = options.problems_path
                                                ? read_problem_bank(*options.problems_path)
                                                : default_problem_bank();
  const ToyPolicy policy = ToyPolicy::make_default(
      options.s_max, options.step_slope, options.merge_logit, options.verbosity_buckets);
  validate_policy(policy);
  validate_train_config(options.train, problems);

  std::filesystem::create_directories(options.out_dir);
  const std::filesystem::path dir(options.out_dir);

  json problems_json = json::array();
  for (const ProblemSpec& problem : problems) problems_json.push_back(problem_json(problem));
  write_text_atomic((dir / "config.json").string(),
                    json{{"command", "train-toy"},
                         {"train", train_config_json(options.train)},
                         {"policy",
                          {{"s_max", options.s_max},
                           {"step_slope", options.step_slope},
                           {"merge_logit", options.merge_logit},
                           {"verbosity_buckets", options.verbosity_buckets}}},
                         {"problems", problems_json}}
                            .dump(2) +
                        "\n");

  const std::string records_path = (dir / "records.jsonl").string();
  const std::string records_temp = records_path + ".tmp";
  std::ofstream records(records_temp, std::ios::binary | std::ios::trunc);
  if (!records) throw Error("cannot write file: " + records_temp);
  const RecordSink sink = [&records](const TrainRecord& record) {
    records << record_json(record).dump() << '\n';
  };

  TrainResult result = train(policy, problems, options.train, sink);

  if (!records.flush()) throw Error("failed writing file: " + records_temp);
  records.close();
  std::error_code ec;
  std::filesystem::rename(records_temp, records_path, ec);
  if (ec) {
    throw Error("cannot rename " + records_temp + " to " + records_path + ": " +
                ec.message());
  }

  json summary = {{"halted", result.halted},
                  {"updates", static_cast<int>(result.records.size())},
                  {"initial", policy_json(result.initial_policy)},
                  {"final", policy_json(result.final_policy)}};
  if (result.first_stop_index) {
    summary["first_stop_update"] = *result.first_stop_index;
  } else {
    summary["first_stop_update"] = nullptr;
  }
  write_text_atomic((dir / "policy.json").string(), summary.dump(2) + "\n");
  return result;
}

AesReport run_aes(const std::string& baseline_path, const std::string& model_path,
                  const std::string& output_path, const AesConfig& config) {
  auto read_summary = [](const std::string& path) {
    json parsed;
    try {
      parsed = json::parse(read_file(path));
    } catch (const json::exception& e) {
      throw ParseError(1, std::string("invalid summary JSON: ") + e.what());
    }
    EvalSummary summary;
    try {
      summary.accuracy = parsed.at("accuracy").get<double>();
      summary.mean_length = parsed.at("mean_length").get<double>();
      summary.sample_count = parsed.value("sample_count", 0);
    } catch (const json::exception& e) {
      throw ParseError(1, std::string("summary needs accuracy and mean_length: ") + e.what());
    }
    return summary;
  };

  const EvalSummary baseline = read_summary(baseline_path);
  const EvalSummary model = read_summary(model_path);
  const AesReport report = aes(baseline, model, config);
  write_text_atomic(output_path, json{{"delta_length", report.delta_length},
                                      {"delta_acc", report.delta_acc},
                                      {"score", report.score},
                                      {"score_display", format_fixed2(report.score)}}
                                     .dump(2) +
                                     "\n");
  write_config_sidecar(output_path, {{"command", "aes"},
                                     {"phi", config.phi},
                                     {"eta", config.eta},
                                     {"theta", config.theta},
                                     {"baseline", baseline_path},
                                     {"model", model_path}});
  return report;
}

ProfileReport run_profile(const std::string& input_path, const std::string& output_path,
                          JudgeClient& judge, const ProfilerConfig& config) {
  const std::vector<RolloutRecord> records = read_rollouts(input_path);
  std::vector<Response> responses;
  responses.reserve(records.size());
  const SegmentationConfig segmentation;  // profiling re-splits sentences itself
  for (const RolloutRecord& record : records) {
    responses.push_back(
        make_response(record.prompt_id, record.response_text, segmentation, nullptr));
  }
  const ProfileReport report = profile(responses, judge, config);

  json fractions;
  for (int i = 0; i < kReasoningCategoryCount; ++i) {
    fractions[std::string(display_name(static_cast<ReasoningCategory>(i)))] =
        report.fractions[i];
  }
  write_text_atomic(output_path,
                    json{{"fractions", fractions},
                         {"sentence_count", report.sentence_count},
                         {"unparseable_count", report.unparseable_count}}
                        .dump(2) +
                        "\n");
  write_config_sidecar(output_path,
                       {{"command", "profile"}, {"batch_size", config.batch_size}});
  return report;
}

}  // namespace stepwise
