#include "stepwise/profiler.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "stepwise/errors.hpp"
#include "stepwise/evaluation.hpp"
#include "stepwise/segmentation.hpp"

namespace stepwise {
namespace {

constexpr std::array<std::string_view, kReasoningCategoryCount> kDisplayNames = {
    "Pivotal Reasoning",
    "Productive Elaboration & Calculation",
    "Exploring Alternatives",
    "Verification & Self-Correction",
    "Non-Substantive Statements",
};

constexpr std::array<std::string_view, kReasoningCategoryCount> kDefinitions = {
    "Core steps that directly advance the solution.",
    "Supporting explanations or detailed arithmetic.",
    "Consideration of different methods or perspectives.",
    "In-line checks or corrections of prior steps.",
    "Remarks that do not contribute to the logical solution path.",
};

std::string trim(std::string_view text) {
  std::size_t begin = 0, end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return std::string(text.substr(begin, end - begin));
}

// Canonical form for label comparison: lowercase, '&' spelled out, whitespace
// runs collapsed, trailing period dropped.
std::string normalize_label(std::string_view label) {
  std::string out;
  bool pending_space = false;
  for (char c : label) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    if (c == '&') {
      out += "and";
    } else {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!out.empty() && out.back() == '.') out.pop_back();
  return out;
}

std::string single_line(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

std::vector<std::string> split_sentences(const Response& response) {
  SegmentationConfig config;
  config.strategy = SegmentationStrategy::sentence;
  std::vector<std::string> sentences;
  for (Step& step : segment(response.think_text, config)) {
    sentences.push_back(std::move(step.text));
  }
  return sentences;
}

std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  std::string rest = endpoint;
  static constexpr std::string_view kHttp = "http://";
  if (rest.rfind(kHttp, 0) == 0) {
    rest = rest.substr(kHttp.size());
  } else if (rest.rfind("https://", 0) == 0) {
    throw JudgeUnavailable("https endpoints are not supported; use http");
  }
  const std::size_t slash = rest.find('/');
  if (slash == std::string::npos) return {"http://" + rest, "/"};
  return {"http://" + rest.substr(0, slash), rest.substr(slash)};
}

}  // namespace

std::string_view display_name(ReasoningCategory category) {
  return kDisplayNames[static_cast<int>(category)];
}

std::string_view category_definition(ReasoningCategory category) {
  return kDefinitions[static_cast<int>(category)];
}

std::optional<ReasoningCategory> category_from_label(std::string_view label) {
  const std::string normalized = normalize_label(label);
  for (int i = 0; i < kReasoningCategoryCount; ++i) {
    if (normalized == normalize_label(kDisplayNames[i])) {
      return static_cast<ReasoningCategory>(i);
    }
  }
  return std::nullopt;
}

std::string build_judge_prompt(const std::vector<std::string>& sentences) {
  if (sentences.empty()) {
    throw EmptyInput("judge prompt needs at least one sentence");
  }
  std::ostringstream out;
  out << "Label each numbered sentence with exactly one of these categories:\n\n";
  for (int i = 0; i < kReasoningCategoryCount; ++i) {
    out << "- " << kDisplayNames[i] << ": " << kDefinitions[i] << "\n";
  }
  out << "\nSENTENCES\n";
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    out << (i + 1) << ". " << single_line(sentences[i]) << "\n";
  }
  out << "END\n\n";
  out << "Answer with one line per sentence and nothing else:\n";
  out << "LABELS\n";
  out << "<number>: <category name>\n";
  out << "END\n";
  return out.str();
}

std::string build_judge_prompt(const Response& response) {
  const std::vector<std::string> sentences = split_sentences(response);
  if (sentences.empty()) {
    throw EmptyInput("response has no sentences to label");
  }
  return build_judge_prompt(sentences);
}

std::vector<std::optional<ReasoningCategory>> parse_judge_reply(
    const std::string& reply, int expected_count) {
  std::vector<std::optional<ReasoningCategory>> labels(
      static_cast<std::size_t>(expected_count));
  std::istringstream stream(reply);
  std::string line;
  bool in_block = false;
  while (std::getline(stream, line)) {
    const std::string trimmed = trim(line);
    if (!in_block) {
      if (trimmed == "LABELS") in_block = true;
      continue;
    }
    if (trimmed == "END") break;
    const std::size_t colon = trimmed.find(':');
    if (colon == std::string::npos) continue;
    int index = 0;
    try {
      index = std::stoi(trimmed.substr(0, colon));
    } catch (const std::exception&) {
      continue;
    }
    if (index < 1 || index > expected_count) continue;
    if (auto category = category_from_label(trimmed.substr(colon + 1))) {
      labels[static_cast<std::size_t>(index - 1)] = *category;
    }
  }
  return labels;
}

ProfileReport profile(const std::vector<Response>& responses, JudgeClient& judge,
                      const ProfilerConfig& config) {
  if (config.batch_size < 1) throw ConfigInvalid("profiler batch_size must be positive");
  if (responses.empty()) throw EmptyInput("profile needs at least one response");

  std::vector<std::string> sentences;
  for (const Response& response : responses) {
    for (std::string& sentence : split_sentences(response)) {
      sentences.push_back(std::move(sentence));
    }
  }
  if (sentences.empty()) throw EmptyInput("responses contain no sentences to label");

  std::array<long long, kReasoningCategoryCount> counts{};
  int unparseable = 0;
  for (std::size_t start = 0; start < sentences.size();
       start += static_cast<std::size_t>(config.batch_size)) {
    const std::size_t stop =
        std::min(sentences.size(), start + static_cast<std::size_t>(config.batch_size));
    const std::vector<std::string> chunk(sentences.begin() + start,
                                         sentences.begin() + stop);
    const std::string reply = judge.complete(build_judge_prompt(chunk));
    const auto labels = parse_judge_reply(reply, static_cast<int>(chunk.size()));
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      if (labels[i]) {
        ++counts[static_cast<int>(*labels[i])];
        continue;
      }
      const std::string retry_reply =
          judge.complete(build_judge_prompt(std::vector<std::string>{chunk[i]}));
      const auto retry = parse_judge_reply(retry_reply, 1);
      if (retry[0]) {
        ++counts[static_cast<int>(*retry[0])];
      } else {
        ++counts[static_cast<int>(ReasoningCategory::non_substantive)];
        ++unparseable;
      }
    }
  }

  ProfileReport report;
  report.sentence_count = static_cast<int>(sentences.size());
  report.unparseable_count = unparseable;
  for (int i = 0; i < kReasoningCategoryCount; ++i) {
    report.fractions[i] =
        static_cast<double>(counts[i]) / static_cast<double>(sentences.size());
  }
  return report;
}

std::string format_profile(const ProfileReport& report) {
  std::string out;
  for (int i = 0; i < kReasoningCategoryCount; ++i) {
    out += kDisplayNames[i];
    out += ": ";
    out += format_fixed2(100.0 * report.fractions[i]);
    out += "%\n";
  }
  return out;
}

std::string MockJudge::complete(const std::string& prompt) {
  std::istringstream stream(prompt);
  std::string line;
  bool in_block = false;
  std::string reply = "LABELS\n";
  while (std::getline(stream, line)) {
    const std::string trimmed = trim(line);
    if (!in_block) {
      if (trimmed == "SENTENCES") in_block = true;
      continue;
    }
    if (trimmed == "END") break;
    const std::size_t dot = trimmed.find(". ");
    if (dot == std::string::npos) continue;
    int index = 0;
    try {
      index = std::stoi(trimmed.substr(0, dot));
    } catch (const std::exception&) {
      continue;
    }
    const std::string sentence = trimmed.substr(dot + 2);
    reply += std::to_string(index);
    reply += ": ";
    reply += display_name(labeler_(sentence));
    reply += "\n";
  }
  reply += "END\n";
  return reply;
}

HttpJudgeClient::HttpJudgeClient(Config config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) {
    throw JudgeUnavailable("judge endpoint is not configured");
  }
}

HttpJudgeClient HttpJudgeClient::from_environment() {
  Config config;
  if (const char* endpoint = std::getenv("STEPWISE_JUDGE_ENDPOINT")) {
    config.endpoint = endpoint;
  }
  if (const char* key = std::getenv("STEPWISE_JUDGE_API_KEY")) config.api_key = key;
  if (const char* model = std::getenv("STEPWISE_JUDGE_MODEL")) config.model = model;
  return HttpJudgeClient(std::move(config));
}

std::string HttpJudgeClient::complete(const std::string& prompt) {
  const auto [base, path] = split_endpoint(config_.endpoint);
  httplib::Client client(base);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(120, 0);

  nlohmann::json request{
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
  if (!config_.model.empty()) request["model"] = config_.model;
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }

  auto result = client.Post(path, headers, request.dump(), "application/json");
  if (!result) {
    throw JudgeUnavailable("judge request failed: " +
                           httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw JudgeUnavailable("judge service returned status " +
                           std::to_string(result->status));
  }
  try {
    const nlohmann::json body = nlohmann::json::parse(result->body);
    return body.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw JudgeUnavailable(std::string("malformed judge response: ") + e.what());
  }
}

}  // namespace stepwise
