#include "stepwise/embedding.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "stepwise/errors.hpp"

namespace stepwise {
namespace {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

// Splits "http://host:port/path" into (host:port, path). Only plain HTTP is
// supported; embedding services in tests and local deployments run unsecured.
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  std::string rest = endpoint;
  static constexpr std::string_view kHttp = "http://";
  if (rest.rfind(kHttp, 0) == 0) {
    rest = rest.substr(kHttp.size());
  } else if (rest.rfind("https://", 0) == 0) {
    throw EmbedderUnavailable("https endpoints are not supported; use http");
  }
  const std::size_t slash = rest.find('/');
  if (slash == std::string::npos) return {"http://" + rest, "/"};
  return {"http://" + rest.substr(0, slash), rest.substr(slash)};
}

}  // namespace

std::vector<std::vector<double>> HashingEmbedder::embed(
    const std::vector<std::string>& texts) {
  std::vector<std::vector<double>> vectors;
  vectors.reserve(texts.size());
  for (const std::string& text : texts) {
    std::vector<double> vec(dimensions_, 0.0);
    std::string word;
    auto flush_word = [&] {
      if (word.empty()) return;
      const std::uint64_t hash = fnv1a64(word);
      const double sign = ((hash >> 32) & 1ULL) ? 1.0 : -1.0;
      vec[hash % static_cast<std::uint64_t>(dimensions_)] += sign;
      word.clear();
    };
    for (char c : text) {
      if (std::isalnum(static_cast<unsigned char>(c))) {
        word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      } else {
        flush_word();
      }
    }
    flush_word();
    double norm = 0.0;
    for (double x : vec) norm += x * x;
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (double& x : vec) x /= norm;
    }
    vectors.push_back(std::move(vec));
  }
  return vectors;
}

HttpEmbeddingClient::HttpEmbeddingClient(Config config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) {
    throw EmbedderUnavailable("embedding endpoint is not configured");
  }
}

HttpEmbeddingClient HttpEmbeddingClient::from_environment() {
  Config config;
  if (const char* endpoint = std::getenv("STEPWISE_EMBED_ENDPOINT")) {
    config.endpoint = endpoint;
  }
  if (const char* key = std::getenv("STEPWISE_EMBED_API_KEY")) config.api_key = key;
  if (const char* model = std::getenv("STEPWISE_EMBED_MODEL")) config.model = model;
  return HttpEmbeddingClient(std::move(config));
}

std::vector<std::vector<double>> HttpEmbeddingClient::embed(
    const std::vector<std::string>& texts) {
  const auto [base, path] = split_endpoint(config_.endpoint);
  httplib::Client client(base);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(60, 0);

  nlohmann::json request{{"input", texts}};
  if (!config_.model.empty()) request["model"] = config_.model;
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }

  auto result = client.Post(path, headers, request.dump(), "application/json");
  if (!result) {
    throw EmbedderUnavailable("embedding request failed: " +
                              httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw EmbedderUnavailable("embedding service returned status " +
                              std::to_string(result->status));
  }
  try {
    const nlohmann::json body = nlohmann::json::parse(result->body);
    std::vector<std::vector<double>> vectors;
    vectors.reserve(texts.size());
    for (const auto& item : body.at("data")) {
      vectors.push_back(item.at("embedding").get<std::vector<double>>());
    }
    if (vectors.size() != texts.size()) {
      throw EmbedderUnavailable("embedding service returned wrong vector count");
    }
    return vectors;
  } catch (const nlohmann::json::exception& e) {
    throw EmbedderUnavailable(std::string("malformed embedding response: ") + e.what());
  }
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) dot += a[i] * b[i];
  for (double x : a) norm_a += x * x;
  for (double x : b) norm_b += x * x;
  if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
  return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

}  // namespace stepwise
