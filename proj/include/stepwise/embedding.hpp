#pragma once

#include <memory>
#include <string>
#include <vector>

namespace stepwise {

// Maps a batch of texts to fixed-dimension real vectors.
class EmbeddingClient {
 public:
  virtual ~EmbeddingClient() = default;
  virtual std::vector<std::vector<double>> embed(
      const std::vector<std::string>& texts) = 0;
};

// Deterministic offline embedder: signed feature hashing over lowercased
// alphanumeric words, L2-normalized. Texts sharing words land close in
// cosine; disjoint texts land near orthogonal.
class HashingEmbedder : public EmbeddingClient {
 public:
  explicit HashingEmbedder(int dimensions = 64) : dimensions_(dimensions) {}
  std::vector<std::vector<double>> embed(
      const std::vector<std::string>& texts) override;

 private:
  int dimensions_;
};

// HTTP-backed embedder speaking the common JSON embeddings shape:
// request {"model": ..., "input": [texts]} ->
// response {"data": [{"embedding": [...]}, ...]}.
// Raises EmbedderUnavailable on transport, status, or shape problems.
class HttpEmbeddingClient : public EmbeddingClient {
 public:
  struct Config {
    std::string endpoint;  // e.g. "http://127.0.0.1:8080/v1/embeddings"
    std::string api_key;   // optional bearer token
    std::string model;     // optional model name forwarded verbatim
  };

  explicit HttpEmbeddingClient(Config config);

  // Reads STEPWISE_EMBED_ENDPOINT / STEPWISE_EMBED_API_KEY /
  // STEPWISE_EMBED_MODEL. Raises EmbedderUnavailable when the endpoint is
  // unset.
  static HttpEmbeddingClient from_environment();

  std::vector<std::vector<double>> embed(
      const std::vector<std::string>& texts) override;

 private:
  Config config_;
};

// Cosine similarity; either side with zero norm compares as 0.
double cosine_similarity(const std::vector<double>& a,
                         const std::vector<double>& b);

}  // namespace stepwise
