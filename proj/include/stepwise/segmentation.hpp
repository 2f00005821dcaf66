#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stepwise/embedding.hpp"
#include "stepwise/tokenizer.hpp"
#include "stepwise/types.hpp"

namespace stepwise {

enum class SegmentationStrategy {
  paragraph,         // split on runs of two-or-more newlines
  sentence,          // additionally split after . ! ? followed by whitespace
  conjunction,       // additionally start a new step at marker words
  similarity_merge,  // paragraph split, then merge similar adjacent pieces
};

std::string to_string(SegmentationStrategy strategy);
SegmentationStrategy segmentation_strategy_from_string(std::string_view name);

// Marker words used by the conjunction strategy (matched case-insensitively
// as whole words anywhere in a paragraph).
std::vector<std::string> default_conjunctions();

struct SegmentationConfig {
  SegmentationStrategy strategy = SegmentationStrategy::paragraph;
  std::vector<std::string> conjunctions = default_conjunctions();
  double similarity_threshold = 0.5;  // cosine cutoff for similarity_merge
  Tokenizer tokenizer = default_tokenizer();
};

// Splits a raw response into (think_text, answer_text). When a well-formed
// <think>...</think> region exists, think_text is its interior and
// answer_text is everything after the closing tag; otherwise both views are
// the raw text unchanged.
std::pair<std::string, std::string> split_regions(std::string_view raw_text);

// Segments thinking text into steps under the configured strategy. The
// embedder is consulted only by similarity_merge.
std::vector<Step> segment(std::string_view think_text, const SegmentationConfig& config,
                          EmbeddingClient* embedder = nullptr);

// Convenience: split regions, segment the think region, count whole-response
// tokens, and extract the answer.
Response make_response(std::string prompt_id, std::string raw_text,
                       const SegmentationConfig& config,
                       EmbeddingClient* embedder = nullptr);

}  // namespace stepwise
