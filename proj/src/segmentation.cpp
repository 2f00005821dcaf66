#include "stepwise/segmentation.hpp"

#include <cctype>

#include "stepwise/answer.hpp"
#include "stepwise/errors.hpp"

namespace stepwise {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

char to_lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

// Word characters for whole-word conjunction matching. Hyphen counts so that
// "double-check" is a single word whose "check" suffix does not match alone.
bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '-' || c == '_';
}

std::string_view trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && is_space(text[begin])) ++begin;
  while (end > begin && is_space(text[end - 1])) --end;
  return text.substr(begin, end - begin);
}

// Splits on runs of two-or-more newline characters, trims each piece, drops
// empties.
std::vector<std::string> split_paragraphs(std::string_view text) {
  std::vector<std::string> pieces;
  std::size_t piece_start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '\n' && i + 1 < text.size() && text[i + 1] == '\n') {
      const std::string_view piece = trim(text.substr(piece_start, i - piece_start));
      if (!piece.empty()) pieces.emplace_back(piece);
      while (i < text.size() && text[i] == '\n') ++i;
      piece_start = i;
    } else {
      ++i;
    }
  }
  const std::string_view tail = trim(text.substr(piece_start));
  if (!tail.empty()) pieces.emplace_back(tail);
  return pieces;
}

// Splits one paragraph after every sentence terminator (., !, ?) that is
// followed by whitespace.
std::vector<std::string> split_sentences(std::string_view paragraph) {
  std::vector<std::string> pieces;
  std::size_t start = 0;
  for (std::size_t i = 0; i + 1 < paragraph.size(); ++i) {
    const char c = paragraph[i];
    if ((c == '.' || c == '!' || c == '?') && is_space(paragraph[i + 1])) {
      const std::string_view piece = trim(paragraph.substr(start, i + 1 - start));
      if (!piece.empty()) pieces.emplace_back(piece);
      start = i + 1;
    }
  }
  const std::string_view tail = trim(paragraph.substr(start));
  if (!tail.empty()) pieces.emplace_back(tail);
  return pieces;
}

bool matches_word_at(std::string_view text, std::size_t pos, std::string_view word) {
  if (pos + word.size() > text.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (to_lower(text[pos + i]) != to_lower(word[i])) return false;
  }
  const bool boundary_before = pos == 0 || !is_word_char(text[pos - 1]);
  const bool boundary_after =
      pos + word.size() == text.size() || !is_word_char(text[pos + word.size()]);
  return boundary_before && boundary_after;
}

// Starts a new piece at every whole-word occurrence of a marker.
std::vector<std::string> split_at_markers(std::string_view paragraph,
                                          const std::vector<std::string>& markers) {
  std::vector<std::string> pieces;
  std::size_t start = 0;
  for (std::size_t i = 0; i < paragraph.size(); ++i) {
    if (i == start) continue;  // a marker at the piece start opens nothing new
    for (const std::string& marker : markers) {
      if (matches_word_at(paragraph, i, marker)) {
        const std::string_view piece = trim(paragraph.substr(start, i - start));
        if (!piece.empty()) pieces.emplace_back(piece);
        start = i;
        break;
      }
    }
  }
  const std::string_view tail = trim(paragraph.substr(start));
  if (!tail.empty()) pieces.emplace_back(tail);
  return pieces;
}

// Greedy left-to-right merge of adjacent paragraphs whose original
// embeddings reach the similarity threshold.
std::vector<std::string> merge_similar(const std::vector<std::string>& paragraphs,
                                       const SegmentationConfig& config,
                                       EmbeddingClient* embedder) {
  if (paragraphs.size() < 2) return paragraphs;
  if (embedder == nullptr) {
    throw EmbedderUnavailable("similarity_merge requires an embedding client");
  }
  std::vector<std::vector<double>> vectors;
  try {
    vectors = embedder->embed(paragraphs);
  } catch (const EmbedderUnavailable&) {
    throw;
  } catch (const std::exception& e) {
    throw EmbedderUnavailable(std::string("embedding call failed: ") + e.what());
  }
  if (vectors.size() != paragraphs.size()) {
    throw EmbedderUnavailable("embedding count does not match input count");
  }
  std::vector<std::string> merged;
  merged.push_back(paragraphs[0]);
  for (std::size_t i = 1; i < paragraphs.size(); ++i) {
    const double similarity = cosine_similarity(vectors[i - 1], vectors[i]);
    if (similarity >= config.similarity_threshold) {
      merged.back().append("\n\n").append(paragraphs[i]);
    } else {
      merged.push_back(paragraphs[i]);
    }
  }
  return merged;
}

std::vector<Step> to_steps(const std::vector<std::string>& pieces,
                           const Tokenizer& tokenizer) {
  std::vector<Step> steps;
  steps.reserve(pieces.size());
  for (const std::string& piece : pieces) {
    Step step;
    step.index = static_cast<int>(steps.size());
    step.text = piece;
    step.token_count = tokenizer(piece);
    steps.push_back(std::move(step));
  }
  return steps;
}

}  // namespace

std::string to_string(SegmentationStrategy strategy) {
  switch (strategy) {
    case SegmentationStrategy::paragraph: return "paragraph";
    case SegmentationStrategy::sentence: return "sentence";
    case SegmentationStrategy::conjunction: return "conjunction";
    case SegmentationStrategy::similarity_merge: return "similarity_merge";
  }
  return "paragraph";
}

SegmentationStrategy segmentation_strategy_from_string(std::string_view name) {
  if (name == "paragraph") return SegmentationStrategy::paragraph;
  if (name == "sentence") return SegmentationStrategy::sentence;
  if (name == "conjunction") return SegmentationStrategy::conjunction;
  if (name == "similarity_merge" || name == "similarity-merge") {
    return SegmentationStrategy::similarity_merge;
  }
  throw ConfigInvalid("unknown segmentation strategy: " + std::string(name));
}

std::vector<std::string> default_conjunctions() {
  return {"wait",        "alternatively", "but",  "however", "alternative",
          "check",       "double-check",  "hmm",  "okay",    "maybe"};
}

std::pair<std::string, std::string> split_regions(std::string_view raw_text) {
  static constexpr std::string_view kOpen = "<think>";
  static constexpr std::string_view kClose = "</think>";
  const std::size_t open = raw_text.find(kOpen);
  if (open != std::string_view::npos) {
    const std::size_t body = open + kOpen.size();
    const std::size_t close = raw_text.find(kClose, body);
    if (close != std::string_view::npos) {
      return {std::string(raw_text.substr(body, close - body)),
              std::string(raw_text.substr(close + kClose.size()))};
    }
  }
  return {std::string(raw_text), std::string(raw_text)};
}

std::vector<Step> segment(std::string_view think_text, const SegmentationConfig& config,
                          EmbeddingClient* embedder) {
  const std::vector<std::string> paragraphs = split_paragraphs(think_text);
  std::vector<std::string> pieces;
  switch (config.strategy) {
    case SegmentationStrategy::paragraph:
      pieces = paragraphs;
      break;
    case SegmentationStrategy::sentence:
      for (const std::string& paragraph : paragraphs) {
        for (std::string& sentence : split_sentences(paragraph)) {
          pieces.push_back(std::move(sentence));
        }
      }
      break;
    case SegmentationStrategy::conjunction:
      if (config.conjunctions.empty()) {
        throw ConfigInvalid("conjunction strategy requires a nonempty marker list");
      }
      for (const std::string& paragraph : paragraphs) {
        for (std::string& piece : split_at_markers(paragraph, config.conjunctions)) {
          pieces.push_back(std::move(piece));
        }
      }
      break;
    case SegmentationStrategy::similarity_merge:
      pieces = merge_similar(paragraphs, config, embedder);
      break;
  }
  return to_steps(pieces, config.tokenizer);
}

Response make_response(std::string prompt_id, std::string raw_text,
                       const SegmentationConfig& config, EmbeddingClient* embedder) {
  Response response;
  response.prompt_id = std::move(prompt_id);
  response.raw_text = std::move(raw_text);
  auto [think_text, answer_text] = split_regions(response.raw_text);
  response.think_text = std::move(think_text);
  response.answer_text = std::move(answer_text);
  response.steps = segment(response.think_text, config, embedder);
  response.token_count = config.tokenizer(response.raw_text);
  response.extracted_answer = extract_answer(response.answer_text);
  return response;
}

}  // namespace stepwise
