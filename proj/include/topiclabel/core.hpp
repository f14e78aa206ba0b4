#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "topiclabel/error.hpp"

namespace topiclabel {

/// Canonical form shared by dataset words and ConceptNet terms: trimmed,
/// ASCII-lowercased, underscores turned into spaces and whitespace runs
/// collapsed to a single space. Throws ErrorCode::EmptyWord when nothing is left.
std::string normalize_word(std::string_view raw);

/// A topic-model output. Words are normalized on construction and keep their
/// input order (the order is the tie-break key for direct labeling).
/// Duplicate words are kept.
class Topic {
 public:
  Topic(std::string id, const std::vector<std::string>& words,
        std::vector<std::string> references = {});

  const std::string& id() const noexcept { return id_; }
  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::vector<std::string>& references() const noexcept { return references_; }

  friend bool operator==(const Topic&, const Topic&) = default;

 private:
  std::string id_;
  std::vector<std::string> words_;
  std::vector<std::string> references_;
};

class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  /// Throws ErrorCode::InvalidVector on an empty or non-finite vector.
  EmbeddingVector(std::vector<double> values, std::string model_id);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t dim() const noexcept { return values_.size(); }
  const std::string& model_id() const noexcept { return model_id_; }

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  std::vector<double> values_;
  std::string model_id_;
};

enum class CandidateSource { TopicWord, GraphNode };

std::string_view to_string(CandidateSource source);
CandidateSource candidate_source_from_string(std::string_view text);

struct ScoredCandidate {
  std::string text;
  double score = 0.0;
  CandidateSource source = CandidateSource::TopicWord;

  friend bool operator==(const ScoredCandidate&, const ScoredCandidate&) = default;
};

struct LabelResult {
  std::string topic_id;
  std::string label;
  double score = 0.0;
  // Sorted by descending score; ties keep the algorithm's candidate order.
  std::vector<ScoredCandidate> candidates;

  friend bool operator==(const LabelResult&, const LabelResult&) = default;
};

}  // namespace topiclabel
