#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topiclabel/core.hpp"
#include "topiclabel/embedding.hpp"

namespace topiclabel {

struct ScoreTriple {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  /// f1 is the harmonic mean, 0 when precision + recall is 0.
  static ScoreTriple from_precision_recall(double precision, double recall);

  friend bool operator==(const ScoreTriple&, const ScoreTriple&) = default;
};

enum class EvalMode { Cosine, BertScore };

std::string_view to_string(EvalMode mode);
EvalMode eval_mode_from_string(std::string_view text);

/// cosine(embed(predicted), embed(gold)).
double cosine_eval(const std::string& predicted, const std::string& gold, Embedder& embedder);

/// Greedy token matching without idf weighting or baseline rescaling.
/// Precision averages, over candidate tokens, the best cosine to any
/// reference token; recall does the same from the reference side.
ScoreTriple token_bertscore(std::span<const EmbeddingVector> candidate_tokens,
                            std::span<const EmbeddingVector> reference_tokens);

/// Whitespace tokenization used for label strings.
std::vector<std::string> tokenize_label(std::string_view label);

/// token_bertscore over whitespace tokens, each embedded on its own.
ScoreTriple label_bertscore(const std::string& candidate, const std::string& reference, Embedder& embedder);

struct ReferenceMatch {
  std::string reference;
  std::size_t index = 0;
  double score = 0.0;
};

using ReferenceScorer = std::function<double(const std::string& candidate, const std::string& reference)>;

/// Highest scorer(candidate, reference) over the references; ties go to the
/// earliest reference.
ReferenceMatch multi_reference_best(const std::string& candidate, const std::vector<std::string>& references,
                                    const ReferenceScorer& scorer);

struct TopicScore {
  std::string topic_id;
  std::string predicted;
  std::string best_reference;
  double score = 0.0;  // cosine, or f1 in bertscore mode
  std::optional<ScoreTriple> triple;
};

struct EvalReport {
  EvalMode mode = EvalMode::Cosine;
  std::vector<TopicScore> per_topic;
  double mean_cosine = 0.0;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_f1 = 0.0;

  std::string to_json() const;
  /// Fixed-width table, one row per topic and a closing mean row.
  std::string to_table() const;
};

/// Fills the means from per_topic (plain arithmetic means, input order).
void finalize_means(EvalReport& report);

/// Scores every result against its topic's references (multi-reference max)
/// and averages. Topics are scored on up to `workers` threads; the report
/// keeps result order.
EvalReport evaluate_corpus(const std::vector<LabelResult>& results, const std::vector<Topic>& topics, EvalMode mode,
                           Embedder& embedder, std::size_t workers = 1);

// External BERTScore hand-off: pairs go out as
//   {"pairs": [{"id", "candidate", "reference"}]}
// and scores come back as
//   {"scores": [{"id", "precision", "recall", "f1"}]}.
struct ExternalPair {
  std::string id;  // "<topic_id>#<reference index>"
  std::string topic_id;
  std::string candidate;
  std::string reference;
};

std::vector<ExternalPair> make_external_pairs(const std::vector<LabelResult>& results,
                                              const std::vector<Topic>& topics);
std::string external_pairs_json(const std::vector<ExternalPair>& pairs);
EvalReport ingest_external_scores(const std::vector<ExternalPair>& pairs, std::string_view scores_json);

}  // namespace topiclabel
