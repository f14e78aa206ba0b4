#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "topiclabel/core.hpp"
#include "topiclabel/embedding.hpp"
#include "topiclabel/graph.hpp"

namespace topiclabel {

/// Orders candidates by descending score; equal scores keep input order.
/// The first candidate becomes the label.
LabelResult rank_candidates(const std::string& topic_id, const std::vector<std::string>& texts,
                            const std::vector<double>& scores, CandidateSource source);

/// Direct similarity labeling: the topic word closest (cosine) to the
/// embedding of the whole topic sentence. Ties go to the earliest word.
LabelResult dsl(const Topic& topic, Embedder& embedder);

/// Graph-enhanced labeling over an already expanded graph. The topic
/// embedding comes from the topic words only; every graph node is a
/// candidate, ties broken by (hop, term).
LabelResult gel_on_graph(const Topic& topic, const KnowledgeGraph& graph, Embedder& embedder);

/// Expands the topic words through `source`, then labels with gel_on_graph.
LabelResult gel(const Topic& topic, Embedder& embedder, const ExpansionConfig& expansion, ConceptSource& source);

/// {"topic_id","label","score","candidates":[{"text","score","source"}]} on one line.
std::string to_json_line(const LabelResult& result);
/// Inverse of to_json_line. Throws ParseError.
LabelResult label_result_from_json(std::string_view line);

}  // namespace topiclabel
