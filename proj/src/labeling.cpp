#include "topiclabel/labeling.hpp"

#include <algorithm>
#include <numeric>

#include "json.hpp"
#include "topiclabel/kernels.hpp"

namespace topiclabel {

LabelResult rank_candidates(const std::string& topic_id, const std::vector<std::string>& texts,
                            const std::vector<double>& scores, CandidateSource source) {
  if (texts.empty() || texts.size() != scores.size()) {
    throw Error(ErrorCode::EmptyGraph, "no candidates to rank for topic '" + topic_id + "'");
  }
  std::vector<std::size_t> order(texts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return scores[x] > scores[y]; });

  LabelResult result;
  result.topic_id = topic_id;
  result.candidates.reserve(order.size());
  for (auto i : order) result.candidates.push_back({texts[i], scores[i], source});
  result.label = result.candidates.front().text;
  result.score = result.candidates.front().score;
  return result;
}

LabelResult dsl(const Topic& topic, Embedder& embedder) {
  const auto topic_vec = embedder.embed_topic(topic);
  const auto word_vecs = embedder.embed_texts(topic.words());
  const auto scores = kernels::score_candidates(topic_vec, word_vecs);
  return rank_candidates(topic.id(), topic.words(), scores, CandidateSource::TopicWord);
}

LabelResult gel_on_graph(const Topic& topic, const KnowledgeGraph& graph, Embedder& embedder) {
  const auto nodes = candidate_nodes(graph);
  if (nodes.empty()) throw Error(ErrorCode::EmptyGraph, "graph for topic '" + topic.id() + "' has no nodes");
  const auto topic_vec = embedder.embed_topic(topic);
  const auto node_vecs = embedder.embed_texts(nodes);
  const auto scores = kernels::score_candidates(topic_vec, node_vecs);
  return rank_candidates(topic.id(), nodes, scores, CandidateSource::GraphNode);
}

LabelResult gel(const Topic& topic, Embedder& embedder, const ExpansionConfig& expansion, ConceptSource& source) {
  const auto graph = expand_graph(topic.words(), expansion, source);
  return gel_on_graph(topic, graph, embedder);
}

std::string to_json_line(const LabelResult& result) {
  nlohmann::ordered_json candidates = nlohmann::ordered_json::array();
  for (const auto& c : result.candidates) {
    candidates.push_back({{"text", c.text}, {"score", c.score}, {"source", to_string(c.source)}});
  }
  nlohmann::ordered_json obj{{"topic_id", result.topic_id},
                             {"label", result.label},
                             {"score", result.score},
                             {"candidates", std::move(candidates)}};
  return obj.dump();
}

LabelResult label_result_from_json(std::string_view line) {
  try {
    const auto obj = nlohmann::json::parse(line);
    LabelResult r;
    r.topic_id = obj.at("topic_id").get<std::string>();
    r.label = obj.at("label").get<std::string>();
    r.score = obj.at("score").get<double>();
    for (const auto& c : obj.value("candidates", nlohmann::json::array())) {
      r.candidates.push_back({c.at("text").get<std::string>(), c.at("score").get<double>(),
                              candidate_source_from_string(c.at("source").get<std::string>())});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("label result: ") + e.what());
  }
}

}  // namespace topiclabel
