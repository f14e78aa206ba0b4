#include "topiclabel/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "json.hpp"
#include "topiclabel/kernels.hpp"
#include "topiclabel/parallel.hpp"

namespace topiclabel {

using nlohmann::json;
using nlohmann::ordered_json;

ScoreTriple ScoreTriple::from_precision_recall(double precision, double recall) {
  const double denom = precision + recall;
  return {precision, recall, denom == 0.0 ? 0.0 : 2.0 * precision * recall / denom};
}

std::string_view to_string(EvalMode mode) { return mode == EvalMode::Cosine ? "cosine" : "bertscore"; }

EvalMode eval_mode_from_string(std::string_view text) {
  if (text == "cosine") return EvalMode::Cosine;
  if (text == "bertscore") return EvalMode::BertScore;
  throw Error(ErrorCode::InvalidConfig, "unknown evaluation mode '" + std::string(text) + "'");
}

double cosine_eval(const std::string& predicted, const std::string& gold, Embedder& embedder) {
  const auto v = embedder.embed_texts({predicted, gold});
  return cosine(v[0], v[1]);
}

ScoreTriple token_bertscore(std::span<const EmbeddingVector> candidate_tokens,
                            std::span<const EmbeddingVector> reference_tokens) {
  if (candidate_tokens.empty() || reference_tokens.empty()) {
    throw Error(ErrorCode::EmptyTokens, "BERTScore needs at least one token on each side");
  }
  const auto sim = kernels::pairwise_cosine(candidate_tokens, reference_tokens);

  double precision = 0.0;
  for (std::size_t r = 0; r < sim.rows; ++r) {
    double best = sim.at(r, 0);
    for (std::size_t c = 1; c < sim.cols; ++c) best = std::max(best, sim.at(r, c));
    precision += best;
  }
  double recall = 0.0;
  for (std::size_t c = 0; c < sim.cols; ++c) {
    double best = sim.at(0, c);
    for (std::size_t r = 1; r < sim.rows; ++r) best = std::max(best, sim.at(r, c));
    recall += best;
  }
  return ScoreTriple::from_precision_recall(precision / static_cast<double>(sim.rows),
                                            recall / static_cast<double>(sim.cols));
}

std::vector<std::string> tokenize_label(std::string_view label) {
  std::vector<std::string> tokens;
  std::istringstream in{std::string(label)};
  for (std::string tok; in >> tok;) tokens.push_back(std::move(tok));
  return tokens;
}

ScoreTriple label_bertscore(const std::string& candidate, const std::string& reference, Embedder& embedder) {
  const auto cand = tokenize_label(candidate);
  const auto ref = tokenize_label(reference);
  if (cand.empty() || ref.empty()) throw Error(ErrorCode::EmptyTokens, "label has no tokens");
  std::vector<std::string> all = cand;
  all.insert(all.end(), ref.begin(), ref.end());
  const auto vecs = embedder.embed_texts(all);
  std::span<const EmbeddingVector> v(vecs);
  return token_bertscore(v.first(cand.size()), v.subspan(cand.size()));
}

ReferenceMatch multi_reference_best(const std::string& candidate, const std::vector<std::string>& references,
                                    const ReferenceScorer& scorer) {
  if (references.empty()) throw Error(ErrorCode::EmptyReferences, "no references for '" + candidate + "'");
  ReferenceMatch best{references.front(), 0, scorer(candidate, references.front())};
  for (std::size_t i = 1; i < references.size(); ++i) {
    const double s = scorer(candidate, references[i]);
    if (s > best.score) best = {references[i], i, s};
  }
  return best;
}

// ---------------------------------------------------------------------------

void finalize_means(EvalReport& report) {
  report.mean_cosine = report.mean_precision = report.mean_recall = report.mean_f1 = 0.0;
  if (report.per_topic.empty()) return;
  const auto n = static_cast<double>(report.per_topic.size());
  if (report.mode == EvalMode::Cosine) {
    double sum = 0.0;
    for (const auto& t : report.per_topic) sum += t.score;
    report.mean_cosine = sum / n;
    return;
  }
  double p = 0.0, r = 0.0, f = 0.0;
  for (const auto& t : report.per_topic) {
    p += t.triple->precision;
    r += t.triple->recall;
    f += t.triple->f1;
  }
  report.mean_precision = p / n;
  report.mean_recall = r / n;
  report.mean_f1 = f / n;
}

namespace {

std::map<std::string, const Topic*, std::less<>> index_topics(const std::vector<Topic>& topics) {
  std::map<std::string, const Topic*, std::less<>> by_id;
  for (const auto& t : topics) by_id.emplace(t.id(), &t);
  return by_id;
}

const Topic& resolve(const std::map<std::string, const Topic*, std::less<>>& by_id, const std::string& topic_id) {
  auto it = by_id.find(topic_id);
  if (it == by_id.end()) throw Error(ErrorCode::TopicMismatch, "result for unknown topic '" + topic_id + "'");
  if (it->second->references().empty()) {
    throw Error(ErrorCode::MissingReferences, "topic '" + topic_id + "' has no reference labels");
  }
  return *it->second;
}

}  // namespace

EvalReport evaluate_corpus(const std::vector<LabelResult>& results, const std::vector<Topic>& topics, EvalMode mode,
                           Embedder& embedder, std::size_t workers) {
  const auto by_id = index_topics(topics);
  for (const auto& r : results) resolve(by_id, r.topic_id);

  EvalReport report;
  report.mode = mode;
  report.per_topic.resize(results.size());
  parallel_for_each_index(results.size(), workers, [&](std::size_t i) {
    const auto& result = results[i];
    const auto& topic = resolve(by_id, result.topic_id);
    TopicScore& out = report.per_topic[i];
    out.topic_id = result.topic_id;
    out.predicted = result.label;

    if (mode == EvalMode::Cosine) {
      auto best = multi_reference_best(result.label, topic.references(),
                                       [&](const std::string& c, const std::string& ref) {
                                         return cosine_eval(c, ref, embedder);
                                       });
      out.best_reference = best.reference;
      out.score = best.score;
      return;
    }
    std::map<std::string, ScoreTriple, std::less<>> triples;
    auto best = multi_reference_best(result.label, topic.references(),
                                     [&](const std::string& c, const std::string& ref) {
                                       auto it = triples.find(ref);
                                       if (it == triples.end()) {
                                         it = triples.emplace(ref, label_bertscore(c, ref, embedder)).first;
                                       }
                                       return it->second.f1;
                                     });
    out.best_reference = best.reference;
    out.score = best.score;
    out.triple = triples.at(best.reference);
  });
  finalize_means(report);
  return report;
}

std::string EvalReport::to_json() const {
  ordered_json doc;
  doc["mode"] = std::string(to_string(mode));
  doc["topics"] = per_topic.size();
  auto& rows = doc["per_topic"] = ordered_json::array();
  for (const auto& t : per_topic) {
    ordered_json row{{"topic_id", t.topic_id},
                     {"predicted", t.predicted},
                     {"best_reference", t.best_reference},
                     {"score", t.score}};
    if (t.triple) {
      row["precision"] = t.triple->precision;
      row["recall"] = t.triple->recall;
      row["f1"] = t.triple->f1;
    }
    rows.push_back(std::move(row));
  }
  if (mode == EvalMode::Cosine) {
    doc["mean_cosine"] = mean_cosine;
  } else {
    doc["mean_precision"] = mean_precision;
    doc["mean_recall"] = mean_recall;
    doc["mean_f1"] = mean_f1;
  }
  return doc.dump(2) + "\n";
}

namespace {

std::string fit(const std::string& s, std::size_t width) {
  if (s.size() <= width) return s + std::string(width - s.size(), ' ');
  return s.substr(0, width - 1) + "~";
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%8.3f", v);
  return buf;
}

}  // namespace

std::string EvalReport::to_table() const {
  std::ostringstream out;
  const bool cos = mode == EvalMode::Cosine;
  std::string header = fit("topic", 16) + " " + fit("predicted", 24) + " " + fit("best reference", 28);
  header += cos ? "   cosine" : "     prec   recall       f1";
  out << header << "\n" << std::string(header.size(), '-') << "\n";
  for (const auto& t : per_topic) {
    out << fit(t.topic_id, 16) << " " << fit(t.predicted, 24) << " " << fit(t.best_reference, 28);
    if (cos) {
      out << " " << num(t.score);
    } else {
      out << " " << num(t.triple->precision) << " " << num(t.triple->recall) << " " << num(t.triple->f1);
    }
    out << "\n";
  }
  out << std::string(header.size(), '-') << "\n";
  out << fit("mean (" + std::to_string(per_topic.size()) + " topics)", 70);
  if (cos) {
    out << " " << num(mean_cosine);
  } else {
    out << " " << num(mean_precision) << " " << num(mean_recall) << " " << num(mean_f1);
  }
  out << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------

std::vector<ExternalPair> make_external_pairs(const std::vector<LabelResult>& results,
                                              const std::vector<Topic>& topics) {
  const auto by_id = index_topics(topics);
  std::vector<ExternalPair> pairs;
  for (const auto& r : results) {
    const auto& topic = resolve(by_id, r.topic_id);
    for (std::size_t i = 0; i < topic.references().size(); ++i) {
      pairs.push_back({r.topic_id + "#" + std::to_string(i), r.topic_id, r.label, topic.references()[i]});
    }
  }
  return pairs;
}

std::string external_pairs_json(const std::vector<ExternalPair>& pairs) {
  ordered_json doc;
  auto& arr = doc["pairs"] = ordered_json::array();
  for (const auto& p : pairs) arr.push_back({{"id", p.id}, {"candidate", p.candidate}, {"reference", p.reference}});
  return doc.dump(2) + "\n";
}

EvalReport ingest_external_scores(const std::vector<ExternalPair>& pairs, std::string_view scores_json) {
  std::map<std::string, ScoreTriple, std::less<>> by_id;
  try {
    const json doc = json::parse(scores_json);
    for (const auto& s : doc.at("scores")) {
      by_id.insert_or_assign(s.at("id").get<std::string>(),
                             ScoreTriple{s.at("precision").get<double>(), s.at("recall").get<double>(),
                                         s.at("f1").get<double>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("external scores: ") + e.what());
  }

  EvalReport report;
  report.mode = EvalMode::BertScore;
  for (std::size_t i = 0; i < pairs.size();) {
    const auto& topic_id = pairs[i].topic_id;
    std::vector<std::string> refs;
    std::vector<ScoreTriple> triples;
    for (; i < pairs.size() && pairs[i].topic_id == topic_id; ++i) {
      auto it = by_id.find(pairs[i].id);
      if (it == by_id.end()) throw Error(ErrorCode::ParseError, "no external score for pair '" + pairs[i].id + "'");
      refs.push_back(pairs[i].reference);
      triples.push_back(it->second);
    }
    std::size_t k = 0;
    auto best = multi_reference_best(pairs[i - 1].candidate, refs,
                                     [&](const std::string&, const std::string&) { return triples[k++].f1; });
    report.per_topic.push_back({topic_id, pairs[i - 1].candidate, best.reference, best.score, triples[best.index]});
  }
  finalize_means(report);
  return report;
}

}  // namespace topiclabel
