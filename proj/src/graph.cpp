#include "topiclabel/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

#include "json.hpp"
#include "topiclabel/parallel.hpp"

namespace topiclabel {

using nlohmann::json;
using nlohmann::ordered_json;

void ExpansionConfig::validate() const {
  if (max_hops < 1) throw Error(ErrorCode::InvalidConfig, "max_hops must be at least 1");
  if (per_term_edge_limit == 0 || per_term_edge_limit > kMaxConceptLimit) {
    throw Error(ErrorCode::InvalidConfig, "per-term edge limit must be in [1, 1000]");
  }
  if (max_nodes == 0) throw Error(ErrorCode::InvalidConfig, "max_nodes must be positive");
  if (query_concurrency == 0) throw Error(ErrorCode::InvalidConfig, "query concurrency must be positive");
}

KnowledgeGraph::KnowledgeGraph(const std::vector<std::string>& seeds) {
  for (const auto& raw : seeds) {
    auto term = normalize_word(raw);
    if (add_node(term, 0)) seeds_.push_back(std::move(term));
  }
}

bool KnowledgeGraph::add_node(const std::string& term, int hop) {
  auto [it, inserted] = nodes_.try_emplace(term, NodeInfo{term, hop, 0});
  return inserted;
}

bool KnowledgeGraph::add_edge(const std::string& a, const std::string& b, const std::string& relation,
                              double weight) {
  if (a == b) return false;
  auto na = nodes_.find(a);
  auto nb = nodes_.find(b);
  if (na == nodes_.end() || nb == nodes_.end()) {
    throw Error(ErrorCode::InvalidConfig, "edge " + a + " -- " + b + " references a missing node");
  }
  auto key = std::make_tuple(std::min(a, b), std::max(a, b), relation);
  if (!edge_index_.try_emplace(std::move(key), edges_.size()).second) return false;
  edges_.push_back({a, b, relation, weight});
  ++na->second.degree;
  ++nb->second.degree;
  return true;
}

const NodeInfo& KnowledgeGraph::node(std::string_view term) const {
  auto it = nodes_.find(term);
  if (it == nodes_.end()) throw Error(ErrorCode::EmptyGraph, "no node '" + std::string(term) + "'");
  return it->second;
}

std::string KnowledgeGraph::to_json() const {
  ordered_json doc;
  doc["seeds"] = seeds_;
  auto& nodes = doc["nodes"] = ordered_json::array();
  for (const auto& [term, info] : nodes_) {
    nodes.push_back({{"term", term}, {"hop", info.hop}, {"degree", info.degree}});
  }
  auto& edges = doc["edges"] = ordered_json::array();
  for (const auto& e : edges_) {
    edges.push_back({{"a", e.a}, {"b", e.b}, {"rel", e.relation}, {"weight", e.weight}});
  }
  return doc.dump(2) + "\n";
}

KnowledgeGraph KnowledgeGraph::from_json(std::string_view text) {
  try {
    json doc = json::parse(text);
    KnowledgeGraph g(doc.at("seeds").get<std::vector<std::string>>());
    for (const auto& n : doc.at("nodes")) {
      const auto term = normalize_word(n.at("term").get<std::string>());
      const int hop = n.at("hop").get<int>();
      const bool is_seed = std::find(g.seeds_.begin(), g.seeds_.end(), term) != g.seeds_.end();
      if (is_seed != (hop == 0)) throw Error(ErrorCode::ParseError, "node '" + term + "' has inconsistent hop");
      g.add_node(term, hop);
    }
    for (const auto& e : doc.at("edges")) {
      g.add_edge(normalize_word(e.at("a").get<std::string>()), normalize_word(e.at("b").get<std::string>()),
                 e.at("rel").get<std::string>(), e.at("weight").get<double>());
    }
    for (const auto& n : doc.at("nodes")) {
      if (auto d = n.find("degree"); d != n.end() && d->get<std::size_t>() != g.node(normalize_word(n.at("term").get<std::string>())).degree) {
        throw Error(ErrorCode::ParseError, "node degree disagrees with edge list");
      }
    }
    return g;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("graph JSON: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    throw Error(ErrorCode::ParseError, std::string("graph JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

struct IndexedGraph {
  std::vector<std::string> terms;
  std::map<std::string_view, std::size_t> index;
  DisjointSets sets;

  explicit IndexedGraph(const KnowledgeGraph& g) : sets(g.node_count()) {
    terms.reserve(g.node_count());
    for (const auto& [term, info] : g.nodes()) {
      index.emplace(term, terms.size());
      terms.push_back(term);
    }
    for (const auto& e : g.edges()) sets.unite(index.at(e.a), index.at(e.b));
  }
};

}  // namespace

std::vector<std::vector<std::string>> connected_components(const KnowledgeGraph& graph) {
  IndexedGraph ig(graph);
  // Terms are in lexicographic order and each root is its set's smallest
  // index, so visiting terms in order yields components by smallest member.
  std::map<std::size_t, std::size_t> slot_of_root;
  std::vector<std::vector<std::string>> components;
  for (std::size_t i = 0; i < ig.terms.size(); ++i) {
    auto root = ig.sets.find(i);
    auto [it, fresh] = slot_of_root.try_emplace(root, components.size());
    if (fresh) components.emplace_back();
    components[it->second].push_back(ig.terms[i]);
  }
  return components;
}

bool seeds_connected(const KnowledgeGraph& graph) {
  const auto& seeds = graph.seed_terms();
  if (seeds.size() <= 1) return true;
  IndexedGraph ig(graph);
  const auto root = ig.sets.find(ig.index.at(seeds.front()));
  return std::all_of(seeds.begin() + 1, seeds.end(),
                     [&](const std::string& s) { return ig.sets.find(ig.index.at(s)) == root; });
}

std::vector<std::string> candidate_nodes(const KnowledgeGraph& graph) {
  std::vector<const NodeInfo*> ordered;
  ordered.reserve(graph.node_count());
  for (const auto& [term, info] : graph.nodes()) ordered.push_back(&info);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const NodeInfo* x, const NodeInfo* y) { return x->hop < y->hop; });
  std::vector<std::string> out;
  out.reserve(ordered.size());
  for (const auto* n : ordered) out.push_back(n->term);
  return out;
}

KnowledgeGraph expand_graph(const std::vector<std::string>& seeds, const ExpansionConfig& config,
                            ConceptSource& source) {
  config.validate();
  if (seeds.empty()) throw Error(ErrorCode::EmptySeeds, "graph expansion needs at least one seed");

  KnowledgeGraph graph(seeds);
  if (graph.node_count() > config.max_nodes) {
    throw Error(ErrorCode::InvalidConfig, "more seeds than max_nodes allows");
  }

  std::vector<std::string> frontier = graph.seed_terms();
  for (int hop = 1; hop <= config.max_hops && !frontier.empty(); ++hop) {
    std::vector<ConceptQueryResult> answers(frontier.size());
    parallel_for_each_index(frontier.size(), config.query_concurrency, [&](std::size_t i) {
      answers[i] = source.query_concept(frontier[i], config.per_term_edge_limit);
    });
    graph.record_round(frontier);

    std::vector<std::string> discovered;
    bool truncated = false;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const auto& queried = frontier[i];
      for (const auto& edge : answers[i].edges) {
        const auto a = normalize_word(edge.start_term);
        const auto b = normalize_word(edge.end_term);
        if (a == b || (a != queried && b != queried)) continue;

        bool endpoints_present = true;
        for (const auto* term : {&a, &b}) {
          if (graph.contains(*term)) continue;
          if (graph.node_count() >= config.max_nodes) {
            truncated = true;
            endpoints_present = false;
            break;
          }
          graph.add_node(*term, hop);
          discovered.push_back(*term);
        }
        if (endpoints_present) graph.add_edge(a, b, edge.relation, edge.weight);
      }
    }

    if (truncated) break;
    if (config.stop_when_connected && seeds_connected(graph)) break;
    frontier = std::move(discovered);
  }
  return graph;
}

}  // namespace topiclabel
