#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "topiclabel/conceptnet.hpp"

namespace topiclabel {

struct NodeInfo {
  std::string term;
  int hop = 0;
  std::size_t degree = 0;

  friend bool operator==(const NodeInfo&, const NodeInfo&) = default;
};

struct GraphEdge {
  std::string a;
  std::string b;
  std::string relation;
  double weight = 0.0;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

struct ExpansionConfig {
  int max_hops = 3;
  std::size_t per_term_edge_limit = 50;
  std::size_t max_nodes = 5000;
  bool stop_when_connected = true;
  // Concurrent queries within one round; merging stays in frontier order.
  std::size_t query_concurrency = 4;

  void validate() const;
};

/// Undirected concept graph grown outward from seed terms.
///
/// Seeds have hop 0 and every other node carries the round in which it was
/// first discovered. Edges are deduplicated on (unordered endpoints,
/// relation) and never form self-loops.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  /// Seeds are normalized; duplicates collapse onto the first occurrence.
  explicit KnowledgeGraph(const std::vector<std::string>& seeds);

  /// Returns false when the term already exists (its hop is left alone).
  bool add_node(const std::string& term, int hop);
  /// Returns false for self-loops and duplicates. Both endpoints must exist.
  bool add_edge(const std::string& a, const std::string& b, const std::string& relation, double weight);

  bool contains(std::string_view term) const { return nodes_.find(term) != nodes_.end(); }
  const NodeInfo& node(std::string_view term) const;

  const std::map<std::string, NodeInfo, std::less<>>& nodes() const noexcept { return nodes_; }
  const std::vector<GraphEdge>& edges() const noexcept { return edges_; }
  const std::vector<std::string>& seed_terms() const noexcept { return seeds_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }

  /// Terms queried in each expansion round, in dispatch order.
  const std::vector<std::vector<std::string>>& query_rounds() const noexcept { return query_rounds_; }
  void record_round(std::vector<std::string> queried) { query_rounds_.push_back(std::move(queried)); }

  /// {"seeds": [...], "nodes": [{"term","hop","degree"}], "edges": [{"a","b","rel","weight"}]}
  std::string to_json() const;
  /// Rebuilds from the export format; throws ParseError on inconsistent input.
  static KnowledgeGraph from_json(std::string_view text);

 private:
  std::map<std::string, NodeInfo, std::less<>> nodes_;
  std::vector<GraphEdge> edges_;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> edge_index_;
  std::vector<std::string> seeds_;
  std::vector<std::vector<std::string>> query_rounds_;
};

/// Breadth-first rounds of neighbor queries. Round k queries every node
/// first seen at hop k-1 (round 1 queries the seeds) and gives hop k to new
/// endpoints. Stops after max_hops rounds, once all seeds share a component
/// (if stop_when_connected), when a round finds nothing new, or when the
/// node cap is hit; in the last case discoveries are cut off in query order.
KnowledgeGraph expand_graph(const std::vector<std::string>& seeds, const ExpansionConfig& config,
                            ConceptSource& source);

/// Undirected components; members sorted, components ordered by smallest member.
std::vector<std::vector<std::string>> connected_components(const KnowledgeGraph& graph);

bool seeds_connected(const KnowledgeGraph& graph);

/// All node terms ordered by (hop, term).
std::vector<std::string> candidate_nodes(const KnowledgeGraph& graph);

}  // namespace topiclabel
