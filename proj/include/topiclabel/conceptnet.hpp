#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "topiclabel/embedding.hpp"

namespace topiclabel {

struct ConceptEdge {
  std::string start_term;
  std::string end_term;
  std::string relation;
  double weight = 0.0;

  friend bool operator==(const ConceptEdge&, const ConceptEdge&) = default;
};

struct ConceptQueryResult {
  std::string term;
  std::vector<ConceptEdge> edges;
  std::chrono::system_clock::time_point fetched_at;
};

/// "ice hockey" -> "/c/en/ice_hockey".
std::string term_to_uri(std::string_view term);

/// "/c/en/ice_hockey/n/wn/sport" -> "ice hockey". Returns nullopt for
/// non-English or malformed URIs.
std::optional<std::string> uri_to_english_term(std::string_view uri);

/// Parses a ConceptNet /c/en/... JSON response. Keeps edges whose endpoints
/// are both English, whose weight is non-negative and that touch `term`;
/// stops after `limit` kept edges. Throws ParseError on malformed JSON.
ConceptQueryResult parse_concept_response(const std::string& term, std::string_view body, std::size_t limit);

inline constexpr std::size_t kMaxConceptLimit = 1000;

/// Anything that can answer "edges around this term".
class ConceptSource {
 public:
  virtual ~ConceptSource() = default;
  virtual ConceptQueryResult query_concept(const std::string& term, std::size_t limit) = 0;
};

/// Spaces dispatches at a fixed rate. Shared by every thread using a client.
class TokenBucket {
 public:
  explicit TokenBucket(double requests_per_second);
  void acquire();

 private:
  std::mutex mutex_;
  std::chrono::steady_clock::duration interval_;
  std::chrono::steady_clock::time_point next_slot_;
};

struct ConceptNetConfig {
  std::string base_url = "https://api.conceptnet.io";
  std::optional<std::filesystem::path> cache_dir;
  bool offline = false;
  double requests_per_second = 2.0;
  int timeout_ms = 30000;
  RetryPolicy retry;
};

/// `cache_dir/conceptnet/<percent-encoded term>_<limit>.json`
std::filesystem::path concept_cache_file(const std::filesystem::path& cache_dir, std::string_view term,
                                         std::size_t limit);

/// HTTP client for the public ConceptNet API with a raw-response disk cache.
/// TOPICLABEL_CONCEPTNET_URL overrides base_url. In offline mode a cache miss
/// raises CacheMiss and no request is ever made.
class ConceptNetClient final : public ConceptSource {
 public:
  explicit ConceptNetClient(ConceptNetConfig config);

  ConceptQueryResult query_concept(const std::string& term, std::size_t limit) override;

  std::size_t http_requests() const;
  const ConceptNetConfig& config() const noexcept { return config_; }

 private:
  std::string fetch(const std::string& term, std::size_t limit);

  ConceptNetConfig config_;
  TokenBucket bucket_;
  mutable std::mutex memo_mutex_;
  std::map<std::pair<std::string, std::size_t>, std::string> memo_;
  std::size_t http_requests_ = 0;
};

/// Serves edges from an in-memory edge list (undirected lookup) and records
/// every query. Used for synthetic graphs.
class InMemoryConceptSource final : public ConceptSource {
 public:
  InMemoryConceptSource() = default;
  explicit InMemoryConceptSource(std::vector<ConceptEdge> edges);

  void add_edge(ConceptEdge edge);
  ConceptQueryResult query_concept(const std::string& term, std::size_t limit) override;

  std::vector<std::string> query_log() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::vector<ConceptEdge>, std::less<>> by_term_;
  std::vector<std::string> log_;
};

}  // namespace topiclabel
