#include "topiclabel/conceptnet.hpp"

#include <cmath>
#include <filesystem>
#include <thread>

#include "http_util.hpp"
#include "json.hpp"
#include "topiclabel/io_util.hpp"

namespace topiclabel {

using nlohmann::json;

std::string term_to_uri(std::string_view term) {
  if (term.empty()) throw Error(ErrorCode::EmptyWord, "cannot build a URI for an empty term");
  std::string uri = "/c/en/";
  for (char c : term) uri.push_back(c == ' ' ? '_' : c);
  return uri;
}

std::optional<std::string> uri_to_english_term(std::string_view uri) {
  constexpr std::string_view prefix = "/c/en/";
  if (!uri.starts_with(prefix)) return std::nullopt;
  auto rest = uri.substr(prefix.size());
  rest = rest.substr(0, rest.find('/'));
  try {
    return normalize_word(rest);
  } catch (const Error&) {
    return std::nullopt;
  }
}

namespace {

std::optional<std::string> english_endpoint(const json& node) {
  if (!node.is_object()) return std::nullopt;
  auto lang = node.find("language");
  if (lang == node.end() || !lang->is_string() || lang->get<std::string>() != "en") return std::nullopt;
  auto term = node.find("term");
  if (term != node.end() && term->is_string()) return uri_to_english_term(term->get<std::string>());
  auto id = node.find("@id");
  if (id != node.end() && id->is_string()) return uri_to_english_term(id->get<std::string>());
  return std::nullopt;
}

}  // namespace

ConceptQueryResult parse_concept_response(const std::string& term, std::string_view body, std::size_t limit) {
  ConceptQueryResult result{term, {}, std::chrono::system_clock::now()};
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, "ConceptNet response for '" + term + "': " + e.what());
  }
  auto edges = doc.find("edges");
  if (edges == doc.end() || !edges->is_array()) return result;

  for (const auto& e : *edges) {
    if (result.edges.size() >= limit) break;
    if (!e.is_object()) continue;
    auto start = english_endpoint(e.value("start", json{}));
    auto end = english_endpoint(e.value("end", json{}));
    if (!start || !end) continue;
    if (*start != term && *end != term) continue;

    const json rel = e.value("rel", json{});
    std::string relation = rel.is_object() ? rel.value("label", "") : "";
    if (relation.empty()) relation = "RelatedTo";
    double weight = 1.0;
    if (auto w = e.find("weight"); w != e.end() && w->is_number()) weight = w->get<double>();
    if (!std::isfinite(weight) || weight < 0.0) continue;

    result.edges.push_back({std::move(*start), std::move(*end), std::move(relation), weight});
  }
  return result;
}

// ---------------------------------------------------------------------------

TokenBucket::TokenBucket(double requests_per_second) : next_slot_(std::chrono::steady_clock::now()) {
  if (!(requests_per_second > 0.0)) throw Error(ErrorCode::InvalidConfig, "request rate must be positive");
  interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / requests_per_second));
}

void TokenBucket::acquire() {
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mutex_);
    slot = std::max(next_slot_, std::chrono::steady_clock::now());
    next_slot_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

std::filesystem::path concept_cache_file(const std::filesystem::path& cache_dir, std::string_view term,
                                         std::size_t limit) {
  return cache_dir / "conceptnet" / (percent_encode(term) + "_" + std::to_string(limit) + ".json");
}

ConceptNetClient::ConceptNetClient(ConceptNetConfig config)
    : config_(std::move(config)), bucket_(config_.requests_per_second) {
  config_.base_url = env_or("TOPICLABEL_CONCEPTNET_URL", config_.base_url);
  if (config_.offline && !config_.cache_dir) {
    throw Error(ErrorCode::InvalidConfig, "offline ConceptNet mode requires a cache directory");
  }
}

std::size_t ConceptNetClient::http_requests() const {
  std::lock_guard lock(memo_mutex_);
  return http_requests_;
}

ConceptQueryResult ConceptNetClient::query_concept(const std::string& term, std::size_t limit) {
  if (limit == 0 || limit > kMaxConceptLimit) {
    throw Error(ErrorCode::InvalidConfig, "ConceptNet limit must be in [1, 1000]");
  }
  const std::string canonical = normalize_word(term);
  const auto key = std::make_pair(canonical, limit);

  std::optional<std::string> body;
  {
    std::lock_guard lock(memo_mutex_);
    if (auto it = memo_.find(key); it != memo_.end()) body = it->second;
  }
  if (!body && config_.cache_dir) {
    auto path = concept_cache_file(*config_.cache_dir, canonical, limit);
    if (std::filesystem::exists(path)) body = read_file(path);
  }
  if (!body) {
    if (config_.offline) {
      throw Error(ErrorCode::CacheMiss, "no cached ConceptNet response for '" + canonical + "' (limit " +
                                            std::to_string(limit) + ")");
    }
    body = fetch(canonical, limit);
    if (config_.cache_dir) atomic_write_file(concept_cache_file(*config_.cache_dir, canonical, limit), *body);
  }
  {
    std::lock_guard lock(memo_mutex_);
    memo_.try_emplace(key, *body);
  }
  return parse_concept_response(canonical, *body, limit);
}

std::string ConceptNetClient::fetch(const std::string& term, std::size_t limit) {
  const auto url = detail::split_url(config_.base_url);
  auto client = detail::make_client(url.origin, config_.timeout_ms);
  const std::string path = url.path + term_to_uri(term) + "?limit=" + std::to_string(limit);

  bool rate_limited = false;
  std::string last_error;
  for (int attempt = 1; attempt <= config_.retry.attempts; ++attempt) {
    bucket_.acquire();
    auto res = client->Get(path);
    {
      std::lock_guard lock(memo_mutex_);
      ++http_requests_;
    }
    if (res && res->status == 200) return res->body;
    if (res && res->status == 404) return R"({"edges": []})";
    rate_limited = res && res->status == 429;
    last_error = res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error());
    if (attempt < config_.retry.attempts) std::this_thread::sleep_for(config_.retry.delay_after(attempt));
  }
  const std::string what = "ConceptNet query for '" + term + "' failed after " +
                           std::to_string(config_.retry.attempts) + " attempts (" + last_error + ")";
  throw Error(rate_limited ? ErrorCode::RateLimited : ErrorCode::NetworkError, what);
}

// ---------------------------------------------------------------------------

InMemoryConceptSource::InMemoryConceptSource(std::vector<ConceptEdge> edges) {
  for (auto& e : edges) add_edge(std::move(e));
}

void InMemoryConceptSource::add_edge(ConceptEdge edge) {
  std::lock_guard lock(mutex_);
  by_term_[edge.start_term].push_back(edge);
  if (edge.end_term != edge.start_term) by_term_[edge.end_term].push_back(edge);
}

ConceptQueryResult InMemoryConceptSource::query_concept(const std::string& term, std::size_t limit) {
  std::lock_guard lock(mutex_);
  log_.push_back(term);
  ConceptQueryResult result{term, {}, std::chrono::system_clock::now()};
  if (auto it = by_term_.find(term); it != by_term_.end()) {
    for (const auto& e : it->second) {
      if (result.edges.size() >= limit) break;
      result.edges.push_back(e);
    }
  }
  return result;
}

std::vector<std::string> InMemoryConceptSource::query_log() const {
  std::lock_guard lock(mutex_);
  return log_;
}

}  // namespace topiclabel
