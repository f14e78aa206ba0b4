#include "topiclabel/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <thread>

#include "http_util.hpp"
#include "json.hpp"
#include "topiclabel/io_util.hpp"
#include "topiclabel/kernels.hpp"
#include "topiclabel/sentence.hpp"

namespace topiclabel {

using nlohmann::json;

std::chrono::milliseconds RetryPolicy::delay_after(int failed_attempt) const {
  if (backoff.empty()) return std::chrono::milliseconds(0);
  auto idx = static_cast<std::size_t>(std::max(failed_attempt - 1, 0));
  return backoff[std::min(idx, backoff.size() - 1)];
}

void EmbedderConfig::validate() const {
  if (model_id.empty()) throw Error(ErrorCode::InvalidConfig, "model_id is empty");
  if (batch_size == 0) throw Error(ErrorCode::InvalidConfig, "batch_size must be positive");
  if (timeout_ms <= 0) throw Error(ErrorCode::InvalidConfig, "timeout_ms must be positive");
  if (retry.attempts <= 0) throw Error(ErrorCode::InvalidConfig, "retry attempts must be positive");
  if (backend == EmbedderBackendKind::Http && endpoint_url.empty()) {
    throw Error(ErrorCode::InvalidConfig, "http embedder requires an endpoint URL");
  }
}

// ---------------------------------------------------------------------------
// test_hash

std::uint64_t test_hash_component_hash(std::string_view text, std::uint32_t index) {
  const char le[4] = {static_cast<char>(index & 0xFF), static_cast<char>((index >> 8) & 0xFF),
                      static_cast<char>((index >> 16) & 0xFF), static_cast<char>((index >> 24) & 0xFF)};
  return fnv1a64(std::string_view(le, 4), fnv1a64(text, kTestHashSeed));
}

std::vector<double> test_hash_embedding(std::string_view text) {
  std::vector<double> v(kTestHashDim);
  for (std::uint32_t i = 0; i < kTestHashDim; ++i) {
    v[i] = static_cast<double>(test_hash_component_hash(text, i)) * 0x1p-63 - 1.0;
  }
  const double norm = kernels::l2_norm(v);
  for (double& x : v) x /= norm;
  return v;
}

std::vector<std::vector<double>> HashEmbeddingBackend::embed_batch(std::span<const std::string> texts) {
  std::vector<std::vector<double>> out(texts.size());
  const auto n = static_cast<std::int64_t>(texts.size());
#pragma omp parallel for schedule(static) if (n >= 64)
  for (std::int64_t i = 0; i < n; ++i) out[i] = test_hash_embedding(texts[i]);
  return out;
}

// ---------------------------------------------------------------------------
// http

HttpEmbeddingBackend::HttpEmbeddingBackend(std::string endpoint_url, std::string model_id,
                                           int timeout_ms, RetryPolicy retry)
    : endpoint_url_(std::move(endpoint_url)),
      model_id_(std::move(model_id)),
      timeout_ms_(timeout_ms),
      retry_(std::move(retry)) {}

namespace {

std::vector<std::vector<double>> parse_embed_response(const std::string& body, std::size_t expected) {
  json doc = json::parse(body);
  const auto& rows = doc.at("embeddings");
  if (!rows.is_array() || rows.size() != expected) {
    throw Error(ErrorCode::BackendUnavailable, "embedding response has " +
                                                   std::to_string(rows.is_array() ? rows.size() : 0) +
                                                   " rows, expected " + std::to_string(expected));
  }
  std::vector<std::vector<double>> out;
  out.reserve(expected);
  for (const auto& row : rows) out.push_back(row.get<std::vector<double>>());
  if (doc.contains("dim")) {
    auto dim = doc.at("dim").get<std::size_t>();
    for (const auto& row : out) {
      if (row.size() != dim) throw Error(ErrorCode::DimMismatch, "embedding row length differs from declared dim");
    }
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> HttpEmbeddingBackend::embed_batch(std::span<const std::string> texts) {
  const auto url = detail::split_url(endpoint_url_);
  auto client = detail::make_client(url.origin, timeout_ms_);
  const std::string body = json{{"model", model_id_}, {"texts", texts}}.dump();

  std::string last_error;
  for (int attempt = 1; attempt <= retry_.attempts; ++attempt) {
    auto res = client->Post(url.path + "/embed", body, "application/json");
    if (res && res->status == 200) {
      try {
        return parse_embed_response(res->body, texts.size());
      } catch (const json::exception& e) {
        throw Error(ErrorCode::BackendUnavailable, std::string("malformed embedding response: ") + e.what());
      }
    }
    last_error = res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error());
    if (attempt < retry_.attempts) std::this_thread::sleep_for(retry_.delay_after(attempt));
  }
  throw Error(ErrorCode::BackendUnavailable,
              endpoint_url_ + " failed after " + std::to_string(retry_.attempts) + " attempts (" + last_error + ")");
}

// ---------------------------------------------------------------------------
// cache

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double d) {
  auto bits = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}
  bool done() const { return pos_ == data_.size(); }

  std::uint64_t uint(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= std::uint64_t(static_cast<std::uint8_t>(data_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }
  double f64() { return std::bit_cast<double>(uint(8)); }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw Error(ErrorCode::ParseError, "truncated embedding cache record");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace

std::filesystem::path embedding_cache_file(const std::filesystem::path& cache_dir, std::string_view model_id) {
  return cache_dir / "embeddings" / (percent_encode(model_id) + ".embcache");
}

EmbeddingCache::EmbeddingCache(std::string model_id, std::optional<std::filesystem::path> cache_dir)
    : model_id_(std::move(model_id)) {
  if (cache_dir) {
    file_ = embedding_cache_file(*cache_dir, model_id_);
    load();
  }
}

void EmbeddingCache::load() {
  if (!std::filesystem::exists(*file_)) return;
  const std::string data = read_file(*file_);
  Reader in(data);
  while (!in.done()) {
    auto len = static_cast<std::size_t>(in.uint(4));
    std::string text = in.bytes(len);
    auto dim = static_cast<std::size_t>(in.uint(4));
    std::vector<double> values(dim);
    for (auto& v : values) v = in.f64();
    if (!entries_.contains(text)) order_.push_back(text);
    entries_.insert_or_assign(std::move(text), EmbeddingVector(std::move(values), model_id_));
  }
}

std::optional<EmbeddingVector> EmbeddingCache::lookup(const std::string& text) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(text);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void EmbeddingCache::insert(const std::string& text, const EmbeddingVector& vector) {
  if (vector.model_id() != model_id_) {
    throw Error(ErrorCode::InvalidVector, "cache for '" + model_id_ + "' cannot hold a '" + vector.model_id() + "' vector");
  }
  std::unique_lock lock(mutex_);
  if (!entries_.contains(text)) order_.push_back(text);
  entries_.insert_or_assign(text, vector);
  dirty_ = true;
}

void EmbeddingCache::flush() {
  std::unique_lock lock(mutex_);
  if (!file_ || !dirty_) return;
  std::string out;
  for (const auto& text : order_) {
    const auto& values = entries_.at(text).values();
    put_u32(out, static_cast<std::uint32_t>(text.size()));
    out += text;
    put_u32(out, static_cast<std::uint32_t>(values.size()));
    for (double d : values) put_f64(out, d);
  }
  atomic_write_file(*file_, out);
  dirty_ = false;
}

std::size_t EmbeddingCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

// ---------------------------------------------------------------------------
// Embedder

namespace {

std::unique_ptr<EmbeddingBackend> make_backend(EmbedderConfig& config) {
  if (config.backend == EmbedderBackendKind::Http) {
    config.endpoint_url = env_or("TOPICLABEL_EMBED_URL", config.endpoint_url);
  }
  config.validate();
  if (config.backend == EmbedderBackendKind::TestHash) return std::make_unique<HashEmbeddingBackend>();
  return std::make_unique<HttpEmbeddingBackend>(config.endpoint_url, config.model_id, config.timeout_ms,
                                                config.retry);
}

EmbedderConfig validated(EmbedderConfig config) {
  config.validate();
  return config;
}

}  // namespace

Embedder::Embedder(EmbedderConfig config)
    : config_(std::move(config)),
      backend_(make_backend(config_)),
      cache_(config_.model_id, config_.cache_dir) {}

Embedder::Embedder(EmbedderConfig config, std::unique_ptr<EmbeddingBackend> backend)
    : config_(validated(std::move(config))),
      backend_(std::move(backend)),
      cache_(config_.model_id, config_.cache_dir) {}

std::vector<double> Embedder::adopt_dim(std::vector<double> values) {
  std::lock_guard lock(state_mutex_);
  if (!dim_) dim_ = values.size();
  if (values.size() != *dim_) {
    throw Error(ErrorCode::DimMismatch, "backend returned dimension " + std::to_string(values.size()) +
                                            ", expected " + std::to_string(*dim_));
  }
  return values;
}

std::vector<EmbeddingVector> Embedder::embed_texts(const std::vector<std::string>& texts) {
  if (texts.empty()) throw Error(ErrorCode::EmptyInput, "no texts to embed");
  for (const auto& t : texts) {
    if (t.empty()) throw Error(ErrorCode::EmptyInput, "cannot embed an empty text");
  }

  std::vector<std::optional<EmbeddingVector>> slots(texts.size());
  std::vector<std::string> missing;
  std::map<std::string, std::vector<std::size_t>, std::less<>> missing_at;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (auto hit = cache_.lookup(texts[i])) {
      adopt_dim(hit->values());
      slots[i] = std::move(*hit);
      continue;
    }
    auto [it, fresh] = missing_at.try_emplace(texts[i]);
    if (fresh) missing.push_back(texts[i]);
    it->second.push_back(i);
  }

  for (std::size_t start = 0; start < missing.size(); start += config_.batch_size) {
    auto count = std::min(config_.batch_size, missing.size() - start);
    std::span<const std::string> batch(missing.data() + start, count);
    auto rows = backend_->embed_batch(batch);
    if (rows.size() != count) {
      throw Error(ErrorCode::BackendUnavailable, "backend returned " + std::to_string(rows.size()) +
                                                     " vectors for " + std::to_string(count) + " texts");
    }
    {
      std::lock_guard lock(state_mutex_);
      backend_texts_ += count;
    }
    for (std::size_t j = 0; j < count; ++j) {
      EmbeddingVector vec(adopt_dim(std::move(rows[j])), config_.model_id);
      cache_.insert(batch[j], vec);
      for (auto idx : missing_at.at(batch[j])) slots[idx] = vec;
    }
  }
  if (!missing.empty()) cache_.flush();

  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

EmbeddingVector Embedder::embed_text(const std::string& text) { return embed_texts({text}).front(); }

EmbeddingVector Embedder::embed_topic(const Topic& topic) { return embed_text(build_sentence(topic).text); }

std::size_t Embedder::backend_texts() const {
  std::lock_guard lock(state_mutex_);
  return backend_texts_;
}

std::vector<EmbeddingVector> embed_texts(const std::vector<std::string>& texts, const EmbedderConfig& config) {
  Embedder embedder(config);
  return embedder.embed_texts(texts);
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dim() != v.dim()) {
    throw Error(ErrorCode::DimMismatch, "cosine of vectors with dimensions " + std::to_string(u.dim()) + " and " +
                                            std::to_string(v.dim()));
  }
  const double nu = kernels::l2_norm(u.values());
  const double nv = kernels::l2_norm(v.values());
  if (nu < kernels::kZeroNorm || nv < kernels::kZeroNorm) throw Error(ErrorCode::ZeroVector, "cosine of a zero vector");
  return kernels::cosine_with_norms(u.values(), v.values(), nu, nv);
}

}  // namespace topiclabel
