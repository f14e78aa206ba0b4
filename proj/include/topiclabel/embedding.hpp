#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topiclabel/core.hpp"

namespace topiclabel {

enum class EmbedderBackendKind { Http, TestHash };

struct RetryPolicy {
  int attempts = 3;
  // Delay before attempt k+1 is backoff[min(k-1, size-1)].
  std::vector<std::chrono::milliseconds> backoff{std::chrono::milliseconds(250),
                                                 std::chrono::milliseconds(500),
                                                 std::chrono::milliseconds(1000)};

  std::chrono::milliseconds delay_after(int failed_attempt) const;
};

struct EmbedderConfig {
  EmbedderBackendKind backend = EmbedderBackendKind::TestHash;
  std::string endpoint_url;
  std::string model_id = "test-hash";
  std::size_t batch_size = 32;
  int timeout_ms = 30000;
  std::optional<std::filesystem::path> cache_dir;
  RetryPolicy retry;

  /// Throws Error(InvalidConfig).
  void validate() const;
};

/// A backend turns a batch of texts into raw vectors, one per text, in order.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual std::vector<std::vector<double>> embed_batch(std::span<const std::string> texts) = 0;
};

// ---------------------------------------------------------------------------
// test_hash embedder
//
// dim = 64. Component i of text t is h(t, i) / 2^63 - 1, where h is FNV-1a
// 64-bit over the UTF-8 bytes of t followed by the 4 little-endian bytes of i,
// starting from the state 0x544F504943 ("TOPIC") instead of the usual offset
// basis. The vector is then L2-normalized.
// ---------------------------------------------------------------------------
inline constexpr std::size_t kTestHashDim = 64;
inline constexpr std::uint64_t kTestHashSeed = 0x544F504943ULL;

std::uint64_t test_hash_component_hash(std::string_view text, std::uint32_t index);
std::vector<double> test_hash_embedding(std::string_view text);

class HashEmbeddingBackend final : public EmbeddingBackend {
 public:
  std::vector<std::vector<double>> embed_batch(std::span<const std::string> texts) override;
};

/// POST {endpoint}/embed with {"model", "texts"}; expects {"model", "dim", "embeddings"}.
class HttpEmbeddingBackend final : public EmbeddingBackend {
 public:
  HttpEmbeddingBackend(std::string endpoint_url, std::string model_id, int timeout_ms,
                       RetryPolicy retry);
  std::vector<std::vector<double>> embed_batch(std::span<const std::string> texts) override;

 private:
  std::string endpoint_url_;
  std::string model_id_;
  int timeout_ms_;
  RetryPolicy retry_;
};

/// In-memory index over (text -> vector) for a single model, optionally
/// backed by a file under cache_dir. The file is a sequence of records
///   u32 text length | text bytes | u32 dim | dim x f64
/// all little-endian. flush() rewrites it through a temp file and rename.
class EmbeddingCache {
 public:
  EmbeddingCache(std::string model_id, std::optional<std::filesystem::path> cache_dir);

  std::optional<EmbeddingVector> lookup(const std::string& text) const;
  void insert(const std::string& text, const EmbeddingVector& vector);
  void flush();

  std::size_t size() const;
  std::optional<std::filesystem::path> file_path() const { return file_; }

 private:
  void load();

  std::string model_id_;
  std::optional<std::filesystem::path> file_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, EmbeddingVector, std::less<>> entries_;
  std::vector<std::string> order_;
  bool dirty_ = false;
};

std::filesystem::path embedding_cache_file(const std::filesystem::path& cache_dir,
                                           std::string_view model_id);

/// Embedding front end: cache, batching and dimension checks around a backend.
/// Safe to call from several threads.
class Embedder {
 public:
  /// Builds the backend named in the config. TOPICLABEL_EMBED_URL overrides
  /// endpoint_url for the http backend.
  explicit Embedder(EmbedderConfig config);
  Embedder(EmbedderConfig config, std::unique_ptr<EmbeddingBackend> backend);

  std::vector<EmbeddingVector> embed_texts(const std::vector<std::string>& texts);
  EmbeddingVector embed_topic(const Topic& topic);
  EmbeddingVector embed_text(const std::string& text);

  const EmbedderConfig& config() const noexcept { return config_; }
  /// Number of texts sent to the backend so far (cache misses).
  std::size_t backend_texts() const;

 private:
  std::vector<double> adopt_dim(std::vector<double> values);

  EmbedderConfig config_;
  std::unique_ptr<EmbeddingBackend> backend_;
  EmbeddingCache cache_;
  mutable std::mutex state_mutex_;
  std::optional<std::size_t> dim_;
  std::size_t backend_texts_ = 0;
};

/// One-shot form of Embedder::embed_texts.
std::vector<EmbeddingVector> embed_texts(const std::vector<std::string>& texts,
                                         const EmbedderConfig& config);

/// (u . v) / (|u| |v|) clamped to [-1, 1]. Throws DimMismatch or ZeroVector.
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

}  // namespace topiclabel
