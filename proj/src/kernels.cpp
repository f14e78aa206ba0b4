#include "topiclabel/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace topiclabel::kernels {

namespace {

// Below this many output elements the OpenMP region costs more than it saves.
constexpr std::int64_t kParallelThreshold = 256;

void check_dims(std::size_t expected, std::span<const EmbeddingVector> vectors) {
  for (const auto& v : vectors) {
    if (v.dim() != expected) {
      throw Error(ErrorCode::DimMismatch, "vector dimension " + std::to_string(v.dim()) +
                                              " differs from " + std::to_string(expected));
    }
  }
}

std::vector<double> checked_norms(std::span<const EmbeddingVector> vectors) {
  std::vector<double> norms(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    norms[i] = l2_norm(vectors[i].values());
    if (norms[i] < kZeroNorm) throw Error(ErrorCode::ZeroVector, "vector has zero norm");
  }
  return norms;
}

double checked_norm(const EmbeddingVector& v) {
  double n = l2_norm(v.values());
  if (n < kZeroNorm) throw Error(ErrorCode::ZeroVector, "vector has zero norm");
  return n;
}

}  // namespace

double dot(std::span<const double> u, std::span<const double> v) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += u[i] * v[i];
  return sum;
}

double l2_norm(std::span<const double> v) noexcept { return std::sqrt(dot(v, v)); }

double cosine_with_norms(std::span<const double> u, std::span<const double> v,
                         double norm_u, double norm_v) noexcept {
  return std::clamp(dot(u, v) / (norm_u * norm_v), -1.0, 1.0);
}

namespace serial {

std::vector<double> score_candidates(const EmbeddingVector& query,
                                     std::span<const EmbeddingVector> candidates) {
  check_dims(query.dim(), candidates);
  const double qn = checked_norm(query);
  const auto norms = checked_norms(candidates);

  std::vector<double> scores(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    scores[i] = cosine_with_norms(query.values(), candidates[i].values(), qn, norms[i]);
  }
  return scores;
}

CosineMatrix pairwise_cosine(std::span<const EmbeddingVector> rows,
                             std::span<const EmbeddingVector> cols) {
  CosineMatrix m{rows.size(), cols.size(), {}};
  if (rows.empty() || cols.empty()) return m;
  check_dims(rows.front().dim(), rows);
  check_dims(rows.front().dim(), cols);
  const auto rn = checked_norms(rows);
  const auto cn = checked_norms(cols);

  m.values.resize(m.rows * m.cols);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      m.values[r * m.cols + c] = cosine_with_norms(rows[r].values(), cols[c].values(), rn[r], cn[c]);
    }
  }
  return m;
}

}  // namespace serial

namespace parallel {

std::vector<double> score_candidates(const EmbeddingVector& query,
                                     std::span<const EmbeddingVector> candidates) {
  check_dims(query.dim(), candidates);
  const double qn = checked_norm(query);
  const auto norms = checked_norms(candidates);

  const auto n = static_cast<std::int64_t>(candidates.size());
  std::vector<double> scores(candidates.size());
  const auto q = std::span<const double>(query.values());
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (std::int64_t i = 0; i < n; ++i) {
    scores[i] = cosine_with_norms(q, candidates[i].values(), qn, norms[i]);
  }
  return scores;
}

CosineMatrix pairwise_cosine(std::span<const EmbeddingVector> rows,
                             std::span<const EmbeddingVector> cols) {
  CosineMatrix m{rows.size(), cols.size(), {}};
  if (rows.empty() || cols.empty()) return m;
  check_dims(rows.front().dim(), rows);
  check_dims(rows.front().dim(), cols);
  const auto rn = checked_norms(rows);
  const auto cn = checked_norms(cols);

  m.values.resize(m.rows * m.cols);
  const auto total = static_cast<std::int64_t>(m.rows * m.cols);
  const std::size_t width = m.cols;
#pragma omp parallel for schedule(static) if (total >= kParallelThreshold)
  for (std::int64_t k = 0; k < total; ++k) {
    const auto r = static_cast<std::size_t>(k) / width;
    const auto c = static_cast<std::size_t>(k) % width;
    m.values[k] = cosine_with_norms(rows[r].values(), cols[c].values(), rn[r], cn[c]);
  }
  return m;
}

}  // namespace parallel

}  // namespace topiclabel::kernels
