#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "topiclabel/core.hpp"

// Similarity kernels. Every kernel has a serial reference and an OpenMP
// version; both evaluate each output element with the same arithmetic, so
// their results are bitwise identical and the serial one is the test oracle.
namespace topiclabel::kernels {

double dot(std::span<const double> u, std::span<const double> v) noexcept;
double l2_norm(std::span<const double> v) noexcept;

/// Cosine with precomputed norms, clamped to [-1, 1]. No validation.
double cosine_with_norms(std::span<const double> u, std::span<const double> v,
                         double norm_u, double norm_v) noexcept;

/// Norms below this count as zero vectors.
inline constexpr double kZeroNorm = 1e-12;

/// Row-major matrix of pairwise cosines.
struct CosineMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

namespace serial {
std::vector<double> score_candidates(const EmbeddingVector& query,
                                     std::span<const EmbeddingVector> candidates);
CosineMatrix pairwise_cosine(std::span<const EmbeddingVector> rows,
                             std::span<const EmbeddingVector> cols);
}  // namespace serial

namespace parallel {
std::vector<double> score_candidates(const EmbeddingVector& query,
                                     std::span<const EmbeddingVector> candidates);
CosineMatrix pairwise_cosine(std::span<const EmbeddingVector> rows,
                             std::span<const EmbeddingVector> cols);
}  // namespace parallel

// Default entry points used by the library.
using parallel::pairwise_cosine;
using parallel::score_candidates;

}  // namespace topiclabel::kernels
