#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "figkd/wavelet.hpp"

namespace figkd {

// Deterministic H x W factorization of a class count: H is the largest
// divisor of C not exceeding sqrt(C), so the grid is as square as C allows
// (200 -> 10x20, 120 -> 10x12, 40 -> 5x8, prime C -> 1xC).
struct GridFactorization {
  std::size_t num_classes = 0;
  std::size_t height = 0;
  std::size_t width = 0;
};

GridFactorization factorize_grid(std::size_t num_classes);

// Row-major reshape of a length-C logit vector into the factorized grid.
LogitGrid reshape_logits(std::span<const double> logits, const GridFactorization& fact);

// Row-major inverse of reshape_logits; requires an unpadded grid.
std::vector<double> flatten_grid(const LogitGrid& grid);

}  // namespace figkd
