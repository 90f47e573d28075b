// Test-only oracles, kept independent of the library's analytic paths.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "figkd/data.hpp"
#include "figkd/matrix.hpp"

namespace oracles {

// Central finite differences of a scalar function of a vector.
template <typename Fn>
std::vector<double> fd_gradient(const Fn& f, std::vector<double> x, double h = 1e-5) {
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double fp = f(std::span<const double>(x));
    x[i] = saved - h;
    const double fm = f(std::span<const double>(x));
    x[i] = saved;
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

// In-place variant for gradients with respect to parameters living inside a
// larger structure: `eval` re-reads the perturbed storage on every call.
inline std::vector<double> fd_gradient_inplace(std::span<double> x,
                                               const std::function<double()>& eval,
                                               double h = 1e-5) {
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double fp = eval();
    x[i] = saved - h;
    const double fm = eval();
    x[i] = saved;
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

// Brute-force grid factorization: largest divisor of c at most sqrt(c),
// found by scanning every candidate.
inline std::pair<std::size_t, std::size_t> brute_force_factor(std::size_t c) {
  std::size_t best = 1;
  for (std::size_t d = 1; d <= c; ++d) {
    if (c % d == 0 && d * d <= c && d > best) best = d;
  }
  return {best, c / best};
}

// 1-nearest-centroid classifier accuracy; centroids from the train split.
inline double nearest_centroid_accuracy(const figkd::Dataset& train, const figkd::Dataset& test) {
  const std::size_t dim = train.features.cols;
  figkd::Matrix centroids(train.num_classes, dim);
  std::vector<std::size_t> counts(train.num_classes, 0);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const std::size_t c = train.labels[i];
    ++counts[c];
    for (std::size_t k = 0; k < dim; ++k) centroids(c, k) += train.features(i, k);
  }
  for (std::size_t c = 0; c < train.num_classes; ++c) {
    for (std::size_t k = 0; k < dim; ++k) {
      centroids(c, k) /= static_cast<double>(counts[c]);
    }
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_c = 0;
    for (std::size_t c = 0; c < train.num_classes; ++c) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = test.features(i, k) - centroids(c, k);
        d2 += d * d;
      }
      if (d2 < best) {
        best = d2;
        best_c = c;
      }
    }
    if (best_c == test.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace oracles
