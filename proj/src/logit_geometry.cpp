#include "figkd/logit_geometry.hpp"

#include <string>

#include "figkd/errors.hpp"

namespace figkd {

GridFactorization factorize_grid(std::size_t num_classes) {
  if (num_classes == 0) {
    throw InvalidInputError("num_classes must be positive");
  }
  std::size_t isqrt = 0;
  while ((isqrt + 1) * (isqrt + 1) <= num_classes) ++isqrt;
  for (std::size_t d = isqrt; d >= 1; --d) {
    if (num_classes % d == 0) {
      return {num_classes, d, num_classes / d};
    }
  }
  return {num_classes, 1, num_classes};  // unreachable; 1 always divides
}

LogitGrid reshape_logits(std::span<const double> logits, const GridFactorization& fact) {
  if (fact.height * fact.width != fact.num_classes || fact.height == 0) {
    throw InvalidInputError("grid factorization is inconsistent");
  }
  if (logits.size() != fact.num_classes) {
    throw InvalidInputError("logit vector length " + std::to_string(logits.size()) +
                            " does not match num_classes " + std::to_string(fact.num_classes));
  }
  Matrix m(fact.height, fact.width);
  std::copy(logits.begin(), logits.end(), m.values.begin());
  return LogitGrid::from_matrix(std::move(m));
}

std::vector<double> flatten_grid(const LogitGrid& grid) {
  if (grid.values.size() != grid.original_len) {
    throw InvalidInputError("cannot flatten a padded grid");
  }
  return grid.values.values;
}

}  // namespace figkd
