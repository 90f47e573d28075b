#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "figkd/logit_geometry.hpp"

namespace figkd {

struct LossWeights {
  double alpha = 2.0;        // cross-entropy weight in the combined objective
  double beta = 2.0;         // detail-loss weight
  double lambda_kd = 0.9;    // KD mixing in [0, 1]
  double temperature = 4.0;  // softmax temperature for the KD baseline

  void validate() const;  // throws InvalidInputError
};

// Per-sample loss value plus its gradient with respect to the student
// logits. Teacher logits are constants; no gradient flows to the teacher.
struct LossValue {
  double scalar = 0.0;
  std::vector<double> grad;  // d scalar / d student_logits, length C
};

// Numerically stable softened softmax (max subtraction).
std::vector<double> softmax_t(std::span<const double> logits, double temperature);

// -log p[label] with grad p - onehot(label).
LossValue ce_loss(std::span<const double> student_logits, std::size_t label);

// Classic logit distillation:
//   (1 - lambda) * CE(p_s, y) + lambda * T^2 * KL(q_t || q_s)
// with q = softmax(logits / T). Temperature applies only here; the detail
// losses below work on raw logits.
LossValue kd_loss(std::span<const double> teacher_logits,
                  std::span<const double> student_logits, const LossWeights& weights,
                  std::size_t label);

// L1 distance over the selected subbands of teacher vs student logit grids
// (LL when use_low, LH+HL+HH when use_high). The gradient chains through the
// orthonormal transform adjoint with the padding adjoint folded in;
// sign(0) is taken as 0. Both flags clear yields the zero loss.
LossValue ablation_band_loss(std::span<const double> teacher_logits,
                             std::span<const double> student_logits,
                             const GridFactorization& fact, bool use_low, bool use_high);

// High-frequency detail loss: L1 over LH, HL, HH. Per-sample form; the
// trainer averages over the batch.
LossValue detail_loss(std::span<const double> teacher_logits,
                      std::span<const double> student_logits, const GridFactorization& fact);

// alpha * CE + beta * (band L1 over the selected subbands). The trainer uses
// this one entry point for every band-selection variant so that equal
// objectives produce bit-identical trajectories.
LossValue band_objective_loss(std::span<const double> teacher_logits,
                              std::span<const double> student_logits, std::size_t label,
                              const LossWeights& weights, const GridFactorization& fact,
                              bool use_low, bool use_high);

// alpha * CE + beta * detail (the high-band objective).
// Note the detail term is not invariant under class reindexing: the reshape
// makes adjacent class indices spatially adjacent in the grid.
LossValue figkd_loss(std::span<const double> teacher_logits,
                     std::span<const double> student_logits, std::size_t label,
                     const LossWeights& weights, const GridFactorization& fact);

}  // namespace figkd
