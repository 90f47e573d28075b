#include "figkd/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "figkd/errors.hpp"

namespace figkd {

namespace {

void check_finite_logits(std::span<const double> logits) {
  if (logits.empty()) throw InvalidInputError("logit vector is empty");
  if (!all_finite(logits)) throw InvalidInputError("logit vector contains non-finite entries");
}

// log softmax(logits / temperature), stable under large magnitudes.
std::vector<double> log_softmax_t(std::span<const double> logits, double temperature) {
  std::vector<double> scaled(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) scaled[i] = logits[i] / temperature;
  const double m = *std::max_element(scaled.begin(), scaled.end());
  double sum = 0.0;
  for (double z : scaled) sum += std::exp(z - m);
  const double log_norm = m + std::log(sum);
  for (double& z : scaled) z -= log_norm;
  return scaled;
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

void LossWeights::validate() const {
  if (!(temperature > 0.0)) throw InvalidInputError("temperature must be positive");
  if (alpha < 0.0 || beta < 0.0) throw InvalidInputError("alpha and beta must be nonnegative");
  if (lambda_kd < 0.0 || lambda_kd > 1.0) throw InvalidInputError("lambda must lie in [0, 1]");
}

std::vector<double> softmax_t(std::span<const double> logits, double temperature) {
  if (!(temperature > 0.0)) throw InvalidInputError("temperature must be positive");
  check_finite_logits(logits);
  std::vector<double> p = log_softmax_t(logits, temperature);
  for (double& v : p) v = std::exp(v);
  double sum = 0.0;
  for (double v : p) sum += v;
  for (double& v : p) v /= sum;
  return p;
}

LossValue ce_loss(std::span<const double> student_logits, std::size_t label) {
  check_finite_logits(student_logits);
  if (label >= student_logits.size()) {
    throw InvalidInputError("label " + std::to_string(label) + " out of range for " +
                            std::to_string(student_logits.size()) + " classes");
  }
  const std::vector<double> logp = log_softmax_t(student_logits, 1.0);
  LossValue out;
  out.scalar = -logp[label];
  out.grad.resize(student_logits.size());
  for (std::size_t i = 0; i < out.grad.size(); ++i) out.grad[i] = std::exp(logp[i]);
  out.grad[label] -= 1.0;
  return out;
}

LossValue kd_loss(std::span<const double> teacher_logits,
                  std::span<const double> student_logits, const LossWeights& weights,
                  std::size_t label) {
  if (teacher_logits.size() != student_logits.size()) {
    throw InvalidInputError("teacher and student logit lengths differ");
  }
  weights.validate();
  check_finite_logits(teacher_logits);

  const double lambda = weights.lambda_kd;
  const double temp = weights.temperature;
  const LossValue ce = ce_loss(student_logits, label);

  const std::vector<double> log_qt = log_softmax_t(teacher_logits, temp);
  const std::vector<double> log_qs = log_softmax_t(student_logits, temp);

  double kl = 0.0;
  for (std::size_t i = 0; i < log_qt.size(); ++i) {
    kl += std::exp(log_qt[i]) * (log_qt[i] - log_qs[i]);
  }

  LossValue out;
  out.scalar = (1.0 - lambda) * ce.scalar + lambda * temp * temp * kl;
  out.grad.resize(student_logits.size());
  for (std::size_t i = 0; i < out.grad.size(); ++i) {
    const double kl_grad = std::exp(log_qs[i]) - std::exp(log_qt[i]);
    out.grad[i] = (1.0 - lambda) * ce.grad[i] + lambda * temp * kl_grad;
  }
  return out;
}

LossValue ablation_band_loss(std::span<const double> teacher_logits,
                             std::span<const double> student_logits,
                             const GridFactorization& fact, bool use_low, bool use_high) {
  if (teacher_logits.size() != student_logits.size()) {
    throw InvalidInputError("teacher and student logit lengths differ");
  }
  const WaveletBands teacher = dwt2_haar(reshape_logits(teacher_logits, fact));
  const WaveletBands student = dwt2_haar(reshape_logits(student_logits, fact));

  WaveletBands cotangent;
  cotangent.source = student.source;
  const std::size_t br = student.ll.rows;
  const std::size_t bc = student.ll.cols;
  cotangent.ll = Matrix(br, bc);
  cotangent.lh = Matrix(br, bc);
  cotangent.hl = Matrix(br, bc);
  cotangent.hh = Matrix(br, bc);

  double loss = 0.0;
  auto accumulate = [&](const Matrix& t, const Matrix& s, Matrix& cot) {
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double diff = t.values[k] - s.values[k];
      loss += std::abs(diff);
      cot.values[k] = -sign(diff);
    }
  };
  if (use_low) accumulate(teacher.ll, student.ll, cotangent.ll);
  if (use_high) {
    accumulate(teacher.lh, student.lh, cotangent.lh);
    accumulate(teacher.hl, student.hl, cotangent.hl);
    accumulate(teacher.hh, student.hh, cotangent.hh);
  }

  LossValue out;
  out.scalar = loss;
  if (use_low || use_high) {
    out.grad = dwt2_haar_adjoint(cotangent).values;
  } else {
    out.grad.assign(student_logits.size(), 0.0);
  }
  return out;
}

LossValue detail_loss(std::span<const double> teacher_logits,
                      std::span<const double> student_logits, const GridFactorization& fact) {
  return ablation_band_loss(teacher_logits, student_logits, fact, false, true);
}

LossValue band_objective_loss(std::span<const double> teacher_logits,
                              std::span<const double> student_logits, std::size_t label,
                              const LossWeights& weights, const GridFactorization& fact,
                              bool use_low, bool use_high) {
  weights.validate();
  const LossValue ce = ce_loss(student_logits, label);
  const LossValue band =
      ablation_band_loss(teacher_logits, student_logits, fact, use_low, use_high);
  LossValue out;
  out.scalar = weights.alpha * ce.scalar + weights.beta * band.scalar;
  out.grad.resize(student_logits.size());
  for (std::size_t i = 0; i < out.grad.size(); ++i) {
    out.grad[i] = weights.alpha * ce.grad[i] + weights.beta * band.grad[i];
  }
  return out;
}

LossValue figkd_loss(std::span<const double> teacher_logits,
                     std::span<const double> student_logits, std::size_t label,
                     const LossWeights& weights, const GridFactorization& fact) {
  return band_objective_loss(teacher_logits, student_logits, label, weights, fact,
                             /*use_low=*/false, /*use_high=*/true);
}

}  // namespace figkd
