#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "figkd/matrix.hpp"

namespace figkd {

struct SgdConfig {
  double learning_rate = 0.05;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  std::uint64_t seed = 1;  // run seed; init/shuffle streams derive from it

  void validate() const;  // throws InvalidInputError
};

// Two-layer ReLU perceptron: logits = w2 * relu(w1 * x + b1) + b2.
// Momentum buffers live with the parameters so a checkpoint captures the
// full optimizer state.
struct MlpParams {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t num_classes = 0;
  std::uint64_t seed = 0;

  Matrix w1;  // hidden x input
  std::vector<double> b1;
  Matrix w2;  // classes x hidden
  std::vector<double> b2;

  Matrix vw1;
  std::vector<double> vb1;
  Matrix vw2;
  std::vector<double> vb2;
};

struct ForwardCache {
  std::vector<double> input;
  std::vector<double> hidden_pre;
  std::vector<double> hidden;
};

struct MlpGrads {
  Matrix w1;
  std::vector<double> b1;
  Matrix w2;
  std::vector<double> b2;

  static MlpGrads zeros(const MlpParams& p);
  void zero();
  void scale(double s);
};

// He-normal init: weights ~ N(0, 2/fan_in) drawn from Rng(seed) in w1-then-w2
// row-major order; biases and momentum buffers zero. Same seed, same bytes.
MlpParams init_params(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes,
                      std::uint64_t seed);

// Returns logits; fills `cache` (when given) for a later backward pass.
std::vector<double> forward(const MlpParams& params, std::span<const double> x,
                            ForwardCache* cache = nullptr);

// Reverse-mode gradients for all parameters. ReLU subgradient at 0 is 0.
// A cache whose shapes do not match the params is a contract violation.
MlpGrads backward(const MlpParams& params, const ForwardCache& cache,
                  std::span<const double> grad_logits);
void backward_accumulate(const MlpParams& params, const ForwardCache& cache,
                         std::span<const double> grad_logits, MlpGrads& acc);

// v <- momentum * v + grad + weight_decay * param; param <- param - lr * v.
// Throws TrainingDivergedError if any updated value is non-finite.
void sgd_step(MlpParams& params, const MlpGrads& grads, const SgdConfig& cfg);

// Versioned little-endian binary checkpoint of dims, seed, and all tensors
// (including momentum buffers) in row-major order; round-trips bit-exactly.
std::vector<std::uint8_t> serialize_checkpoint(const MlpParams& params);
MlpParams deserialize_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(const MlpParams& params, const std::filesystem::path& path);
MlpParams load_checkpoint(const std::filesystem::path& path);

}  // namespace figkd
