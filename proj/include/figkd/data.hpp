#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "figkd/matrix.hpp"

namespace figkd {

// Desk-scale stand-in for fine-grained recognition: superclass clusters far
// apart, class centers inside a superclass close together.
struct SyntheticSpec {
  std::size_t num_superclasses = 5;
  std::size_t classes_per_superclass = 4;
  std::size_t input_dim = 32;
  double super_separation = 6.0;   // radius of the superclass-center sphere
  double fine_separation = 1.0;    // norm of the class-center offsets
  double noise_sigma = 0.35;
  std::size_t train_per_class = 100;
  std::size_t test_per_class = 50;
  std::uint64_t seed = 7;

  std::size_t num_classes() const { return num_superclasses * classes_per_superclass; }
  void validate() const;  // throws InvalidInputError
};

struct Dataset {
  Matrix features;  // N x input_dim
  std::vector<std::size_t> labels;
  std::size_t num_classes = 0;
  std::string split;  // "train" or "test"

  std::size_t size() const { return labels.size(); }
};

// Class centers, C x input_dim: superclass centers drawn on a sphere of
// radius super_separation, fine offsets of norm fine_separation
// orthogonalized within each superclass when the dimension allows.
Matrix synthetic_class_centers(const SyntheticSpec& spec);

// Deterministic in spec.seed; train and test are drawn from independent
// streams. The train split holds exactly train_per_class samples per class.
std::pair<Dataset, Dataset> generate_synthetic(const SyntheticSpec& spec);

// Rows are `label,f1,...,fd`; no header; dimension inferred from the first
// row and enforced. Parse errors name the 1-based line.
Dataset load_csv(const std::filesystem::path& path, std::size_t num_classes);
void save_csv(const Dataset& data, const std::filesystem::path& path);

// Seeded permutation of [0, N) split into batches; the last batch may be
// short.
std::vector<std::vector<std::size_t>> split_batches(const Dataset& data, std::size_t batch_size,
                                                    std::uint64_t seed);

}  // namespace figkd
