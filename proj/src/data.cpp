#include "figkd/data.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <string>

#include "figkd/errors.hpp"
#include "figkd/numfmt.hpp"
#include "figkd/rng.hpp"

namespace figkd {

namespace {

constexpr std::uint64_t kCentersStream = 0;
constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kTestStream = 2;

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> gaussian_vector(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  for (double& x : v) x = rng.gaussian();
  return v;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (num_superclasses == 0 || classes_per_superclass == 0) {
    throw InvalidInputError("superclass and class counts must be positive");
  }
  if (input_dim == 0) throw InvalidInputError("input_dim must be positive");
  if (!(super_separation > 0.0)) throw InvalidInputError("super_separation must be positive");
  // fine_separation == 0 is the indistinguishable-classes limit; keep it legal.
  if (fine_separation < 0.0 || !(fine_separation < super_separation)) {
    throw InvalidInputError("fine_separation must lie in [0, super_separation)");
  }
  if (!(noise_sigma > 0.0)) throw InvalidInputError("noise_sigma must be positive");
  if (train_per_class == 0 || test_per_class == 0) {
    throw InvalidInputError("samples per class must be positive");
  }
}

Matrix synthetic_class_centers(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(mix_seed(spec.seed, kCentersStream));
  const std::size_t dim = spec.input_dim;
  Matrix centers(spec.num_classes(), dim);

  for (std::size_t s = 0; s < spec.num_superclasses; ++s) {
    std::vector<double> super = gaussian_vector(rng, dim);
    double n = norm(super);
    while (n < 1e-12) {  // never in practice
      super = gaussian_vector(rng, dim);
      n = norm(super);
    }
    for (double& x : super) x *= spec.super_separation / n;

    // Fine offsets, orthogonalized within the superclass when possible so
    // classes sit at the stated separation in distinct directions.
    std::vector<std::vector<double>> offsets;
    for (std::size_t m = 0; m < spec.classes_per_superclass; ++m) {
      std::vector<double> raw = gaussian_vector(rng, dim);
      std::vector<double> off = raw;
      for (const auto& prev : offsets) {
        double dot = 0.0;
        for (std::size_t i = 0; i < dim; ++i) dot += off[i] * prev[i];
        const double prev_sq = std::inner_product(prev.begin(), prev.end(), prev.begin(), 0.0);
        if (prev_sq > 0.0) {
          for (std::size_t i = 0; i < dim; ++i) off[i] -= dot / prev_sq * prev[i];
        }
      }
      if (norm(off) < 1e-9 * std::max(1.0, norm(raw))) off = raw;  // dim exhausted
      const double off_norm = norm(off);
      const double scale = off_norm > 0.0 ? spec.fine_separation / off_norm : 0.0;
      for (double& x : off) x *= scale;
      offsets.push_back(off);

      const std::size_t cls = s * spec.classes_per_superclass + m;
      for (std::size_t i = 0; i < dim; ++i) centers(cls, i) = super[i] + off[i];
    }
  }
  return centers;
}

namespace {

Dataset sample_split(const SyntheticSpec& spec, const Matrix& centers, std::size_t per_class,
                     std::uint64_t stream, const char* split) {
  Rng rng(mix_seed(spec.seed, stream));
  const std::size_t classes = spec.num_classes();
  Dataset d;
  d.num_classes = classes;
  d.split = split;
  d.features = Matrix(classes * per_class, spec.input_dim);
  d.labels.resize(classes * per_class);
  std::size_t row = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t k = 0; k < per_class; ++k, ++row) {
      d.labels[row] = c;
      for (std::size_t i = 0; i < spec.input_dim; ++i) {
        d.features(row, i) = centers(c, i) + spec.noise_sigma * rng.gaussian();
      }
    }
  }
  return d;
}

}  // namespace

std::pair<Dataset, Dataset> generate_synthetic(const SyntheticSpec& spec) {
  const Matrix centers = synthetic_class_centers(spec);
  Dataset train = sample_split(spec, centers, spec.train_per_class, kTrainStream, "train");
  Dataset test = sample_split(spec, centers, spec.test_per_class, kTestStream, "test");
  return {std::move(train), std::move(test)};
}

Dataset load_csv(const std::filesystem::path& path, std::size_t num_classes) {
  if (num_classes == 0) throw InvalidInputError("num_classes must be positive");
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  Dataset d;
  d.num_classes = num_classes;
  std::vector<double> features;
  std::size_t dim = 0;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + what);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;  // tolerate a trailing blank line
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() < 2) fail("expected `label,f1,...,fd`");
    if (dim == 0) {
      dim = fields.size() - 1;
    } else if (fields.size() - 1 != dim) {
      fail("expected " + std::to_string(dim + 1) + " fields, got " +
           std::to_string(fields.size()));
    }

    char* end = nullptr;
    const unsigned long long label = std::strtoull(fields[0].c_str(), &end, 10);
    if (end == fields[0].c_str() || *end != '\0') fail("bad label '" + fields[0] + "'");
    if (label >= num_classes) {
      fail("label " + std::to_string(label) + " >= num_classes " + std::to_string(num_classes));
    }
    d.labels.push_back(static_cast<std::size_t>(label));
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const double v = std::strtod(fields[i].c_str(), &end);
      if (end == fields[i].c_str() || *end != '\0') fail("bad value '" + fields[i] + "'");
      if (!std::isfinite(v)) fail("non-finite value '" + fields[i] + "'");
      features.push_back(v);
    }
  }
  if (d.labels.empty()) throw ParseError(path.string() + ": file holds no samples");

  d.features.rows = d.labels.size();
  d.features.cols = dim;
  d.features.values = std::move(features);
  return d;
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (std::size_t r = 0; r < data.size(); ++r) {
    out << data.labels[r];
    for (std::size_t i = 0; i < data.features.cols; ++i) {
      out << ',' << format_g9(data.features(r, i));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<std::vector<std::size_t>> split_batches(const Dataset& data, std::size_t batch_size,
                                                    std::uint64_t seed) {
  if (batch_size == 0) throw InvalidInputError("batch_size must be positive");
  std::vector<std::size_t> perm(data.size());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  rng.shuffle(perm);

  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < perm.size(); start += batch_size) {
    const std::size_t end = std::min(start + batch_size, perm.size());
    batches.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(start),
                         perm.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

}  // namespace figkd
