#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "figkd/data.hpp"
#include "figkd/errors.hpp"
#include "figkd/harness.hpp"
#include "oracles.hpp"

using namespace figkd;

namespace {

SyntheticSpec small_spec() {
  SyntheticSpec s;
  s.num_superclasses = 3;
  s.classes_per_superclass = 3;
  s.input_dim = 16;
  s.super_separation = 6.0;
  s.fine_separation = 1.0;
  s.noise_sigma = 0.4;
  s.train_per_class = 20;
  s.test_per_class = 10;
  s.seed = 5;
  return s;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("generation is deterministic in the seed") {
  const SyntheticSpec spec = small_spec();
  const auto [train_a, test_a] = generate_synthetic(spec);
  const auto [train_b, test_b] = generate_synthetic(spec);
  CHECK(train_a.features.values == train_b.features.values);
  CHECK(test_a.features.values == test_b.features.values);
  CHECK(train_a.labels == train_b.labels);

  SyntheticSpec other = spec;
  other.seed = 6;
  const auto [train_c, test_c] = generate_synthetic(other);
  CHECK(train_a.features.values != train_c.features.values);
}

TEST_CASE("train split is exactly balanced") {
  const SyntheticSpec spec = small_spec();
  const auto [train, test] = generate_synthetic(spec);
  CHECK(train.size() == spec.num_classes() * spec.train_per_class);
  CHECK(test.size() == spec.num_classes() * spec.test_per_class);
  std::vector<std::size_t> counts(spec.num_classes(), 0);
  for (std::size_t l : train.labels) ++counts[l];
  for (std::size_t c : counts) CHECK(c == spec.train_per_class);
}

TEST_CASE("fine-grained structure: within-superclass centers are closer") {
  const SyntheticSpec spec = small_spec();
  const Matrix centers = synthetic_class_centers(spec);
  double within = 0.0, across = 0.0;
  std::size_t nw = 0, na = 0;
  for (std::size_t a = 0; a < centers.rows; ++a) {
    for (std::size_t b = a + 1; b < centers.rows; ++b) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < centers.cols; ++k) {
        const double d = centers(a, k) - centers(b, k);
        d2 += d * d;
      }
      const double dist = std::sqrt(d2);
      const bool same_super =
          a / spec.classes_per_superclass == b / spec.classes_per_superclass;
      if (same_super) {
        within += dist;
        ++nw;
      } else {
        across += dist;
        ++na;
      }
    }
  }
  CHECK(within / static_cast<double>(nw) < across / static_cast<double>(na));
}

TEST_CASE("orthogonalized fine offsets keep classes at the stated separation") {
  const SyntheticSpec spec = small_spec();
  const Matrix centers = synthetic_class_centers(spec);
  // Pairwise distance of two orthogonal offsets of norm r is r * sqrt(2).
  const double expect = spec.fine_separation * std::sqrt(2.0);
  for (std::size_t s = 0; s < spec.num_superclasses; ++s) {
    for (std::size_t a = 0; a < spec.classes_per_superclass; ++a) {
      for (std::size_t b = a + 1; b < spec.classes_per_superclass; ++b) {
        const std::size_t ca = s * spec.classes_per_superclass + a;
        const std::size_t cb = s * spec.classes_per_superclass + b;
        double d2 = 0.0;
        for (std::size_t k = 0; k < centers.cols; ++k) {
          const double d = centers(ca, k) - centers(cb, k);
          d2 += d * d;
        }
        CHECK(std::sqrt(d2) == doctest::Approx(expect).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("noise-free limit is perfectly separable by nearest centroid") {
  SyntheticSpec spec = small_spec();
  spec.noise_sigma = 1e-6;
  const auto [train, test] = generate_synthetic(spec);
  CHECK(oracles::nearest_centroid_accuracy(train, test) == 1.0);
}

TEST_CASE("fine_separation zero makes classes within a superclass indistinguishable") {
  // Train the teacher MLP over 3 seeds; accuracy cannot beat superclass
  // guessing (1 / classes_per_superclass) by more than noise.
  SyntheticSpec spec;
  spec.num_superclasses = 2;
  spec.classes_per_superclass = 3;
  spec.input_dim = 12;
  spec.super_separation = 6.0;
  spec.fine_separation = 0.0;
  spec.noise_sigma = 1.0;
  spec.train_per_class = 40;
  spec.test_per_class = 30;
  spec.seed = 11;

  TrainConfig cfg;
  cfg.synthetic = spec;
  cfg.teacher_hidden = 32;
  cfg.epochs = 60;
  cfg.seeds = {1, 2, 3};

  const auto [train, test] = generate_synthetic(spec);
  double mean = 0.0;
  for (const std::uint64_t seed : cfg.seeds) {
    mean += train_teacher(cfg, train, test, seed).test_accuracy;
  }
  mean /= 3.0;
  CHECK(mean <= 1.0 / 3.0 + 0.05);
}

TEST_CASE("csv round trip and errors") {
  const auto dir = std::filesystem::temp_directory_path() / "figkd_csv_test";
  std::filesystem::create_directories(dir);

  SUBCASE("two-line file parses") {
    const auto path = dir / "tiny.csv";
    std::ofstream(path) << "0,1.0,2.0\n1,3.0,4.0\n";
    const Dataset d = load_csv(path, 2);
    CHECK(d.size() == 2);
    CHECK(d.features.cols == 2);
    CHECK(d.labels[0] == 0);
    CHECK(d.labels[1] == 1);
    CHECK(d.features(1, 0) == 3.0);
  }
  SUBCASE("save(load(f)) reproduces the bytes of a saved file") {
    const auto [train, test] = generate_synthetic(small_spec());
    const auto p1 = dir / "roundtrip1.csv";
    const auto p2 = dir / "roundtrip2.csv";
    save_csv(test, p1);
    Dataset back = load_csv(p1, test.num_classes);
    save_csv(back, p2);
    CHECK(slurp(p1) == slurp(p2));
  }
  SUBCASE("out-of-range label names the line") {
    const auto path = dir / "badlabel.csv";
    std::ofstream(path) << "7,1.0\n";
    try {
      load_csv(path, 5);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find(":1:") != std::string::npos);
      CHECK(std::string(e.what()).find("label 7") != std::string::npos);
    }
  }
  SUBCASE("ragged row names the line") {
    const auto path = dir / "ragged.csv";
    std::ofstream(path) << "0,1.0,2.0\n1,3.0\n";
    try {
      load_csv(path, 2);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
  }
  SUBCASE("missing file is reported with its path") {
    try {
      load_csv(dir / "nope.csv", 2);
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("nope.csv") != std::string::npos);
    }
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("batch splitting") {
  Dataset d;
  d.num_classes = 2;
  d.labels.assign(10, 0);
  d.features = Matrix(10, 1);

  SUBCASE("sizes are [3,3,3,1] for N=10, batch 3") {
    const auto batches = split_batches(d, 3, 1);
    REQUIRE(batches.size() == 4);
    CHECK(batches[0].size() == 3);
    CHECK(batches[1].size() == 3);
    CHECK(batches[2].size() == 3);
    CHECK(batches[3].size() == 1);
  }
  SUBCASE("batches partition the index set") {
    const auto batches = split_batches(d, 4, 9);
    std::set<std::size_t> seen;
    for (const auto& b : batches) {
      for (std::size_t i : b) CHECK(seen.insert(i).second);
    }
    CHECK(seen.size() == 10);
    CHECK(*seen.rbegin() == 9);
  }
  SUBCASE("same seed same order, different seed different order") {
    Dataset big;
    big.num_classes = 2;
    big.labels.assign(100, 0);
    big.features = Matrix(100, 1);
    const auto a = split_batches(big, 10, 4);
    const auto b = split_batches(big, 10, 4);
    const auto c = split_batches(big, 10, 5);
    CHECK(a == b);
    CHECK(a != c);
  }
  SUBCASE("zero batch size is rejected") {
    CHECK_THROWS_AS(split_batches(d, 0, 1), InvalidInputError);
  }
}

TEST_CASE("spec validation") {
  SyntheticSpec s = small_spec();
  s.fine_separation = 7.0;  // >= super_separation
  CHECK_THROWS_AS(s.validate(), InvalidInputError);
  s = small_spec();
  s.noise_sigma = 0.0;
  CHECK_THROWS_AS(s.validate(), InvalidInputError);
  s = small_spec();
  s.input_dim = 0;
  CHECK_THROWS_AS(s.validate(), InvalidInputError);
  s = small_spec();
  s.fine_separation = 0.0;  // the indistinguishable limit stays legal
  CHECK_NOTHROW(s.validate());
}
