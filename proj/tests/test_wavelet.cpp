#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "figkd/errors.hpp"
#include "figkd/rng.hpp"
#include "figkd/wavelet.hpp"

using namespace figkd;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.values) v = scale * (2.0 * rng.uniform() - 1.0);
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  REQUIRE(a.same_shape(b));
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, std::abs(a.values[k] - b.values[k]));
  }
  return worst;
}

double sum_squares(const Matrix& m) {
  double s = 0.0;
  for (double v : m.values) s += v * v;
  return s;
}

double band_energy(const WaveletBands& b) {
  return sum_squares(b.ll) + sum_squares(b.lh) + sum_squares(b.hl) + sum_squares(b.hh);
}

}  // namespace

TEST_CASE("constant grid has zero detail") {
  const auto bands = dwt2_haar(LogitGrid::from_matrix(Matrix::from_rows({{1, 1}, {1, 1}})));
  CHECK(bands.ll(0, 0) == doctest::Approx(2.0));
  CHECK(bands.lh(0, 0) == 0.0);
  CHECK(bands.hl(0, 0) == 0.0);
  CHECK(bands.hh(0, 0) == 0.0);
}

TEST_CASE("2x2 block formula and Parseval on [[1,2],[3,4]]") {
  const auto bands = dwt2_haar(LogitGrid::from_matrix(Matrix::from_rows({{1, 2}, {3, 4}})));
  CHECK(bands.ll(0, 0) == doctest::Approx(5.0));
  CHECK(bands.lh(0, 0) == doctest::Approx(-1.0));
  CHECK(bands.hl(0, 0) == doctest::Approx(-2.0));
  CHECK(bands.hh(0, 0) == doctest::Approx(0.0));
  // 1 + 4 + 9 + 16 = 25 + 1 + 4 + 0 = 30
  CHECK(band_energy(bands) == doctest::Approx(30.0));
}

TEST_CASE("row vector pads by replication, so vertical detail vanishes") {
  const auto bands = dwt2_haar(LogitGrid::from_matrix(Matrix::from_rows({{1, 2, 3, 4}})));
  CHECK(bands.source.pad_rows == 1);
  CHECK(bands.source.pad_cols == 0);
  CHECK(bands.ll.rows == 1);
  CHECK(bands.ll.cols == 2);
  for (std::size_t j = 0; j < bands.hl.cols; ++j) {
    CHECK(bands.hl(0, j) == 0.0);
    CHECK(bands.hh(0, j) == 0.0);
  }
}

TEST_CASE("inverse of explicit bands") {
  WaveletBands bands;
  bands.source = {2, 2, 0, 0};

  SUBCASE("pure LL reproduces the constant grid") {
    bands.ll = Matrix::from_rows({{2}});
    bands.lh = Matrix::from_rows({{0}});
    bands.hl = Matrix::from_rows({{0}});
    bands.hh = Matrix::from_rows({{0}});
    const LogitGrid g = idwt2_haar(bands);
    CHECK(max_abs_diff(g.values, Matrix::from_rows({{1, 1}, {1, 1}})) == 0.0);
  }

  SUBCASE("detail-only bands") {
    bands.ll = Matrix::from_rows({{0}});
    bands.lh = Matrix::from_rows({{-1}});
    bands.hl = Matrix::from_rows({{-2}});
    bands.hh = Matrix::from_rows({{0}});
    const LogitGrid g = idwt2_haar(bands);
    CHECK(max_abs_diff(g.values, Matrix::from_rows({{-1.5, -0.5}, {0.5, 1.5}})) <= 1e-15);
    // Forward transform of the result must reproduce the bands.
    const auto round = dwt2_haar(g);
    CHECK(round.ll(0, 0) == doctest::Approx(0.0));
    CHECK(round.lh(0, 0) == doctest::Approx(-1.0));
    CHECK(round.hl(0, 0) == doctest::Approx(-2.0));
    CHECK(round.hh(0, 0) == doctest::Approx(0.0));
  }
}

TEST_CASE("perfect reconstruction on random grids") {
  Rng rng(123);
  const std::pair<std::size_t, std::size_t> shapes[] = {
      {10, 10}, {3, 5}, {1, 7}, {4, 5}, {2, 2}, {1, 1}, {9, 2}};
  for (const auto& [rows, cols] : shapes) {
    for (int rep = 0; rep < 20; ++rep) {
      const Matrix m = random_matrix(rows, cols, rng, 10.0);
      const LogitGrid g = LogitGrid::from_matrix(m);
      const LogitGrid back = idwt2_haar(dwt2_haar(g));
      CHECK(back.values.rows == rows);
      CHECK(back.values.cols == cols);
      CHECK(max_abs_diff(back.values, m) <= 1e-10);
    }
  }
}

TEST_CASE("energy conservation") {
  Rng rng(7);
  SUBCASE("even shapes, against the input") {
    for (int rep = 0; rep < 50; ++rep) {
      const Matrix m = random_matrix(6, 8, rng, 5.0);
      const double in = sum_squares(m);
      const double out = band_energy(dwt2_haar(LogitGrid::from_matrix(m)));
      CHECK(std::abs(in - out) <= 1e-9 * std::max(in, 1.0));
    }
  }
  SUBCASE("odd shapes, against the padded input") {
    for (int rep = 0; rep < 50; ++rep) {
      const Matrix m = random_matrix(5, 7, rng, 5.0);
      const double in = sum_squares(edge_pad(m));
      const double out = band_energy(dwt2_haar(LogitGrid::from_matrix(m)));
      CHECK(std::abs(in - out) <= 1e-9 * std::max(in, 1.0));
    }
  }
}

TEST_CASE("linearity on even grids") {
  Rng rng(99);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix m1 = random_matrix(4, 6, rng);
    const Matrix m2 = random_matrix(4, 6, rng);
    const double a = 2.0 * rng.uniform() - 1.0;
    const double b = 2.0 * rng.uniform() - 1.0;
    Matrix mix(4, 6);
    for (std::size_t k = 0; k < mix.size(); ++k) {
      mix.values[k] = a * m1.values[k] + b * m2.values[k];
    }
    const auto bm = dwt2_haar(LogitGrid::from_matrix(mix));
    const auto b1 = dwt2_haar(LogitGrid::from_matrix(m1));
    const auto b2 = dwt2_haar(LogitGrid::from_matrix(m2));
    const Matrix* lhs[] = {&bm.ll, &bm.lh, &bm.hl, &bm.hh};
    const Matrix* rhs1[] = {&b1.ll, &b1.lh, &b1.hl, &b1.hh};
    const Matrix* rhs2[] = {&b2.ll, &b2.lh, &b2.hl, &b2.hh};
    for (int band = 0; band < 4; ++band) {
      for (std::size_t k = 0; k < lhs[band]->size(); ++k) {
        const double expect = a * rhs1[band]->values[k] + b * rhs2[band]->values[k];
        CHECK(std::abs(lhs[band]->values[k] - expect) <= 1e-10);
      }
    }
  }
}

TEST_CASE("uniform shifts leave the detail bands alone") {
  SUBCASE("integer grid, exact") {
    const Matrix m = Matrix::from_rows({{1, 5, 2, 8}, {3, 3, 9, 1}, {7, 2, 4, 6}, {5, 5, 1, 2}});
    Matrix shifted = m;
    for (double& v : shifted.values) v += 11.0;
    const auto b0 = dwt2_haar(LogitGrid::from_matrix(m));
    const auto b1 = dwt2_haar(LogitGrid::from_matrix(shifted));
    CHECK(max_abs_diff(b0.lh, b1.lh) == 0.0);
    CHECK(max_abs_diff(b0.hl, b1.hl) == 0.0);
    CHECK(max_abs_diff(b0.hh, b1.hh) == 0.0);
  }
  SUBCASE("real grid, up to rounding") {
    Rng rng(4);
    const Matrix m = random_matrix(6, 6, rng);
    Matrix shifted = m;
    for (double& v : shifted.values) v += 3.7;
    const auto b0 = dwt2_haar(LogitGrid::from_matrix(m));
    const auto b1 = dwt2_haar(LogitGrid::from_matrix(shifted));
    CHECK(max_abs_diff(b0.lh, b1.lh) <= 1e-12);
    CHECK(max_abs_diff(b0.hl, b1.hl) <= 1e-12);
    CHECK(max_abs_diff(b0.hh, b1.hh) <= 1e-12);
  }
}

TEST_CASE("band surgery") {
  const Matrix m = Matrix::from_rows({{1, 2}, {3, 4}});
  const auto bands = dwt2_haar(LogitGrid::from_matrix(m));

  SUBCASE("keeping everything is the inverse transform") {
    CHECK(max_abs_diff(reconstruct_from_bands(bands, true, true).values, m) <= 1e-12);
  }
  SUBCASE("high-frequency only drops the per-block mean") {
    const LogitGrid hf = reconstruct_from_bands(bands, false, true);
    CHECK(max_abs_diff(hf.values, Matrix::from_rows({{-1.5, -0.5}, {0.5, 1.5}})) <= 1e-15);
  }
  SUBCASE("low-frequency only is the per-block mean field") {
    const LogitGrid ll = reconstruct_from_bands(bands, true, false);
    CHECK(max_abs_diff(ll.values, Matrix::from_rows({{2.5, 2.5}, {2.5, 2.5}})) <= 1e-15);
  }
  SUBCASE("neither band gives the zero grid") {
    const LogitGrid zero = reconstruct_from_bands(bands, false, false);
    for (double v : zero.values.values) CHECK(v == 0.0);
  }
}

TEST_CASE("additive split: LL part plus HF part recovers the grid") {
  Rng rng(31);
  const std::pair<std::size_t, std::size_t> shapes[] = {{4, 4}, {5, 7}, {1, 9}};
  for (const auto& [rows, cols] : shapes) {
    const Matrix m = random_matrix(rows, cols, rng, 3.0);
    const auto bands = dwt2_haar(LogitGrid::from_matrix(m));
    const LogitGrid low = reconstruct_from_bands(bands, true, false);
    const LogitGrid high = reconstruct_from_bands(bands, false, true);
    Matrix sum(rows, cols);
    for (std::size_t k = 0; k < sum.size(); ++k) {
      sum.values[k] = low.values.values[k] + high.values.values[k];
    }
    CHECK(max_abs_diff(sum, m) <= 1e-10);
  }
}

TEST_CASE("adjoint identity <W x, y> == <x, W^T y>") {
  Rng rng(55);
  const std::pair<std::size_t, std::size_t> shapes[] = {{4, 6}, {3, 5}, {1, 7}};
  for (const auto& [rows, cols] : shapes) {
    const Matrix x = random_matrix(rows, cols, rng);
    const auto bx = dwt2_haar(LogitGrid::from_matrix(x));

    WaveletBands y;
    y.source = bx.source;
    y.ll = random_matrix(bx.ll.rows, bx.ll.cols, rng);
    y.lh = random_matrix(bx.ll.rows, bx.ll.cols, rng);
    y.hl = random_matrix(bx.ll.rows, bx.ll.cols, rng);
    y.hh = random_matrix(bx.ll.rows, bx.ll.cols, rng);

    double lhs = 0.0;
    const Matrix* bands_x[] = {&bx.ll, &bx.lh, &bx.hl, &bx.hh};
    const Matrix* bands_y[] = {&y.ll, &y.lh, &y.hl, &y.hh};
    for (int band = 0; band < 4; ++band) {
      for (std::size_t k = 0; k < bands_x[band]->size(); ++k) {
        lhs += bands_x[band]->values[k] * bands_y[band]->values[k];
      }
    }
    const Matrix adj = dwt2_haar_adjoint(y);
    double rhs = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) rhs += x.values[k] * adj.values[k];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("error paths") {
  Matrix bad = Matrix::from_rows({{1, 2}, {3, 4}});
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(dwt2_haar(LogitGrid::from_matrix(bad)), InvalidInputError);

  WaveletBands b;
  b.source = {2, 2, 0, 0};
  b.ll = Matrix::from_rows({{1}});
  b.lh = Matrix::from_rows({{1, 2}});  // shape mismatch
  b.hl = Matrix::from_rows({{1}});
  b.hh = Matrix::from_rows({{1}});
  CHECK_THROWS_AS(idwt2_haar(b), InvalidInputError);

  b.lh = Matrix::from_rows({{1}});
  b.source = {4, 4, 0, 0};  // inconsistent with 1x1 bands
  CHECK_THROWS_AS(idwt2_haar(b), InvalidInputError);

  CHECK_THROWS_AS(LogitGrid::from_matrix(Matrix()), InvalidInputError);
}

TEST_CASE("band CSV dump writes four row-major files") {
  const auto bands = dwt2_haar(LogitGrid::from_matrix(Matrix::from_rows({{1, 2}, {3, 4}})));
  const auto dir = std::filesystem::temp_directory_path() / "figkd_band_dump_test";
  std::filesystem::create_directories(dir);
  dump_bands_csv(bands, dir / "sample");
  for (const char* suffix : {"_ll.csv", "_lh.csv", "_hl.csv", "_hh.csv"}) {
    const auto path = dir / (std::string("sample") + suffix);
    REQUIRE(std::filesystem::exists(path));
  }
  std::ifstream ll(dir / "sample_ll.csv");
  std::string line;
  std::getline(ll, line);
  CHECK(line == "5");
  std::filesystem::remove_all(dir);
}
