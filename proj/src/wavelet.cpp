#include "figkd/wavelet.hpp"

#include <fstream>

#include "figkd/errors.hpp"
#include "figkd/numfmt.hpp"

namespace figkd {

namespace {

void check_band_shapes(const WaveletBands& b) {
  if (b.ll.rows == 0 || b.ll.cols == 0) {
    throw InvalidInputError("wavelet bands are empty");
  }
  if (!b.ll.same_shape(b.lh) || !b.ll.same_shape(b.hl) || !b.ll.same_shape(b.hh)) {
    throw InvalidInputError("wavelet bands do not share one shape");
  }
  if (b.source.pad_rows < 0 || b.source.pad_rows > 1 || b.source.pad_cols < 0 ||
      b.source.pad_cols > 1) {
    throw InvalidInputError("band source padding flags must be 0 or 1");
  }
  const std::size_t padded_rows = b.source.rows + static_cast<std::size_t>(b.source.pad_rows);
  const std::size_t padded_cols = b.source.cols + static_cast<std::size_t>(b.source.pad_cols);
  if (padded_rows != 2 * b.ll.rows || padded_cols != 2 * b.ll.cols) {
    throw InvalidInputError("band shape inconsistent with recorded source shape");
  }
}

// Inverse of the 2x2 block map, without cropping the padding.
Matrix inverse_blocks(const WaveletBands& b) {
  const std::size_t br = b.ll.rows;
  const std::size_t bc = b.ll.cols;
  Matrix out(2 * br, 2 * bc);
  for (std::size_t i = 0; i < br; ++i) {
    for (std::size_t j = 0; j < bc; ++j) {
      const double ll = b.ll(i, j);
      const double lh = b.lh(i, j);
      const double hl = b.hl(i, j);
      const double hh = b.hh(i, j);
      out(2 * i, 2 * j) = (ll + lh + hl + hh) / 2.0;
      out(2 * i, 2 * j + 1) = (ll - lh + hl - hh) / 2.0;
      out(2 * i + 1, 2 * j) = (ll + lh - hl - hh) / 2.0;
      out(2 * i + 1, 2 * j + 1) = (ll - lh - hl + hh) / 2.0;
    }
  }
  return out;
}

}  // namespace

LogitGrid LogitGrid::from_matrix(Matrix m) {
  if (m.rows == 0 || m.cols == 0) {
    throw InvalidInputError("logit grid must have positive dimensions");
  }
  LogitGrid g;
  g.original_len = m.rows * m.cols;
  g.pad_rows = static_cast<int>(m.rows % 2);
  g.pad_cols = static_cast<int>(m.cols % 2);
  g.values = std::move(m);
  return g;
}

Matrix edge_pad(const Matrix& m) {
  const std::size_t pr = m.rows % 2;
  const std::size_t pc = m.cols % 2;
  if (pr == 0 && pc == 0) return m;
  Matrix out(m.rows + pr, m.cols + pc);
  for (std::size_t i = 0; i < out.rows; ++i) {
    const std::size_t si = i < m.rows ? i : m.rows - 1;
    for (std::size_t j = 0; j < out.cols; ++j) {
      const std::size_t sj = j < m.cols ? j : m.cols - 1;
      out(i, j) = m(si, sj);
    }
  }
  return out;
}

Matrix edge_pad_adjoint(const Matrix& padded, std::size_t rows, std::size_t cols) {
  if (padded.rows < rows || padded.cols < cols || padded.rows > rows + 1 ||
      padded.cols > cols + 1) {
    throw InvalidInputError("padded shape inconsistent with source shape");
  }
  Matrix out(rows, cols);
  for (std::size_t i = 0; i < padded.rows; ++i) {
    const std::size_t si = i < rows ? i : rows - 1;
    for (std::size_t j = 0; j < padded.cols; ++j) {
      const std::size_t sj = j < cols ? j : cols - 1;
      out(si, sj) += padded(i, j);
    }
  }
  return out;
}

WaveletBands dwt2_haar(const LogitGrid& grid) {
  if (grid.values.rows == 0 || grid.values.cols == 0) {
    throw InvalidInputError("cannot transform an empty grid");
  }
  if (!all_finite(grid.values)) {
    throw InvalidInputError("logit grid contains non-finite entries");
  }
  const Matrix padded = edge_pad(grid.values);
  const std::size_t br = padded.rows / 2;
  const std::size_t bc = padded.cols / 2;

  WaveletBands b;
  b.ll = Matrix(br, bc);
  b.lh = Matrix(br, bc);
  b.hl = Matrix(br, bc);
  b.hh = Matrix(br, bc);
  b.source = {grid.values.rows, grid.values.cols, static_cast<int>(padded.rows - grid.values.rows),
              static_cast<int>(padded.cols - grid.values.cols)};

  for (std::size_t i = 0; i < br; ++i) {
    for (std::size_t j = 0; j < bc; ++j) {
      const double a = padded(2 * i, 2 * j);
      const double bb = padded(2 * i, 2 * j + 1);
      const double c = padded(2 * i + 1, 2 * j);
      const double d = padded(2 * i + 1, 2 * j + 1);
      b.ll(i, j) = (a + bb + c + d) / 2.0;
      b.lh(i, j) = (a - bb + c - d) / 2.0;
      b.hl(i, j) = (a + bb - c - d) / 2.0;
      b.hh(i, j) = (a - bb - c + d) / 2.0;
    }
  }
  return b;
}

LogitGrid idwt2_haar(const WaveletBands& bands) {
  check_band_shapes(bands);
  Matrix padded = inverse_blocks(bands);
  if (bands.source.pad_rows == 0 && bands.source.pad_cols == 0) {
    return LogitGrid::from_matrix(std::move(padded));
  }
  Matrix cropped(bands.source.rows, bands.source.cols);
  for (std::size_t i = 0; i < cropped.rows; ++i) {
    for (std::size_t j = 0; j < cropped.cols; ++j) {
      cropped(i, j) = padded(i, j);
    }
  }
  return LogitGrid::from_matrix(std::move(cropped));
}

LogitGrid reconstruct_from_bands(const WaveletBands& bands, bool keep_ll, bool keep_hf) {
  check_band_shapes(bands);
  WaveletBands kept = bands;
  if (!keep_ll) kept.ll = Matrix(bands.ll.rows, bands.ll.cols);
  if (!keep_hf) {
    kept.lh = Matrix(bands.ll.rows, bands.ll.cols);
    kept.hl = Matrix(bands.ll.rows, bands.ll.cols);
    kept.hh = Matrix(bands.ll.rows, bands.ll.cols);
  }
  return idwt2_haar(kept);
}

Matrix dwt2_haar_adjoint(const WaveletBands& cotangent) {
  check_band_shapes(cotangent);
  const Matrix padded = inverse_blocks(cotangent);
  if (cotangent.source.pad_rows == 0 && cotangent.source.pad_cols == 0) {
    return padded;
  }
  return edge_pad_adjoint(padded, cotangent.source.rows, cotangent.source.cols);
}

void dump_bands_csv(const WaveletBands& bands, const std::filesystem::path& prefix) {
  check_band_shapes(bands);
  const std::pair<const char*, const Matrix*> named[] = {
      {"_ll.csv", &bands.ll}, {"_lh.csv", &bands.lh}, {"_hl.csv", &bands.hl}, {"_hh.csv", &bands.hh}};
  for (const auto& [suffix, band] : named) {
    const std::filesystem::path path = prefix.string() + suffix;
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < band->rows; ++i) {
      for (std::size_t j = 0; j < band->cols; ++j) {
        if (j > 0) out << ',';
        out << format_g9((*band)(i, j));
      }
      out << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
  }
}

}  // namespace figkd
