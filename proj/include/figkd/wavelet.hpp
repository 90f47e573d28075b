#pragma once

#include <cstddef>
#include <filesystem>

#include "figkd/matrix.hpp"

namespace figkd {

// A logit vector reshaped to an H x W matrix, plus the padding the transform
// will apply when a dimension is odd.
struct LogitGrid {
  Matrix values;                  // H x W, unpadded
  std::size_t original_len = 0;   // H * W
  int pad_rows = 0;               // 1 when H is odd
  int pad_cols = 0;               // 1 when W is odd

  static LogitGrid from_matrix(Matrix m);
};

struct BandSourceShape {
  std::size_t rows = 0;
  std::size_t cols = 0;
  int pad_rows = 0;
  int pad_cols = 0;
};

// Single-level 2D Haar subbands of a (padded) grid. The filter pair is the
// orthonormal Haar convention: low-pass (x1+x2)/sqrt(2), high-pass
// (x1-x2)/sqrt(2), applied along both axes. Per 2x2 input block
// [[a,b],[c,d]] (rows index height):
//   ll = (a+b+c+d)/2    lh = (a-b+c-d)/2
//   hl = (a+b-c-d)/2    hh = (a-b-c+d)/2
// The four bands share one shape; the transform conserves energy exactly.
struct WaveletBands {
  Matrix ll;
  Matrix lh;
  Matrix hl;
  Matrix hh;
  BandSourceShape source;
};

// Forward transform. Odd dimensions are edge-replicated to even size first;
// the padding is recorded in `source` and cropped again by the inverse.
// Throws InvalidInputError on non-finite input.
WaveletBands dwt2_haar(const LogitGrid& grid);

// Exact inverse of dwt2_haar (up to float rounding), padding cropped.
LogitGrid idwt2_haar(const WaveletBands& bands);

// Zeroes the bands whose flag is false, then inverts. Both flags set
// reproduces the input grid; both clear yields the zero grid.
LogitGrid reconstruct_from_bands(const WaveletBands& bands, bool keep_ll, bool keep_hf);

// Edge-replication padding to even dimensions, and its adjoint (folds
// gradients on replicated rows/cols back onto the source entries).
Matrix edge_pad(const Matrix& m);
Matrix edge_pad_adjoint(const Matrix& padded, std::size_t rows, std::size_t cols);

// Maps a cotangent in band space to a cotangent on the original unpadded
// grid. The transform is orthonormal, so this is the inverse block map
// followed by the padding adjoint; it is what loss gradients chain through.
Matrix dwt2_haar_adjoint(const WaveletBands& cotangent);

// Debug dump for the analyze-logits CLI: one CSV per band, row-major,
// written as <prefix>_ll.csv, _lh.csv, _hl.csv, _hh.csv.
void dump_bands_csv(const WaveletBands& bands, const std::filesystem::path& prefix);

}  // namespace figkd
