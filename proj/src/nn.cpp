#include "figkd/nn.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "figkd/errors.hpp"
#include "figkd/rng.hpp"

namespace figkd {

namespace {

constexpr std::uint32_t kCheckpointMagic = 0x444B4746;  // "FGKD" little-endian
constexpr std::uint32_t kCheckpointVersion = 1;

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void append_doubles(std::vector<std::uint8_t>& out, std::span<const double> v) {
  for (double x : v) append_u64(out, std::bit_cast<std::uint64_t>(x));
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t read_u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(next()) << (8 * i);
    return v;
  }

  std::uint64_t read_u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(next()) << (8 * i);
    return v;
  }

  void read_doubles(std::span<double> out) {
    for (double& x : out) x = std::bit_cast<double>(read_u64());
  }

  bool exhausted() const { return pos_ == bytes_.size(); }

 private:
  std::uint8_t next() {
    if (pos_ >= bytes_.size()) throw ParseError("checkpoint truncated");
    return bytes_[pos_++];
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void check_param_shapes(const MlpParams& p) {
  const bool ok = p.input_dim > 0 && p.hidden_dim > 0 && p.num_classes > 0 &&
                  p.w1.rows == p.hidden_dim && p.w1.cols == p.input_dim &&
                  p.b1.size() == p.hidden_dim && p.w2.rows == p.num_classes &&
                  p.w2.cols == p.hidden_dim && p.b2.size() == p.num_classes &&
                  p.vw1.same_shape(p.w1) && p.vb1.size() == p.b1.size() &&
                  p.vw2.same_shape(p.w2) && p.vb2.size() == p.b2.size();
  if (!ok) throw InvalidInputError("MLP parameter shapes are inconsistent");
}

}  // namespace

void SgdConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InvalidInputError("learning_rate must be positive");
  if (momentum < 0.0 || momentum >= 1.0) throw InvalidInputError("momentum must lie in [0, 1)");
  if (weight_decay < 0.0) throw InvalidInputError("weight_decay must be nonnegative");
}

MlpGrads MlpGrads::zeros(const MlpParams& p) {
  MlpGrads g;
  g.w1 = Matrix(p.hidden_dim, p.input_dim);
  g.b1.assign(p.hidden_dim, 0.0);
  g.w2 = Matrix(p.num_classes, p.hidden_dim);
  g.b2.assign(p.num_classes, 0.0);
  return g;
}

void MlpGrads::zero() {
  std::fill(w1.values.begin(), w1.values.end(), 0.0);
  std::fill(b1.begin(), b1.end(), 0.0);
  std::fill(w2.values.begin(), w2.values.end(), 0.0);
  std::fill(b2.begin(), b2.end(), 0.0);
}

void MlpGrads::scale(double s) {
  for (double& v : w1.values) v *= s;
  for (double& v : b1) v *= s;
  for (double& v : w2.values) v *= s;
  for (double& v : b2) v *= s;
}

MlpParams init_params(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes,
                      std::uint64_t seed) {
  if (input_dim == 0 || hidden_dim == 0 || num_classes == 0) {
    throw InvalidInputError("MLP dimensions must be positive");
  }
  MlpParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.num_classes = num_classes;
  p.seed = seed;
  p.w1 = Matrix(hidden_dim, input_dim);
  p.b1.assign(hidden_dim, 0.0);
  p.w2 = Matrix(num_classes, hidden_dim);
  p.b2.assign(num_classes, 0.0);
  p.vw1 = Matrix(hidden_dim, input_dim);
  p.vb1.assign(hidden_dim, 0.0);
  p.vw2 = Matrix(num_classes, hidden_dim);
  p.vb2.assign(num_classes, 0.0);

  Rng rng(seed);
  const double s1 = std::sqrt(2.0 / static_cast<double>(input_dim));
  for (double& w : p.w1.values) w = rng.gaussian() * s1;
  const double s2 = std::sqrt(2.0 / static_cast<double>(hidden_dim));
  for (double& w : p.w2.values) w = rng.gaussian() * s2;
  return p;
}

std::vector<double> forward(const MlpParams& params, std::span<const double> x,
                            ForwardCache* cache) {
  check_param_shapes(params);
  if (x.size() != params.input_dim) {
    throw InvalidInputError("input length " + std::to_string(x.size()) +
                            " does not match input_dim " + std::to_string(params.input_dim));
  }
  if (!all_finite(x)) throw InvalidInputError("input contains non-finite entries");

  std::vector<double> hidden_pre(params.hidden_dim);
  for (std::size_t h = 0; h < params.hidden_dim; ++h) {
    double acc = params.b1[h];
    const std::span<const double> row = params.w1.row(h);
    for (std::size_t i = 0; i < params.input_dim; ++i) acc += row[i] * x[i];
    hidden_pre[h] = acc;
  }
  std::vector<double> hidden(params.hidden_dim);
  for (std::size_t h = 0; h < params.hidden_dim; ++h) {
    hidden[h] = hidden_pre[h] > 0.0 ? hidden_pre[h] : 0.0;
  }
  std::vector<double> logits(params.num_classes);
  for (std::size_t c = 0; c < params.num_classes; ++c) {
    double acc = params.b2[c];
    const std::span<const double> row = params.w2.row(c);
    for (std::size_t h = 0; h < params.hidden_dim; ++h) acc += row[h] * hidden[h];
    logits[c] = acc;
  }
  if (cache != nullptr) {
    cache->input.assign(x.begin(), x.end());
    cache->hidden_pre = hidden_pre;
    cache->hidden = std::move(hidden);
  }
  return logits;
}

void backward_accumulate(const MlpParams& params, const ForwardCache& cache,
                         std::span<const double> grad_logits, MlpGrads& acc) {
  check_param_shapes(params);
  if (cache.input.size() != params.input_dim || cache.hidden_pre.size() != params.hidden_dim ||
      cache.hidden.size() != params.hidden_dim) {
    throw InvalidInputError("forward cache does not match parameter shapes");
  }
  if (grad_logits.size() != params.num_classes) {
    throw InvalidInputError("logit gradient length does not match num_classes");
  }

  std::vector<double> grad_hidden(params.hidden_dim, 0.0);
  for (std::size_t c = 0; c < params.num_classes; ++c) {
    const double g = grad_logits[c];
    acc.b2[c] += g;
    const std::span<const double> w2_row = params.w2.row(c);
    const std::span<double> gw2_row = acc.w2.row(c);
    for (std::size_t h = 0; h < params.hidden_dim; ++h) {
      gw2_row[h] += g * cache.hidden[h];
      grad_hidden[h] += g * w2_row[h];
    }
  }
  for (std::size_t h = 0; h < params.hidden_dim; ++h) {
    const double gpre = cache.hidden_pre[h] > 0.0 ? grad_hidden[h] : 0.0;
    if (gpre == 0.0) continue;
    acc.b1[h] += gpre;
    const std::span<double> gw1_row = acc.w1.row(h);
    for (std::size_t i = 0; i < params.input_dim; ++i) {
      gw1_row[i] += gpre * cache.input[i];
    }
  }
}

MlpGrads backward(const MlpParams& params, const ForwardCache& cache,
                  std::span<const double> grad_logits) {
  MlpGrads g = MlpGrads::zeros(params);
  backward_accumulate(params, cache, grad_logits, g);
  return g;
}

void sgd_step(MlpParams& params, const MlpGrads& grads, const SgdConfig& cfg) {
  cfg.validate();
  check_param_shapes(params);
  if (grads.w1.size() != params.w1.size() || grads.b1.size() != params.b1.size() ||
      grads.w2.size() != params.w2.size() || grads.b2.size() != params.b2.size()) {
    throw InvalidInputError("gradient shapes do not match parameters");
  }

  bool finite = true;
  auto update = [&](std::span<double> param, std::span<double> vel, std::span<const double> grad) {
    for (std::size_t i = 0; i < param.size(); ++i) {
      const double v = cfg.momentum * vel[i] + grad[i] + cfg.weight_decay * param[i];
      vel[i] = v;
      param[i] -= cfg.learning_rate * v;
      finite = finite && std::isfinite(param[i]);
    }
  };
  update(params.w1.values, params.vw1.values, grads.w1.values);
  update(params.b1, params.vb1, grads.b1);
  update(params.w2.values, params.vw2.values, grads.w2.values);
  update(params.b2, params.vb2, grads.b2);
  if (!finite) throw TrainingDivergedError("parameter update produced non-finite values");
}

std::vector<std::uint8_t> serialize_checkpoint(const MlpParams& params) {
  check_param_shapes(params);
  std::vector<std::uint8_t> out;
  out.reserve(32 + 8 * (2 * (params.w1.size() + params.b1.size() + params.w2.size() +
                             params.b2.size())));
  append_u32(out, kCheckpointMagic);
  append_u32(out, kCheckpointVersion);
  append_u64(out, params.input_dim);
  append_u64(out, params.hidden_dim);
  append_u64(out, params.num_classes);
  append_u64(out, params.seed);
  append_doubles(out, params.w1.values);
  append_doubles(out, params.b1);
  append_doubles(out, params.w2.values);
  append_doubles(out, params.b2);
  append_doubles(out, params.vw1.values);
  append_doubles(out, params.vb1);
  append_doubles(out, params.vw2.values);
  append_doubles(out, params.vb2);
  return out;
}

MlpParams deserialize_checkpoint(std::span<const std::uint8_t> bytes) {
  ByteReader reader(bytes);
  if (reader.read_u32() != kCheckpointMagic) throw ParseError("not a figkd checkpoint");
  const std::uint32_t version = reader.read_u32();
  if (version != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(version));
  }
  MlpParams p;
  p.input_dim = reader.read_u64();
  p.hidden_dim = reader.read_u64();
  p.num_classes = reader.read_u64();
  p.seed = reader.read_u64();
  if (p.input_dim == 0 || p.hidden_dim == 0 || p.num_classes == 0) {
    throw ParseError("checkpoint has zero dimensions");
  }
  p.w1 = Matrix(p.hidden_dim, p.input_dim);
  p.b1.resize(p.hidden_dim);
  p.w2 = Matrix(p.num_classes, p.hidden_dim);
  p.b2.resize(p.num_classes);
  p.vw1 = Matrix(p.hidden_dim, p.input_dim);
  p.vb1.resize(p.hidden_dim);
  p.vw2 = Matrix(p.num_classes, p.hidden_dim);
  p.vb2.resize(p.num_classes);
  reader.read_doubles(p.w1.values);
  reader.read_doubles(p.b1);
  reader.read_doubles(p.w2.values);
  reader.read_doubles(p.b2);
  reader.read_doubles(p.vw1.values);
  reader.read_doubles(p.vb1);
  reader.read_doubles(p.vw2.values);
  reader.read_doubles(p.vb2);
  if (!reader.exhausted()) throw ParseError("trailing bytes in checkpoint");
  return p;
}

void save_checkpoint(const MlpParams& params, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = serialize_checkpoint(params);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

MlpParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return deserialize_checkpoint(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace figkd
