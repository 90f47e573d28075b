#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "figkd/data.hpp"
#include "figkd/losses.hpp"
#include "figkd/nn.hpp"

#include <json.hpp>

namespace figkd {

enum class LossVariant { kCe, kKd, kFigkd, kBand };
enum class DatasetKind { kSynthetic, kCsv };

std::string variant_name(LossVariant v);

// One config drives every subcommand. Defaults are the desk-scale setup:
// teacher 128 / student 8 hidden units, 200 epochs, batch 32, SGD lr 0.05
// with momentum 0.9 and weight decay 5e-4, alpha = beta = 2, seeds {1,2,3}.
struct TrainConfig {
  LossVariant variant = LossVariant::kFigkd;
  bool use_low = false;  // band variant selection
  bool use_high = true;
  LossWeights weights;
  SgdConfig sgd;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  std::size_t teacher_hidden = 128;
  std::size_t student_hidden = 8;
  std::vector<std::uint64_t> seeds = {1, 2, 3};

  DatasetKind dataset = DatasetKind::kSynthetic;
  SyntheticSpec synthetic;
  std::string train_csv;
  std::string test_csv;
  std::size_t csv_num_classes = 0;

  // Weight-sweep grids (two 1-D sweeps: beta varied at fixed alpha, then
  // alpha varied at fixed beta).
  std::vector<double> alpha_values = {1, 2, 4, 6, 8};
  std::vector<double> beta_values = {1, 2, 4, 6, 8};
  double sweep_fixed_alpha = 1.0;
  double sweep_fixed_beta = 2.0;

  void validate() const;  // throws ConfigError
};

// Applies one `key = value` entry; unknown keys and malformed values throw
// ConfigError. The CLI funnels both config-file lines and command-line flags
// through here, so flags override the file by being applied afterwards.
void apply_config_entry(TrainConfig& cfg, std::string_view key, std::string_view value);

// Line-oriented `key = value` file; `#` starts a comment; blank lines are
// skipped. Errors name the 1-based line.
void load_config_file(TrainConfig& cfg, const std::filesystem::path& path);

// Config echo for reports, with a fixed key order.
nlohmann::ordered_json config_to_json(const TrainConfig& cfg);

}  // namespace figkd
