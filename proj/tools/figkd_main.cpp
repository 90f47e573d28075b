// figkd: train/distill/ablate/sweep/analyze CLI.
//
// Usage: figkd <subcommand> [--config FILE] [--KEY VALUE ...] [paths]
// Subcommands: gen-data, train-teacher, distill, ablate, sweep,
//              analyze-logits, report.
// Config-file keys and --KEY flags share names; flags override the file.
// Exit codes: 0 success, 2 invalid config, 3 training divergence.

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "figkd/config.hpp"
#include "figkd/data.hpp"
#include "figkd/errors.hpp"
#include "figkd/harness.hpp"
#include "figkd/logit_geometry.hpp"
#include "figkd/nn.hpp"
#include "figkd/report.hpp"
#include "figkd/wavelet.hpp"

namespace {

using figkd::ConfigError;
using figkd::TrainConfig;

constexpr const char* kUsage = R"(usage: figkd <subcommand> [options]

subcommands:
  gen-data        generate the synthetic dataset as CSV
                    --train-out FILE --test-out FILE
  train-teacher   cross-entropy teacher, one checkpoint per seed
                    --out FILE   (multi-seed runs write FILE stem + _seed<N>)
  distill         train students with the configured variant
                    --teacher FILE [--out FILE]
  ablate          low/high ablation matrix plus kd baseline
                    [--out FILE]   (default ablation_report.json)
  sweep           alpha/beta weight sweeps of the combined objective
                    [--out FILE]   (default sweep_report.json)
  analyze-logits  frequency-logit diagnosis for a checkpoint
                    --checkpoint FILE [--out FILE] [--dump-bands PREFIX]
  report          render a report JSON as a table
                    --in FILE [--out FILE rewrites canonical JSON]

options shared by training subcommands:
  --config FILE   key = value file; # starts a comment
  --KEY VALUE     any config key, overrides the file (e.g. --epochs 100)
)";

struct CliArgs {
  TrainConfig cfg;
  std::map<std::string, std::string> paths;  // subcommand path options
};

bool is_path_option(const std::string& sub, const std::string& key) {
  static const std::map<std::string, std::vector<std::string>> allowed = {
      {"gen-data", {"train-out", "test-out"}},
      {"train-teacher", {"out"}},
      {"distill", {"teacher", "out"}},
      {"ablate", {"out"}},
      {"sweep", {"out"}},
      {"analyze-logits", {"checkpoint", "out", "dump-bands"}},
      {"report", {"in", "out"}},
  };
  const auto it = allowed.find(sub);
  if (it == allowed.end()) return false;
  for (const auto& k : it->second) {
    if (k == key) return true;
  }
  return false;
}

CliArgs parse_args(const std::string& sub, int argc, char** argv, int first) {
  CliArgs args;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::optional<std::string> config_path;

  for (int i = first; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg.rfind("--", 0) != 0) throw ConfigError("unexpected argument '" + arg + "'");
    arg = arg.substr(2);
    std::string value;
    const std::size_t eq = arg.find('=');
    if (eq != std::string::npos) {
      value = arg.substr(eq + 1);
      arg = arg.substr(0, eq);
    } else {
      if (i + 1 >= argc) throw ConfigError("option '--" + arg + "' needs a value");
      value = argv[++i];
    }
    if (arg == "config") {
      config_path = value;
    } else if (is_path_option(sub, arg)) {
      args.paths[arg] = value;
    } else {
      overrides.emplace_back(arg, value);
    }
  }

  if (config_path) figkd::load_config_file(args.cfg, *config_path);
  for (const auto& [key, value] : overrides) {
    try {
      figkd::apply_config_entry(args.cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("flag --") + key + ": " + e.what());
    }
  }
  return args;
}

std::string require_path(const CliArgs& args, const std::string& key) {
  const auto it = args.paths.find(key);
  if (it == args.paths.end()) throw ConfigError("missing required option --" + key);
  return it->second;
}

std::string path_or(const CliArgs& args, const std::string& key, const std::string& fallback) {
  const auto it = args.paths.find(key);
  return it == args.paths.end() ? fallback : it->second;
}

// FILE -> FILE for one seed, stem_seed<N>.ext for several.
std::filesystem::path seed_path(const std::string& base, std::uint64_t seed, bool multi) {
  if (!multi) return base;
  std::filesystem::path p(base);
  const std::string ext = p.extension().string();
  std::filesystem::path stem = p;
  stem.replace_extension();
  return stem.string() + "_seed" + std::to_string(seed) + ext;
}

int cmd_gen_data(const CliArgs& args) {
  if (args.cfg.dataset != figkd::DatasetKind::kSynthetic) {
    throw ConfigError("gen-data needs dataset = synthetic");
  }
  args.cfg.validate();
  const auto [train, test] = figkd::generate_synthetic(args.cfg.synthetic);
  const std::string train_out = require_path(args, "train-out");
  const std::string test_out = require_path(args, "test-out");
  figkd::save_csv(train, train_out);
  figkd::save_csv(test, test_out);
  std::cout << "wrote " << train.size() << " train samples to " << train_out << "\n"
            << "wrote " << test.size() << " test samples to " << test_out << "\n"
            << "classes " << train.num_classes << ", input_dim " << train.features.cols << "\n";
  return 0;
}

int cmd_train_teacher(const CliArgs& args) {
  args.cfg.validate();
  const std::string out = require_path(args, "out");
  const auto [train, test] = figkd::load_dataset(args.cfg);
  const bool multi = args.cfg.seeds.size() > 1;
  double sum = 0.0;
  for (const std::uint64_t seed : args.cfg.seeds) {
    const figkd::TrainedModel model = figkd::train_teacher(args.cfg, train, test, seed);
    const std::filesystem::path path = seed_path(out, seed, multi);
    figkd::save_checkpoint(model.params, path);
    sum += model.test_accuracy;
    std::cout << "seed " << seed << "  test acc " << model.test_accuracy << "  -> " << path.string()
              << "\n";
  }
  std::cout << "mean test acc " << sum / static_cast<double>(args.cfg.seeds.size()) << "\n";
  return 0;
}

int cmd_distill(const CliArgs& args) {
  args.cfg.validate();
  const bool needs_teacher = args.cfg.variant != figkd::LossVariant::kCe;
  figkd::MlpParams teacher;
  if (needs_teacher) {
    teacher = figkd::load_checkpoint(require_path(args, "teacher"));
  } else if (args.paths.count("teacher") != 0U) {
    teacher = figkd::load_checkpoint(args.paths.at("teacher"));
  }
  const auto [train, test] = figkd::load_dataset(args.cfg);
  const bool multi = args.cfg.seeds.size() > 1;
  const auto out = args.paths.find("out");
  double sum = 0.0;
  for (const std::uint64_t seed : args.cfg.seeds) {
    const figkd::TrainedModel model =
        figkd::distill_student(args.cfg, args.cfg.variant, args.cfg.use_low, args.cfg.use_high,
                               teacher, train, test, seed);
    sum += model.test_accuracy;
    std::cout << "seed " << seed << "  variant " << figkd::variant_name(args.cfg.variant)
              << "  test acc " << model.test_accuracy;
    if (out != args.paths.end()) {
      const std::filesystem::path path = seed_path(out->second, seed, multi);
      figkd::save_checkpoint(model.params, path);
      std::cout << "  -> " << path.string();
    }
    std::cout << "\n";
  }
  std::cout << "mean test acc " << sum / static_cast<double>(args.cfg.seeds.size()) << "\n";
  return 0;
}

int cmd_ablate(const CliArgs& args) {
  const figkd::AblationReport report = figkd::run_ablation(args.cfg);
  const std::string out = path_or(args, "out", "ablation_report.json");
  const std::string table = figkd::emit_report(figkd::ablation_report_to_json(report), out);
  std::cout << table << "\nreport written to " << out << "\n";
  return 0;
}

int cmd_sweep(const CliArgs& args) {
  const figkd::SweepReport report = figkd::run_weight_sweep(args.cfg);
  const std::string out = path_or(args, "out", "sweep_report.json");
  const std::string table = figkd::emit_report(figkd::sweep_report_to_json(report), out);
  std::cout << table << "\nreport written to " << out << "\n";
  return 0;
}

int cmd_analyze_logits(const CliArgs& args) {
  args.cfg.validate();
  const figkd::MlpParams params = figkd::load_checkpoint(require_path(args, "checkpoint"));
  const auto [train, test] = figkd::load_dataset(args.cfg);
  (void)train;
  const figkd::FrequencyAgreement f =
      figkd::analyze_frequency_logits(params, test, "model", params.seed);

  std::cout << "samples " << test.size() << "  classes " << test.num_classes << "\n"
            << "full accuracy            " << f.full_accuracy << "\n"
            << "hf argmax == full argmax " << f.hf_match_full << "\n"
            << "ll argmax == full argmax " << f.ll_match_full << "\n"
            << "hf argmax == label       " << f.hf_match_label << "\n"
            << "ll argmax == label       " << f.ll_match_label << "\n";

  if (const auto it = args.paths.find("out"); it != args.paths.end()) {
    nlohmann::ordered_json j;
    j["schema_version"] = "1";
    j["report_type"] = "frequency_agreement";
    j["config"] = figkd::config_to_json(args.cfg);
    j["agreement"] = figkd::frequency_agreement_to_json(f);
    std::ofstream out(it->second, std::ios::binary);
    if (!out) throw figkd::IoError("cannot open " + it->second + " for writing");
    out << figkd::canonical_json_dump(j);
    std::cout << "stats written to " << it->second << "\n";
  }

  if (const auto it = args.paths.find("dump-bands"); it != args.paths.end()) {
    const auto fact = figkd::factorize_grid(test.num_classes);
    const std::vector<double> logits = figkd::forward(params, test.features.row(0));
    const figkd::WaveletBands bands = figkd::dwt2_haar(figkd::reshape_logits(logits, fact));
    figkd::dump_bands_csv(bands, it->second);
    std::cout << "bands of first test sample written to " << it->second << "_{ll,lh,hl,hh}.csv\n";
  }
  return 0;
}

int cmd_report(const CliArgs& args) {
  const nlohmann::ordered_json report = figkd::parse_report_file(require_path(args, "in"));
  std::cout << figkd::render_report_table(report);
  if (const auto it = args.paths.find("out"); it != args.paths.end()) {
    std::ofstream out(it->second, std::ios::binary);
    if (!out) throw figkd::IoError("cannot open " + it->second + " for writing");
    out << figkd::canonical_json_dump(report);
    std::cout << "canonical JSON written to " << it->second << "\n";
  }
  return 0;
}

int dispatch(int argc, char** argv) {
  if (argc < 2 || std::strcmp(argv[1], "--help") == 0 || std::strcmp(argv[1], "-h") == 0 ||
      std::strcmp(argv[1], "help") == 0) {
    std::cout << kUsage;
    return argc < 2 ? 2 : 0;
  }
  const std::string sub = argv[1];
  const CliArgs args = parse_args(sub, argc, argv, 2);

  if (sub == "gen-data") return cmd_gen_data(args);
  if (sub == "train-teacher") return cmd_train_teacher(args);
  if (sub == "distill") return cmd_distill(args);
  if (sub == "ablate") return cmd_ablate(args);
  if (sub == "sweep") return cmd_sweep(args);
  if (sub == "analyze-logits") return cmd_analyze_logits(args);
  if (sub == "report") return cmd_report(args);
  throw ConfigError("unknown subcommand '" + sub + "'");
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const figkd::TrainingDivergedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const figkd::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const figkd::InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const figkd::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
