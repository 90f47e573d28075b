#include "figkd/harness.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "figkd/errors.hpp"
#include "figkd/hash.hpp"
#include "figkd/logit_geometry.hpp"
#include "figkd/losses.hpp"
#include "figkd/rng.hpp"
#include "figkd/wavelet.hpp"

namespace figkd {

namespace {

// Per-run RNG stream ids; student streams are shared by every variant so
// equal objectives produce identical trajectories.
constexpr std::uint64_t kTeacherInitStream = 11;
constexpr std::uint64_t kTeacherShuffleStream = 12;
constexpr std::uint64_t kStudentInitStream = 21;
constexpr std::uint64_t kStudentShuffleStream = 22;

using PerSampleLoss =
    std::function<LossValue(std::span<const double> logits, std::size_t label, std::size_t index)>;

TrainedModel train_with_loss(const Dataset& train, const Dataset& test, std::size_t hidden,
                             const SgdConfig& sgd, std::size_t epochs, std::size_t batch_size,
                             std::uint64_t init_seed, std::uint64_t shuffle_seed,
                             const PerSampleLoss& loss_fn) {
  TrainedModel model;
  model.params = init_params(train.features.cols, hidden, train.num_classes, init_seed);
  MlpGrads grads = MlpGrads::zeros(model.params);
  ForwardCache cache;

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    const auto batches = split_batches(train, batch_size, mix_seed(shuffle_seed, epoch));
    for (const auto& batch : batches) {
      grads.zero();
      for (std::size_t idx : batch) {
        const std::vector<double> logits = forward(model.params, train.features.row(idx), &cache);
        const LossValue loss = loss_fn(logits, train.labels[idx], idx);
        backward_accumulate(model.params, cache, loss.grad, grads);
      }
      grads.scale(1.0 / static_cast<double>(batch.size()));
      try {
        sgd_step(model.params, grads, sgd);
      } catch (const TrainingDivergedError&) {
        throw TrainingDivergedError("training diverged at epoch " + std::to_string(epoch));
      }
    }
  }
  model.test_accuracy = evaluate_accuracy(model.params, test);
  return model;
}

// Teacher logits are fixed during distillation; evaluate them once.
Matrix teacher_logit_table(const MlpParams& teacher, const Dataset& data) {
  Matrix table(data.size(), teacher.num_classes);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::vector<double> logits = forward(teacher, data.features.row(i));
    std::copy(logits.begin(), logits.end(), table.row(i).begin());
  }
  return table;
}

double mean_of(const std::vector<SeedRun>& runs) {
  double s = 0.0;
  for (const auto& r : runs) s += r.test_accuracy;
  return s / static_cast<double>(runs.size());
}

double stddev_of(const std::vector<SeedRun>& runs, double mean) {
  double s = 0.0;
  for (const auto& r : runs) {
    const double d = r.test_accuracy - mean;
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(runs.size()));
}

nlohmann::ordered_json seed_runs_to_json(const std::vector<SeedRun>& runs) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : runs) {
    nlohmann::ordered_json j;
    j["seed"] = r.seed;
    j["test_accuracy"] = r.test_accuracy;
    j["teacher_checkpoint_fnv1a"] = r.teacher_hash;
    arr.push_back(std::move(j));
  }
  return arr;
}

struct VariantSpecEntry {
  const char* name;
  LossVariant variant;
  bool low;
  bool high;
};

// Table order: the four low/high rows, then the classic-KD baseline.
constexpr VariantSpecEntry kAblationVariants[] = {
    {"ce", LossVariant::kCe, false, false},
    {"low_only", LossVariant::kBand, true, false},
    {"high_only", LossVariant::kBand, false, true},
    {"both", LossVariant::kBand, true, true},
    {"kd", LossVariant::kKd, false, false},
};

}  // namespace

std::size_t argmax_index(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

double evaluate_accuracy(const MlpParams& params, const Dataset& data) {
  if (params.num_classes != data.num_classes) {
    throw InvalidInputError("model and dataset class counts differ");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::vector<double> logits = forward(params, data.features.row(i));
    if (argmax_index(logits) == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

std::pair<Dataset, Dataset> load_dataset(const TrainConfig& cfg) {
  if (cfg.dataset == DatasetKind::kSynthetic) {
    return generate_synthetic(cfg.synthetic);
  }
  Dataset train = load_csv(cfg.train_csv, cfg.csv_num_classes);
  Dataset test = load_csv(cfg.test_csv, cfg.csv_num_classes);
  train.split = "train";
  test.split = "test";
  if (train.features.cols != test.features.cols) {
    throw InvalidInputError("train and test CSV dimensions differ");
  }
  return {std::move(train), std::move(test)};
}

TrainedModel train_teacher(const TrainConfig& cfg, const Dataset& train, const Dataset& test,
                           std::uint64_t seed) {
  return train_with_loss(
      train, test, cfg.teacher_hidden, cfg.sgd, cfg.epochs, cfg.batch_size,
      mix_seed(seed, kTeacherInitStream), mix_seed(seed, kTeacherShuffleStream),
      [](std::span<const double> logits, std::size_t label, std::size_t) {
        return ce_loss(logits, label);
      });
}

TrainedModel distill_student(const TrainConfig& cfg, LossVariant variant, bool use_low,
                             bool use_high, const MlpParams& teacher, const Dataset& train,
                             const Dataset& test, std::uint64_t seed) {
  const bool needs_teacher = variant != LossVariant::kCe;
  if (needs_teacher) {
    if (teacher.num_classes != train.num_classes) {
      throw InvalidInputError("teacher checkpoint class count does not match dataset");
    }
    if (teacher.input_dim != train.features.cols) {
      throw InvalidInputError("teacher checkpoint input dimension does not match dataset");
    }
  }

  const GridFactorization fact = factorize_grid(train.num_classes);
  const LossWeights weights = cfg.weights;
  Matrix teacher_logits;
  if (needs_teacher) teacher_logits = teacher_logit_table(teacher, train);

  PerSampleLoss loss_fn;
  switch (variant) {
    case LossVariant::kCe:
      loss_fn = [](std::span<const double> logits, std::size_t label, std::size_t) {
        return ce_loss(logits, label);
      };
      break;
    case LossVariant::kKd:
      loss_fn = [&teacher_logits, weights](std::span<const double> logits, std::size_t label,
                                           std::size_t index) {
        return kd_loss(teacher_logits.row(index), logits, weights, label);
      };
      break;
    case LossVariant::kFigkd:
      use_low = false;
      use_high = true;
      [[fallthrough]];
    case LossVariant::kBand:
      loss_fn = [&teacher_logits, weights, fact, use_low, use_high](
                    std::span<const double> logits, std::size_t label, std::size_t index) {
        return band_objective_loss(teacher_logits.row(index), logits, label, weights, fact,
                                   use_low, use_high);
      };
      break;
  }

  return train_with_loss(train, test, cfg.student_hidden, cfg.sgd, cfg.epochs, cfg.batch_size,
                         mix_seed(seed, kStudentInitStream), mix_seed(seed, kStudentShuffleStream),
                         loss_fn);
}

FrequencyAgreement analyze_frequency_logits(const MlpParams& params, const Dataset& data,
                                            const std::string& model_tag, std::uint64_t seed) {
  if (params.num_classes != data.num_classes) {
    throw InvalidInputError("model and dataset class counts differ");
  }
  const GridFactorization fact = factorize_grid(data.num_classes);

  FrequencyAgreement f;
  f.model = model_tag;
  f.seed = seed;
  const std::size_t classes = data.num_classes;
  std::vector<std::size_t> class_total(classes, 0);
  std::vector<std::size_t> class_hf(classes, 0);
  std::vector<std::size_t> class_ll(classes, 0);
  std::size_t full_ok = 0, hf_full = 0, ll_full = 0, hf_label = 0, ll_label = 0;

  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::vector<double> logits = forward(params, data.features.row(i));
    const WaveletBands bands = dwt2_haar(reshape_logits(logits, fact));
    const std::vector<double> hf = flatten_grid(reconstruct_from_bands(bands, false, true));
    const std::vector<double> ll = flatten_grid(reconstruct_from_bands(bands, true, false));
    const std::size_t full_arg = argmax_index(logits);
    const std::size_t hf_arg = argmax_index(hf);
    const std::size_t ll_arg = argmax_index(ll);
    const std::size_t label = data.labels[i];

    ++class_total[label];
    if (full_arg == label) ++full_ok;
    if (hf_arg == full_arg) ++hf_full;
    if (ll_arg == full_arg) ++ll_full;
    if (hf_arg == label) {
      ++hf_label;
      ++class_hf[label];
    }
    if (ll_arg == label) {
      ++ll_label;
      ++class_ll[label];
    }
  }

  const double n = static_cast<double>(data.size());
  f.full_accuracy = static_cast<double>(full_ok) / n;
  f.hf_match_full = static_cast<double>(hf_full) / n;
  f.ll_match_full = static_cast<double>(ll_full) / n;
  f.hf_match_label = static_cast<double>(hf_label) / n;
  f.ll_match_label = static_cast<double>(ll_label) / n;
  f.per_class_hf_label.resize(classes);
  f.per_class_ll_label.resize(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    const double total = static_cast<double>(class_total[c]);
    f.per_class_hf_label[c] = total > 0.0 ? static_cast<double>(class_hf[c]) / total : 0.0;
    f.per_class_ll_label[c] = total > 0.0 ? static_cast<double>(class_ll[c]) / total : 0.0;
  }
  return f;
}

AblationReport run_ablation(const TrainConfig& cfg) {
  cfg.validate();
  const auto [train, test] = load_dataset(cfg);

  AblationReport report;
  report.config = cfg;
  report.num_classes = train.num_classes;
  for (const auto& entry : kAblationVariants) {
    VariantResult v;
    v.name = entry.name;
    v.is_band = entry.variant == LossVariant::kBand || entry.variant == LossVariant::kCe;
    v.distill_low = entry.low;
    v.distill_high = entry.high;
    report.variants.push_back(std::move(v));
  }

  for (const std::uint64_t seed : cfg.seeds) {
    const TrainedModel teacher = train_teacher(cfg, train, test, seed);
    const std::vector<std::uint8_t> ckpt = serialize_checkpoint(teacher.params);
    const std::string hash = fnv1a64_hex(ckpt);
    report.teacher_runs.push_back({seed, teacher.test_accuracy, hash});
    report.frequency.push_back(analyze_frequency_logits(teacher.params, test, "teacher", seed));

    for (std::size_t vi = 0; vi < std::size(kAblationVariants); ++vi) {
      const auto& entry = kAblationVariants[vi];
      const TrainedModel student = distill_student(cfg, entry.variant, entry.low, entry.high,
                                                   teacher.params, train, test, seed);
      report.variants[vi].runs.push_back({seed, student.test_accuracy, hash});
      if (entry.variant == LossVariant::kCe) {
        report.frequency.push_back(
            analyze_frequency_logits(student.params, test, "student_ce", seed));
      }
    }
  }

  report.teacher_mean_accuracy = mean_of(report.teacher_runs);
  for (auto& v : report.variants) {
    v.mean_accuracy = mean_of(v.runs);
    v.stddev_accuracy = stddev_of(v.runs, v.mean_accuracy);
  }
  return report;
}

SweepReport run_weight_sweep(const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.alpha_values.empty() || cfg.beta_values.empty()) {
    throw ConfigError("sweep value lists must be nonempty");
  }

  SweepReport report;
  report.config = cfg;
  SweepLine beta_line{"beta_sweep", "beta", cfg.sweep_fixed_alpha, cfg.beta_values, {}};
  for (double b : cfg.beta_values) beta_line.points.push_back({cfg.sweep_fixed_alpha, b, {}, 0, 0});
  SweepLine alpha_line{"alpha_sweep", "alpha", cfg.sweep_fixed_beta, cfg.alpha_values, {}};
  for (double a : cfg.alpha_values) alpha_line.points.push_back({a, cfg.sweep_fixed_beta, {}, 0, 0});
  report.sweeps = {std::move(beta_line), std::move(alpha_line)};

  // Reject untrained objectives before any training happens.
  for (const auto& sweep : report.sweeps) {
    for (const auto& p : sweep.points) {
      if (p.alpha == 0.0 && p.beta == 0.0) {
        throw ConfigError("sweep point alpha=0, beta=0 has nothing to train");
      }
      if (p.alpha < 0.0 || p.beta < 0.0) {
        throw ConfigError("sweep weights must be nonnegative");
      }
    }
  }

  const auto [train, test] = load_dataset(cfg);
  for (const std::uint64_t seed : cfg.seeds) {
    const TrainedModel teacher = train_teacher(cfg, train, test, seed);
    const std::string hash = fnv1a64_hex(serialize_checkpoint(teacher.params));
    report.teacher_runs.push_back({seed, teacher.test_accuracy, hash});

    for (auto& sweep : report.sweeps) {
      for (auto& point : sweep.points) {
        TrainConfig point_cfg = cfg;
        point_cfg.weights.alpha = point.alpha;
        point_cfg.weights.beta = point.beta;
        const TrainedModel student = distill_student(point_cfg, LossVariant::kFigkd, false, true,
                                                     teacher.params, train, test, seed);
        point.runs.push_back({seed, student.test_accuracy, hash});
      }
    }
  }

  report.teacher_mean_accuracy = mean_of(report.teacher_runs);
  const SweepPoint* best = nullptr;
  for (auto& sweep : report.sweeps) {
    for (auto& point : sweep.points) {
      point.mean_accuracy = mean_of(point.runs);
      point.stddev_accuracy = stddev_of(point.runs, point.mean_accuracy);
      if (best == nullptr || point.mean_accuracy > best->mean_accuracy) best = &point;
    }
  }
  report.best = *best;
  return report;
}

nlohmann::ordered_json frequency_agreement_to_json(const FrequencyAgreement& f) {
  nlohmann::ordered_json j;
  j["model"] = f.model;
  j["seed"] = f.seed;
  j["full_accuracy"] = f.full_accuracy;
  j["hf_argmax_matches_full"] = f.hf_match_full;
  j["ll_argmax_matches_full"] = f.ll_match_full;
  j["hf_argmax_matches_label"] = f.hf_match_label;
  j["ll_argmax_matches_label"] = f.ll_match_label;
  j["per_class_hf_label"] = f.per_class_hf_label;
  j["per_class_ll_label"] = f.per_class_ll_label;
  return j;
}

nlohmann::ordered_json ablation_report_to_json(const AblationReport& report) {
  nlohmann::ordered_json j;
  j["schema_version"] = "1";
  j["report_type"] = "ablation";
  j["config"] = config_to_json(report.config);
  j["num_classes"] = report.num_classes;

  nlohmann::ordered_json teacher;
  teacher["hidden_dim"] = report.config.teacher_hidden;
  teacher["per_seed"] = seed_runs_to_json(report.teacher_runs);
  teacher["mean_accuracy"] = report.teacher_mean_accuracy;
  j["teacher"] = std::move(teacher);

  nlohmann::ordered_json variants = nlohmann::ordered_json::array();
  for (const auto& v : report.variants) {
    nlohmann::ordered_json vj;
    vj["name"] = v.name;
    if (v.is_band) {
      vj["distill_low"] = v.distill_low;
      vj["distill_high"] = v.distill_high;
    }
    vj["per_seed"] = seed_runs_to_json(v.runs);
    vj["mean_accuracy"] = v.mean_accuracy;
    vj["stddev_accuracy"] = v.stddev_accuracy;
    variants.push_back(std::move(vj));
  }
  j["variants"] = std::move(variants);

  nlohmann::ordered_json freq = nlohmann::ordered_json::array();
  for (const auto& f : report.frequency) freq.push_back(frequency_agreement_to_json(f));
  j["frequency_agreement"] = std::move(freq);
  return j;
}

nlohmann::ordered_json sweep_report_to_json(const SweepReport& report) {
  nlohmann::ordered_json j;
  j["schema_version"] = "1";
  j["report_type"] = "sweep";
  j["config"] = config_to_json(report.config);

  nlohmann::ordered_json teacher;
  teacher["hidden_dim"] = report.config.teacher_hidden;
  teacher["per_seed"] = seed_runs_to_json(report.teacher_runs);
  teacher["mean_accuracy"] = report.teacher_mean_accuracy;
  j["teacher"] = std::move(teacher);

  nlohmann::ordered_json sweeps = nlohmann::ordered_json::array();
  for (const auto& sweep : report.sweeps) {
    nlohmann::ordered_json sj;
    sj["name"] = sweep.name;
    sj["varied"] = sweep.varied;
    sj["fixed_" + (sweep.varied == "beta" ? std::string("alpha") : std::string("beta"))] =
        sweep.fixed_value;
    sj["values"] = sweep.values;
    nlohmann::ordered_json points = nlohmann::ordered_json::array();
    for (const auto& p : sweep.points) {
      nlohmann::ordered_json pj;
      pj["alpha"] = p.alpha;
      pj["beta"] = p.beta;
      pj["per_seed"] = seed_runs_to_json(p.runs);
      pj["mean_accuracy"] = p.mean_accuracy;
      pj["stddev_accuracy"] = p.stddev_accuracy;
      points.push_back(std::move(pj));
    }
    sj["points"] = std::move(points);
    sweeps.push_back(std::move(sj));
  }
  j["sweeps"] = std::move(sweeps);

  nlohmann::ordered_json best;
  best["alpha"] = report.best.alpha;
  best["beta"] = report.best.beta;
  best["mean_accuracy"] = report.best.mean_accuracy;
  j["best"] = std::move(best);
  return j;
}

}  // namespace figkd
