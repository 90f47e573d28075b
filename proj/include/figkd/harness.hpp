#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "figkd/config.hpp"
#include "figkd/data.hpp"
#include "figkd/nn.hpp"

#include <json.hpp>

namespace figkd {

struct TrainedModel {
  MlpParams params;
  double test_accuracy = 0.0;
};

// Argmax / HF-only / LL-only agreement statistics for one model on one test
// set (the frequency-logit diagnosis). Ties resolve to the lowest index.
struct FrequencyAgreement {
  std::string model;
  std::uint64_t seed = 0;
  double full_accuracy = 0.0;
  double hf_match_full = 0.0;   // argmax(HF-only) == argmax(full)
  double ll_match_full = 0.0;
  double hf_match_label = 0.0;  // argmax(HF-only) == ground truth
  double ll_match_label = 0.0;
  std::vector<double> per_class_hf_label;
  std::vector<double> per_class_ll_label;
};

struct SeedRun {
  std::uint64_t seed = 0;
  double test_accuracy = 0.0;
  std::string teacher_hash;  // fingerprint of the teacher this run used
};

struct VariantResult {
  std::string name;
  bool is_band = false;  // the four low/high matrix rows (kd has no flags)
  bool distill_low = false;
  bool distill_high = false;
  std::vector<SeedRun> runs;
  double mean_accuracy = 0.0;
  double stddev_accuracy = 0.0;
};

struct AblationReport {
  TrainConfig config;
  std::size_t num_classes = 0;
  std::vector<SeedRun> teacher_runs;
  double teacher_mean_accuracy = 0.0;
  std::vector<VariantResult> variants;  // ce, low_only, high_only, both, kd
  std::vector<FrequencyAgreement> frequency;
};

struct SweepPoint {
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<SeedRun> runs;
  double mean_accuracy = 0.0;
  double stddev_accuracy = 0.0;
};

struct SweepLine {
  std::string name;     // "beta_sweep" | "alpha_sweep"
  std::string varied;   // "beta" | "alpha"
  double fixed_value = 0.0;
  std::vector<double> values;
  std::vector<SweepPoint> points;
};

struct SweepReport {
  TrainConfig config;
  std::vector<SeedRun> teacher_runs;
  double teacher_mean_accuracy = 0.0;
  std::vector<SweepLine> sweeps;
  SweepPoint best;
};

std::size_t argmax_index(std::span<const double> v);
double evaluate_accuracy(const MlpParams& params, const Dataset& data);

// Generates or loads the configured dataset (train, test).
std::pair<Dataset, Dataset> load_dataset(const TrainConfig& cfg);

// One cross-entropy teacher run. Init and shuffle streams derive from the
// seed, so reruns are bit-identical.
TrainedModel train_teacher(const TrainConfig& cfg, const Dataset& train, const Dataset& test,
                           std::uint64_t seed);

// One student run with the given objective, distilling from a fixed teacher
// (inference only). The student streams depend only on the seed, never on
// the variant, so equal objectives give identical trajectories.
TrainedModel distill_student(const TrainConfig& cfg, LossVariant variant, bool use_low,
                             bool use_high, const MlpParams& teacher, const Dataset& train,
                             const Dataset& test, std::uint64_t seed);

FrequencyAgreement analyze_frequency_logits(const MlpParams& params, const Dataset& data,
                                            const std::string& model_tag, std::uint64_t seed);

// Trains the four low/high ablation variants plus the kd baseline for every
// seed against one shared teacher per seed, and collects the frequency
// diagnosis for the teacher and the undistilled student.
AblationReport run_ablation(const TrainConfig& cfg);

// Two 1-D weight sweeps: beta varied at fixed alpha, alpha varied at fixed
// beta; the best point is the first maximum of the mean accuracy.
SweepReport run_weight_sweep(const TrainConfig& cfg);

nlohmann::ordered_json ablation_report_to_json(const AblationReport& report);
nlohmann::ordered_json sweep_report_to_json(const SweepReport& report);
nlohmann::ordered_json frequency_agreement_to_json(const FrequencyAgreement& f);

}  // namespace figkd
