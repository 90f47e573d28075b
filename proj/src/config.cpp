#include "figkd/config.hpp"

#include <cstdlib>
#include <fstream>

#include "figkd/errors.hpp"

namespace figkd {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view key, std::string_view value) {
  const std::string v(value);
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') {
    throw ConfigError("bad numeric value '" + v + "' for key '" + std::string(key) + "'");
  }
  return x;
}

std::uint64_t parse_u64(std::string_view key, std::string_view value) {
  const std::string v(value);
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0' || v.front() == '-') {
    throw ConfigError("bad integer value '" + v + "' for key '" + std::string(key) + "'");
  }
  return x;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("bad boolean value '" + std::string(value) + "' for key '" +
                    std::string(key) + "'");
}

template <typename T, typename Parse>
std::vector<T> parse_list(std::string_view key, std::string_view value, Parse parse) {
  std::vector<T> out;
  std::size_t start = 0;
  const std::string v(value);
  while (start <= v.size()) {
    const std::size_t comma = v.find(',', start);
    const std::string_view item = trim(std::string_view(v).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start));
    if (item.empty()) throw ConfigError("empty list item for key '" + std::string(key) + "'");
    out.push_back(parse(key, item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string variant_name(LossVariant v) {
  switch (v) {
    case LossVariant::kCe: return "ce";
    case LossVariant::kKd: return "kd";
    case LossVariant::kFigkd: return "figkd";
    case LossVariant::kBand: return "band";
  }
  return "?";
}

void TrainConfig::validate() const {
  try {
    if (seeds.empty()) throw InvalidInputError("seeds must be nonempty");
    if (epochs == 0) throw InvalidInputError("epochs must be >= 1");
    if (batch_size == 0) throw InvalidInputError("batch_size must be >= 1");
    if (teacher_hidden == 0 || student_hidden == 0) {
      throw InvalidInputError("hidden dimensions must be >= 1");
    }
    sgd.validate();
    weights.validate();
    if (variant == LossVariant::kFigkd || variant == LossVariant::kBand) {
      if (weights.alpha == 0.0 && weights.beta == 0.0) {
        throw InvalidInputError("alpha and beta are both zero: nothing to train");
      }
    }
    if (dataset == DatasetKind::kSynthetic) {
      synthetic.validate();
    } else {
      if (train_csv.empty() || test_csv.empty()) {
        throw InvalidInputError("csv dataset requires train_csv and test_csv");
      }
      if (csv_num_classes == 0) throw InvalidInputError("csv dataset requires num_classes");
    }
  } catch (const InvalidInputError& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

void apply_config_entry(TrainConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key.empty()) throw ConfigError("empty key");

  if (key == "variant") {
    if (value == "ce") cfg.variant = LossVariant::kCe;
    else if (value == "kd") cfg.variant = LossVariant::kKd;
    else if (value == "figkd") cfg.variant = LossVariant::kFigkd;
    else if (value == "band") cfg.variant = LossVariant::kBand;
    else throw ConfigError("unknown variant '" + std::string(value) + "' (ce|kd|figkd|band)");
  } else if (key == "use_low") {
    cfg.use_low = parse_bool(key, value);
  } else if (key == "use_high") {
    cfg.use_high = parse_bool(key, value);
  } else if (key == "alpha") {
    cfg.weights.alpha = parse_double(key, value);
  } else if (key == "beta") {
    cfg.weights.beta = parse_double(key, value);
  } else if (key == "lambda") {
    cfg.weights.lambda_kd = parse_double(key, value);
  } else if (key == "temperature") {
    cfg.weights.temperature = parse_double(key, value);
  } else if (key == "lr") {
    cfg.sgd.learning_rate = parse_double(key, value);
  } else if (key == "momentum") {
    cfg.sgd.momentum = parse_double(key, value);
  } else if (key == "weight_decay") {
    cfg.sgd.weight_decay = parse_double(key, value);
  } else if (key == "epochs") {
    cfg.epochs = parse_u64(key, value);
  } else if (key == "batch_size") {
    cfg.batch_size = parse_u64(key, value);
  } else if (key == "teacher_hidden") {
    cfg.teacher_hidden = parse_u64(key, value);
  } else if (key == "student_hidden") {
    cfg.student_hidden = parse_u64(key, value);
  } else if (key == "seeds") {
    cfg.seeds = parse_list<std::uint64_t>(key, value, parse_u64);
  } else if (key == "dataset") {
    if (value == "synthetic") cfg.dataset = DatasetKind::kSynthetic;
    else if (value == "csv") cfg.dataset = DatasetKind::kCsv;
    else throw ConfigError("unknown dataset kind '" + std::string(value) + "' (synthetic|csv)");
  } else if (key == "superclasses") {
    cfg.synthetic.num_superclasses = parse_u64(key, value);
  } else if (key == "classes_per_superclass") {
    cfg.synthetic.classes_per_superclass = parse_u64(key, value);
  } else if (key == "input_dim") {
    cfg.synthetic.input_dim = parse_u64(key, value);
  } else if (key == "super_separation") {
    cfg.synthetic.super_separation = parse_double(key, value);
  } else if (key == "fine_separation") {
    cfg.synthetic.fine_separation = parse_double(key, value);
  } else if (key == "noise_sigma") {
    cfg.synthetic.noise_sigma = parse_double(key, value);
  } else if (key == "train_per_class") {
    cfg.synthetic.train_per_class = parse_u64(key, value);
  } else if (key == "test_per_class") {
    cfg.synthetic.test_per_class = parse_u64(key, value);
  } else if (key == "data_seed") {
    cfg.synthetic.seed = parse_u64(key, value);
  } else if (key == "train_csv") {
    cfg.train_csv = std::string(value);
  } else if (key == "test_csv") {
    cfg.test_csv = std::string(value);
  } else if (key == "num_classes") {
    cfg.csv_num_classes = parse_u64(key, value);
  } else if (key == "alpha_values") {
    cfg.alpha_values = parse_list<double>(key, value, parse_double);
  } else if (key == "beta_values") {
    cfg.beta_values = parse_list<double>(key, value, parse_double);
  } else if (key == "sweep_fixed_alpha") {
    cfg.sweep_fixed_alpha = parse_double(key, value);
  } else if (key == "sweep_fixed_beta") {
    cfg.sweep_fixed_beta = parse_double(key, value);
  } else {
    throw ConfigError("unknown key '" + std::string(key) + "'");
  }
}

void load_config_file(TrainConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": expected `key = value`");
    }
    try {
      apply_config_entry(cfg, body.substr(0, eq), body.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

nlohmann::ordered_json config_to_json(const TrainConfig& cfg) {
  nlohmann::ordered_json j;
  j["variant"] = variant_name(cfg.variant);
  j["use_low"] = cfg.use_low;
  j["use_high"] = cfg.use_high;
  j["alpha"] = cfg.weights.alpha;
  j["beta"] = cfg.weights.beta;
  j["lambda"] = cfg.weights.lambda_kd;
  j["temperature"] = cfg.weights.temperature;
  j["lr"] = cfg.sgd.learning_rate;
  j["momentum"] = cfg.sgd.momentum;
  j["weight_decay"] = cfg.sgd.weight_decay;
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["teacher_hidden"] = cfg.teacher_hidden;
  j["student_hidden"] = cfg.student_hidden;
  j["seeds"] = cfg.seeds;
  if (cfg.dataset == DatasetKind::kSynthetic) {
    j["dataset"] = "synthetic";
    nlohmann::ordered_json s;
    s["superclasses"] = cfg.synthetic.num_superclasses;
    s["classes_per_superclass"] = cfg.synthetic.classes_per_superclass;
    s["input_dim"] = cfg.synthetic.input_dim;
    s["super_separation"] = cfg.synthetic.super_separation;
    s["fine_separation"] = cfg.synthetic.fine_separation;
    s["noise_sigma"] = cfg.synthetic.noise_sigma;
    s["train_per_class"] = cfg.synthetic.train_per_class;
    s["test_per_class"] = cfg.synthetic.test_per_class;
    s["data_seed"] = cfg.synthetic.seed;
    j["synthetic"] = std::move(s);
  } else {
    j["dataset"] = "csv";
    nlohmann::ordered_json s;
    s["train_csv"] = cfg.train_csv;
    s["test_csv"] = cfg.test_csv;
    s["num_classes"] = cfg.csv_num_classes;
    j["csv"] = std::move(s);
  }
  return j;
}

}  // namespace figkd
