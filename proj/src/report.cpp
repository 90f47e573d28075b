#include "figkd/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "figkd/errors.hpp"
#include "figkd/numfmt.hpp"

namespace figkd {

namespace {

using ordered_json = nlohmann::ordered_json;

void dump_string(const std::string& s, std::string& out) {
  out += '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
}

bool is_scalar(const ordered_json& j) { return !j.is_object() && !j.is_array(); }

void dump_value(const ordered_json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  const std::string pad2(static_cast<std::size_t>(indent) + 2, ' ');
  switch (j.type()) {
    case ordered_json::value_t::null:
      out += "null";
      break;
    case ordered_json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case ordered_json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      break;
    case ordered_json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      break;
    case ordered_json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) throw InvalidInputError("reports cannot hold non-finite numbers");
      out += format_g9(v);
      break;
    }
    case ordered_json::value_t::string:
      dump_string(j.get<std::string>(), out);
      break;
    case ordered_json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        break;
      }
      bool scalars = true;
      for (const auto& item : j) scalars = scalars && is_scalar(item);
      if (scalars) {
        out += '[';
        bool first = true;
        for (const auto& item : j) {
          if (!first) out += ", ";
          first = false;
          dump_value(item, out, indent);
        }
        out += ']';
      } else {
        out += "[\n";
        bool first = true;
        for (const auto& item : j) {
          if (!first) out += ",\n";
          first = false;
          out += pad2;
          dump_value(item, out, indent + 2);
        }
        out += '\n';
        out += pad;
        out += ']';
      }
      break;
    }
    case ordered_json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad2;
        dump_string(it.key(), out);
        out += ": ";
        dump_value(it.value(), out, indent + 2);
      }
      out += '\n';
      out += pad;
      out += '}';
      break;
    }
    default:
      throw InvalidInputError("unsupported JSON value in report");
  }
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string pad_to(std::string s, std::size_t width) {
  while (s.size() < width) s += ' ';
  return s;
}

std::string render_ablation_table(const ordered_json& r) {
  std::ostringstream out;
  const auto& teacher = r.at("teacher");
  out << "teacher   hidden " << teacher.at("hidden_dim").get<std::uint64_t>() << "   mean acc "
      << fixed4(teacher.at("mean_accuracy").get<double>()) << "   seeds "
      << r.at("config").at("seeds").size() << "\n\n";
  out << pad_to("variant", 12) << pad_to("low", 6) << pad_to("high", 7) << "accuracy\n";
  out << pad_to("-------", 12) << pad_to("---", 6) << pad_to("----", 7) << "--------\n";
  for (const auto& v : r.at("variants")) {
    const std::string name = v.at("name").get<std::string>();
    std::string low = "-";
    std::string high = "-";
    if (v.contains("distill_low")) {
      low = v.at("distill_low").get<bool>() ? "yes" : "no";
      high = v.at("distill_high").get<bool>() ? "yes" : "no";
    }
    out << pad_to(name, 12) << pad_to(low, 6) << pad_to(high, 7)
        << fixed4(v.at("mean_accuracy").get<double>()) << " ± "
        << fixed4(v.at("stddev_accuracy").get<double>()) << "\n";
  }
  return out.str();
}

std::string render_sweep_table(const ordered_json& r) {
  std::ostringstream out;
  out << "teacher   mean acc " << fixed4(r.at("teacher").at("mean_accuracy").get<double>())
      << "\n\n";
  out << pad_to("sweep", 13) << pad_to("alpha", 8) << pad_to("beta", 8) << "accuracy\n";
  out << pad_to("-----", 13) << pad_to("-----", 8) << pad_to("----", 8) << "--------\n";
  for (const auto& sweep : r.at("sweeps")) {
    const std::string name = sweep.at("name").get<std::string>();
    for (const auto& p : sweep.at("points")) {
      out << pad_to(name, 13) << pad_to(format_g9(p.at("alpha").get<double>()), 8)
          << pad_to(format_g9(p.at("beta").get<double>()), 8)
          << fixed4(p.at("mean_accuracy").get<double>()) << " ± "
          << fixed4(p.at("stddev_accuracy").get<double>()) << "\n";
    }
  }
  const auto& best = r.at("best");
  out << "\nbest point: alpha " << format_g9(best.at("alpha").get<double>()) << ", beta "
      << format_g9(best.at("beta").get<double>()) << ", mean acc "
      << fixed4(best.at("mean_accuracy").get<double>()) << "\n";
  return out.str();
}

}  // namespace

std::string canonical_json_dump(const nlohmann::ordered_json& j) {
  std::string out;
  dump_value(j, out, 0);
  out += '\n';
  return out;
}

std::string emit_report(const nlohmann::ordered_json& report, const std::filesystem::path& path) {
  const std::string text = canonical_json_dump(report);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + path.string());
  return render_report_table(report);
}

std::string render_report_table(const nlohmann::ordered_json& report) {
  try {
    const std::string type = report.at("report_type").get<std::string>();
    if (type == "ablation") return render_ablation_table(report);
    if (type == "sweep") return render_sweep_table(report);
    throw ParseError("unknown report_type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
}

nlohmann::ordered_json parse_report_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace figkd
