#include "bsv/metrics.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <tuple>

#include "bsv/error.hpp"
#include "json.hpp"

namespace bsv {

using nlohmann::json;

double rve(double v_est, double v_gt) {
  if (!(v_gt > 0.0)) throw InvalidArgument("rve: ground-truth volume must be positive");
  return std::abs(v_est - v_gt) / v_gt * 100.0;
}

double accuracy(double rve_percent) {
  if (!(rve_percent >= 0.0)) throw InvalidArgument("accuracy: rve must be non-negative");
  return 100.0 - rve_percent;
}

double rme(double v_est, double real_mass, double density) {
  if (!(real_mass > 0.0)) throw InvalidArgument("rme: mass must be positive");
  if (!(density > 0.0)) throw InvalidArgument("rme: density must be positive");
  return std::abs(v_est * density - real_mass) / real_mass * 100.0;
}

void VolumeReport::compute_errors() {
  const auto fill = [](VolumeEntry& e) {
    e.rve.reset();
    if (e.estimated && e.ground_truth) e.rve = bsv::rve(*e.estimated, *e.ground_truth);
  };
  fill(whole_body);
  for (auto& s : segments) fill(s);
  rme.reset();
  if (real_mass && whole_body.estimated) rme = bsv::rme(*whole_body.estimated, *real_mass);
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

json entry_json(const VolumeEntry& e) {
  json j;
  j["name"] = e.name;
  j["estimated_m3"] = optional_number(e.estimated);
  j["ground_truth_m3"] = optional_number(e.ground_truth);
  j["rve_percent"] = optional_number(e.rve);
  j["error"] = e.error ? json(*e.error) : json(nullptr);
  return j;
}

VolumeEntry entry_from_json(const json& j) {
  VolumeEntry e;
  e.name = j.at("name").get<std::string>();
  e.estimated = read_optional(j, "estimated_m3");
  e.ground_truth = read_optional(j, "ground_truth_m3");
  e.rve = read_optional(j, "rve_percent");
  if (j.contains("error") && !j.at("error").is_null()) e.error = j.at("error").get<std::string>();
  return e;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

std::string csv_number(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream s;
  s << std::setprecision(17) << *v;
  return s.str();
}

// whole body first, then label ordinals
int segment_rank(const std::string& name) {
  if (name == kWholeBody) return -1;
  if (auto l = label_from_name(name)) return ordinal(*l);
  return 1000;
}

}  // namespace

void write_report_json(const std::filesystem::path& path, const VolumeReport& report) {
  json j;
  j["schema"] = kReportSchema;
  j["subject"] = report.subject;
  j["condition"] = condition_name(report.condition);
  j["seed"] = report.seed;
  j["whole_body"] = entry_json(report.whole_body);
  j["segments"] = json::array();
  for (const auto& s : report.segments) j["segments"].push_back(entry_json(s));
  j["real_mass_kg"] = optional_number(report.real_mass);
  j["rme_percent"] = optional_number(report.rme);
  open_out(path) << j.dump(2) << '\n';
}

VolumeReport read_report_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    json j;
    in >> j;
    if (j.at("schema").get<std::string>() != kReportSchema) {
      throw IoError(path.string() + ": unsupported schema " + j.at("schema").get<std::string>());
    }
    VolumeReport r;
    r.subject = j.at("subject").get<std::string>();
    const auto cond = parse_condition(j.at("condition").get<std::string>());
    if (!cond) throw IoError(path.string() + ": unknown condition");
    r.condition = *cond;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.whole_body = entry_from_json(j.at("whole_body"));
    for (const auto& s : j.at("segments")) r.segments.push_back(entry_from_json(s));
    r.real_mass = read_optional(j, "real_mass_kg");
    r.rme = read_optional(j, "rme_percent");
    return r;
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_report_csv(const std::filesystem::path& path, const VolumeReport& report) {
  auto out = open_out(path);
  out << "segment,estimated_m3,ground_truth_m3,rve_percent,error\n";
  const auto row = [&](const VolumeEntry& e) {
    out << e.name << ',' << csv_number(e.estimated) << ',' << csv_number(e.ground_truth) << ','
        << csv_number(e.rve) << ',' << (e.error ? "\"" + *e.error + "\"" : "") << '\n';
  };
  row(report.whole_body);
  for (const auto& s : report.segments) row(s);
}

std::vector<AggregateRow> aggregate(const std::vector<VolumeReport>& reports) {
  if (reports.empty()) throw InvalidArgument("aggregate: no reports");
  std::map<std::tuple<int, std::string, int>, std::vector<double>> groups;
  const auto add = [&](const VolumeEntry& e, ErrorCondition c) {
    if (!e.rve) return;
    groups[{segment_rank(e.name), e.name, static_cast<int>(c)}].push_back(*e.rve);
  };
  for (const auto& r : reports) {
    add(r.whole_body, r.condition);
    for (const auto& s : r.segments) add(s, r.condition);
  }
  std::vector<AggregateRow> rows;
  for (const auto& [key, values] : groups) {
    AggregateRow row;
    row.segment = std::get<1>(key);
    row.condition = static_cast<ErrorCondition>(std::get<2>(key));
    row.count = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    row.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - row.mean) * (v - row.mean);
      row.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    rows.push_back(row);
  }
  return rows;
}

void write_aggregate_csv(const std::filesystem::path& path, const std::vector<AggregateRow>& rows) {
  auto out = open_out(path);
  out << "segment,condition,n,mean_percent,std_percent\n";
  for (const auto& r : rows) {
    out << r.segment << ',' << condition_name(r.condition) << ',' << r.count << ',' << r.mean << ','
        << r.std << '\n';
  }
}

void write_aggregate_json(const std::filesystem::path& path, const std::vector<AggregateRow>& rows) {
  json j;
  j["schema"] = kAggregateSchema;
  j["rows"] = json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"segment", r.segment},
                         {"condition", condition_name(r.condition)},
                         {"n", r.count},
                         {"mean_percent", r.mean},
                         {"std_percent", r.std}});
  }
  open_out(path) << j.dump(2) << '\n';
}

}  // namespace bsv
