#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bsv/labels.hpp"
#include "bsv/scan.hpp"

namespace bsv {

inline constexpr std::string_view kReportSchema = "bsv.volume_report/1";
inline constexpr std::string_view kAggregateSchema = "bsv.aggregate/1";
inline constexpr double kBodyDensity = 1000.0;  // kg/m^3

/// |v_est - v_gt| / v_gt * 100. Throws InvalidArgument unless v_gt > 0.
double rve(double v_est, double v_gt);
/// 100 - rve, negative for errors above 100 %. Throws for a negative rve.
double accuracy(double rve_percent);
/// |v_est * density - mass| / mass * 100. Throws unless mass > 0.
double rme(double v_est, double real_mass, double density = kBodyDensity);

/// One row of a report: a segment or the whole body.
struct VolumeEntry {
  std::string name;                     // label name or "whole_body"
  std::optional<double> estimated;      // m^3, absent when extraction failed
  std::optional<double> ground_truth;   // m^3
  std::optional<double> rve;            // %, only with both volumes
  std::optional<std::string> error;     // failure message

  bool ok() const { return !error.has_value(); }
};

inline constexpr std::string_view kWholeBody = "whole_body";

struct VolumeReport {
  std::string subject;
  ErrorCondition condition = ErrorCondition::NoEr;
  std::uint64_t seed = 0;
  VolumeEntry whole_body;
  std::vector<VolumeEntry> segments;  // kEvaluatedSegments order
  std::optional<double> real_mass;    // kg
  std::optional<double> rme;          // %

  /// Fills rve (and rme when a mass is set) from the volumes.
  void compute_errors();
};

void write_report_json(const std::filesystem::path& path, const VolumeReport& report);
VolumeReport read_report_json(const std::filesystem::path& path);
/// segment,estimated_m3,ground_truth_m3,rve_percent,error
void write_report_csv(const std::filesystem::path& path, const VolumeReport& report);

struct AggregateRow {
  std::string segment;
  ErrorCondition condition = ErrorCondition::NoEr;
  std::size_t count = 0;
  double mean = 0.0;  // %
  double std = 0.0;   // %, sample (n-1); 0 for a single value
};

/// Mean and sample standard deviation of the RVE per (segment, condition).
/// Entries without an RVE are skipped. Rows are ordered whole body first,
/// then by segment ordinal, then by condition. Throws for an empty input.
std::vector<AggregateRow> aggregate(const std::vector<VolumeReport>& reports);

/// segment,condition,n,mean_percent,std_percent
void write_aggregate_csv(const std::filesystem::path& path, const std::vector<AggregateRow>& rows);
void write_aggregate_json(const std::filesystem::path& path, const std::vector<AggregateRow>& rows);

}  // namespace bsv
