#pragma once
// CSV formats. Numbers are fixed-point with 4 decimals so outputs are
// byte-stable; fit coefficients use 6.
//
//   measurements: shape_id,pressure_kpa,trial,force_n   ('#' lines are provenance)
//   report:       shape_id,pressure_kpa,ideal_force_n,predicted_force_n,mean_measured_force_n,loss_fraction
//   trace:        t_s,actuator_id,commanded_kpa,actual_kpa,force_n,moment_nm

#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "softact/characterization.hpp"
#include "softact/error.hpp"
#include "softact/wearable.hpp"

namespace softact::csv {

inline constexpr std::string_view kMeasurementHeader = "shape_id,pressure_kpa,trial,force_n";
inline constexpr std::string_view kReportHeader =
    "shape_id,pressure_kpa,ideal_force_n,predicted_force_n,mean_measured_force_n,loss_fraction";
inline constexpr std::string_view kTraceHeader = "t_s,actuator_id,commanded_kpa,actual_kpa,force_n,moment_nm";
inline constexpr std::string_view kFitHeader =
    "series,window_min_kpa,window_max_kpa,points,slope_per_kpa,intercept,r_squared,delta_slope,delta_intercept";
inline constexpr std::string_view kResidualHeader = "series,pressure_kpa,residual";

// Rounds to `decimals` places and never prints a negative zero.
inline std::string fixed(double v, int decimals = 4) {
  std::string s = fmt::format("{:.{}f}", v, decimals);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no, const char* column) {
  T value{};
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || field.empty())
    throw ConfigError(fmt::format("line {}: cannot parse {} from '{}'", line_no, column, field));
  return value;
}

inline std::string write_measurements(const SweepDataset& ds) {
  std::string out;
  for (const auto& line : ds.provenance()) out += "# " + line + "\n";
  out += kMeasurementHeader;
  out += '\n';
  for (const auto& r : ds.records())
    out += fmt::format("{},{},{},{}\n", r.shape_id, fixed(r.pressure_kpa), r.trial, fixed(r.force_n));
  return out;
}

inline SweepDataset read_measurements(std::string_view text) {
  std::vector<MeasurementRecord> records;
  std::vector<std::string> provenance;
  bool header_seen = false;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string_view line = raw;
    if (line.empty()) continue;
    if (line.front() == '#') {
      line.remove_prefix(1);
      if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
      provenance.emplace_back(line);
      continue;
    }
    if (!header_seen) {
      if (line != kMeasurementHeader)
        throw ConfigError(fmt::format("line {}: expected header '{}'", line_no, kMeasurementHeader));
      header_seen = true;
      continue;
    }
    const auto f = split(line);
    if (f.size() != 4) throw ConfigError(fmt::format("line {}: expected 4 fields, got {}", line_no, f.size()));
    MeasurementRecord r{std::string(f[0]), parse_number<double>(f[1], line_no, "pressure_kpa"),
                        parse_number<int>(f[2], line_no, "trial"), parse_number<double>(f[3], line_no, "force_n")};
    try {
      check_record(r);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", line_no, e.what()));
    }
    records.push_back(std::move(r));
  }
  if (!header_seen) throw ConfigError("measurement CSV has no header");
  return SweepDataset{std::move(records), std::move(provenance)};
}

inline std::string write_report(const std::vector<ComparisonRow>& rows) {
  std::string out{kReportHeader};
  out += '\n';
  for (const auto& r : rows)
    out += fmt::format("{},{},{},{},{},{}\n", r.shape_id, fixed(r.pressure_kpa), fixed(r.ideal_force_n),
                       fixed(r.predicted_force_n), fixed(r.mean_measured_force_n), fixed(r.loss_fraction));
  return out;
}

inline std::string write_fits(const std::vector<std::pair<std::string, FitReport>>& fits) {
  std::string out{kFitHeader};
  out += '\n';
  for (const auto& [name, f] : fits) {
    std::string ds, di;
    if (f.reference_deltas) {
      ds = fixed(f.reference_deltas->first, 6);
      di = fixed(f.reference_deltas->second, 6);
    }
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", name, fixed(f.window.min_kpa), fixed(f.window.max_kpa),
                       f.residuals.size(), fixed(f.slope_per_kpa, 6), fixed(f.intercept, 6),
                       fixed(f.r_squared, 6), ds, di);
  }
  return out;
}

inline std::string write_residuals(const std::vector<std::pair<std::string, FitReport>>& fits) {
  std::string out{kResidualHeader};
  out += '\n';
  for (const auto& [name, f] : fits)
    for (const auto& r : f.residuals) out += fmt::format("{},{},{}\n", name, fixed(r.pressure_kpa), fixed(r.loss, 6));
  return out;
}

inline std::string write_trace(const SimulationTrace& trace) {
  std::string out{kTraceHeader};
  out += '\n';
  for (const auto& s : trace.samples)
    for (std::size_t i = 0; i < s.actuators.size(); ++i) {
      const auto& a = s.actuators[i];
      out += fmt::format("{},{},{},{},{},{}\n", fixed(s.t_s), trace.actuator_ids[i], fixed(a.commanded_kpa),
                         fixed(a.actual_kpa), fixed(a.force_n), fixed(s.moment_nm));
    }
  return out;
}

} // namespace softact::csv
