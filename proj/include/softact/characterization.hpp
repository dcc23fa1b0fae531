#pragma once
// Pressure-sweep datasets, per-step aggregation, linear loss fitting and
// ideal/predicted/measured force comparison.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "softact/error.hpp"
#include "softact/force_model.hpp"
#include "softact/geometry.hpp"
#include "softact/units.hpp"

namespace softact {

struct MeasurementRecord {
  std::string shape_id;
  double pressure_kpa;
  int trial;
  double force_n;

  friend bool operator==(const MeasurementRecord&, const MeasurementRecord&) = default;
  friend auto operator<=>(const MeasurementRecord&, const MeasurementRecord&) = default;
};

inline void check_record(const MeasurementRecord& r) {
  if (r.shape_id.empty())
    throw ConfigError("record has an empty shape_id");
  if (!std::isfinite(r.pressure_kpa) || r.pressure_kpa <= 0.0)
    throw ConfigError("record pressure must be > 0 kPa (shape " + r.shape_id + ")");
  if (!std::isfinite(r.force_n) || r.force_n < 0.0)
    throw ConfigError("record force must be >= 0 N (shape " + r.shape_id + ")");
  if (r.trial < 1)
    throw ConfigError("record trial must be >= 1 (shape " + r.shape_id + ")");
}

struct SweepProtocol {
  double start_kpa = 5.0;
  double step_kpa = 5.0;
  double stop_kpa = 60.0;
  int trials = 3;
  double safety_cap_kpa = kDefaultSafetyCapKpa;

  void validate() const {
    if (!(step_kpa > 0.0) || !(start_kpa > 0.0) || start_kpa > stop_kpa || stop_kpa > safety_cap_kpa || trials < 1)
      throw ConfigError("sweep protocol needs step > 0, 0 < start <= stop <= cap, trials >= 1");
  }

  // start, start + step, ... up to stop. Computed by multiplication so the
  // grid values are reproducible bit for bit.
  std::vector<double> steps() const {
    validate();
    std::vector<double> out;
    for (std::size_t i = 0;; ++i) {
      const double p = start_kpa + static_cast<double>(i) * step_kpa;
      if (p > stop_kpa + 1e-9 * step_kpa) break;
      out.push_back(p);
    }
    return out;
  }
};

struct Aggregate {
  std::string shape_id;
  double pressure_kpa;
  std::size_t count;
  double mean_force_n;
  double stddev_force_n; // sample standard deviation, 0 for a single trial
};

// Records are kept in canonical (shape, pressure, trial, force) order so that
// aggregates and everything downstream are independent of input order.
class SweepDataset {
public:
  SweepDataset() = default;
  explicit SweepDataset(std::vector<MeasurementRecord> records, std::vector<std::string> provenance = {})
      : records_(std::move(records)), provenance_(std::move(provenance)) {
    for (const auto& r : records_) check_record(r);
    std::sort(records_.begin(), records_.end());
    aggregate();
  }

  const std::vector<MeasurementRecord>& records() const { return records_; }
  const std::vector<Aggregate>& aggregates() const { return aggregates_; }
  const std::vector<std::string>& provenance() const { return provenance_; }

  std::set<std::string> shape_ids() const {
    std::set<std::string> ids;
    for (const auto& r : records_) ids.insert(r.shape_id);
    return ids;
  }

private:
  void aggregate() {
    aggregates_.clear();
    for (std::size_t i = 0; i < records_.size();) {
      std::size_t j = i;
      double sum = 0.0;
      while (j < records_.size() && records_[j].shape_id == records_[i].shape_id &&
             records_[j].pressure_kpa == records_[i].pressure_kpa) {
        sum += records_[j].force_n;
        ++j;
      }
      const auto n = j - i;
      const double mean = sum / static_cast<double>(n);
      double ss = 0.0;
      for (std::size_t k = i; k < j; ++k) ss += (records_[k].force_n - mean) * (records_[k].force_n - mean);
      const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
      aggregates_.push_back({records_[i].shape_id, records_[i].pressure_kpa, n, mean, sd});
      i = j;
    }
  }

  std::vector<MeasurementRecord> records_;
  std::vector<Aggregate> aggregates_;
  std::vector<std::string> provenance_;
};

struct Violation {
  enum class Kind { OverCap, MissingStep, TrialCount, OffProtocolStep };

  Kind kind;
  std::string shape_id; // empty for OverCap, which is reported once per pressure
  double pressure_kpa;
  std::size_t trials_found = 0;

  friend bool operator==(const Violation&, const Violation&) = default;

  std::string describe() const {
    auto p = std::to_string(pressure_kpa);
    switch (kind) {
    case Kind::OverCap: return "OverCap(" + p + " kPa)";
    case Kind::MissingStep: return "MissingStep(" + shape_id + ", " + p + " kPa)";
    case Kind::TrialCount:
      return "TrialCount(" + shape_id + ", " + p + " kPa, found " + std::to_string(trials_found) + ")";
    case Kind::OffProtocolStep: return "OffProtocolStep(" + shape_id + ", " + p + " kPa)";
    }
    return "?";
  }
};

inline std::vector<Violation> validate_sweep(const SweepDataset& ds, const SweepProtocol& protocol) {
  const auto grid = protocol.steps();
  const double tol = 1e-9 * protocol.step_kpa;
  auto on_grid = [&](double p) {
    return std::any_of(grid.begin(), grid.end(), [&](double g) { return std::abs(g - p) <= tol; });
  };

  std::vector<Violation> out;
  std::set<double> over_cap;
  for (const auto& a : ds.aggregates())
    if (a.pressure_kpa > protocol.safety_cap_kpa) over_cap.insert(a.pressure_kpa);
  for (double p : over_cap) out.push_back({Violation::Kind::OverCap, "", p});

  for (const auto& shape : ds.shape_ids()) {
    std::vector<Violation> shape_out;
    for (double g : grid) {
      auto it = std::find_if(ds.aggregates().begin(), ds.aggregates().end(), [&](const Aggregate& a) {
        return a.shape_id == shape && std::abs(a.pressure_kpa - g) <= tol;
      });
      if (it == ds.aggregates().end())
        shape_out.push_back({Violation::Kind::MissingStep, shape, g});
      else if (it->count != static_cast<std::size_t>(protocol.trials))
        shape_out.push_back({Violation::Kind::TrialCount, shape, g, it->count});
    }
    for (const auto& a : ds.aggregates())
      if (a.shape_id == shape && a.pressure_kpa <= protocol.safety_cap_kpa && !on_grid(a.pressure_kpa))
        shape_out.push_back({Violation::Kind::OffProtocolStep, shape, a.pressure_kpa});
    std::stable_sort(shape_out.begin(), shape_out.end(),
                     [](const Violation& a, const Violation& b) { return a.pressure_kpa < b.pressure_kpa; });
    out.insert(out.end(), shape_out.begin(), shape_out.end());
  }
  return out;
}

struct LossPoint {
  double pressure_kpa;
  double loss;
  friend bool operator==(const LossPoint&, const LossPoint&) = default;
};

using LossSeries = std::vector<LossPoint>;

// Per-shape (pressure, loss) computed from the mean force at each step.
inline std::map<std::string, LossSeries> compute_loss_series(const SweepDataset& ds,
                                                             const std::map<std::string, CrossSection>& shapes) {
  std::map<std::string, LossSeries> out;
  for (const auto& a : ds.aggregates()) {
    auto it = shapes.find(a.shape_id);
    if (it == shapes.end())
      throw UnknownShape("no cross-section configured for shape '" + a.shape_id + "'");
    out[a.shape_id].push_back(
        {a.pressure_kpa, loss_from_measurement(Pressure{a.pressure_kpa}, it->second, Force{a.mean_force_n})});
  }
  return out;
}

// Mean loss across shapes at each pressure present in any series.
inline LossSeries average_loss_series(const std::map<std::string, LossSeries>& per_shape) {
  std::map<double, std::pair<double, std::size_t>> acc;
  for (const auto& [id, series] : per_shape)
    for (const auto& pt : series) {
      auto& slot = acc[pt.pressure_kpa];
      slot.first += pt.loss;
      ++slot.second;
    }
  LossSeries out;
  for (const auto& [p, s] : acc) out.push_back({p, s.first / static_cast<double>(s.second)});
  return out;
}

struct FitReport {
  PressureRange window;
  double slope_per_kpa;
  double intercept;
  double r_squared;
  std::vector<LossPoint> residuals; // (pressure, observed - fitted)
  std::optional<std::pair<double, double>> reference_deltas; // (fit - ref slope, fit - ref intercept)

  LossModel to_loss_model() const { return LossModel{LinearLoss{slope_per_kpa, intercept}, window}; }
};

inline constexpr PressureRange kDefaultFitWindow{30.0, 60.0};

// Ordinary least squares of loss on pressure, with intercept, over the points
// whose pressure lies inside `window` (inclusive).
inline FitReport fit_linear_loss(std::span<const LossPoint> series, PressureRange window = kDefaultFitWindow,
                                 const std::optional<LossModel>& reference = std::nullopt) {
  std::vector<LossPoint> pts;
  for (const auto& p : series)
    if (window.contains(p.pressure_kpa)) pts.push_back(p);
  if (pts.size() < 3)
    throw InsufficientData("fit needs >= 3 points inside the window, got " + std::to_string(pts.size()));

  const double n = static_cast<double>(pts.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : pts) {
    mx += p.pressure_kpa;
    my += p.loss;
  }
  mx /= n;
  my /= n;

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : pts) {
    const double dx = p.pressure_kpa - mx;
    const double dy = p.loss - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0)
    throw DegenerateData("all pressures in the fit window are identical");

  FitReport report{window, sxy / sxx, 0.0, 1.0, {}, std::nullopt};
  report.intercept = my - report.slope_per_kpa * mx;

  double ss_res = 0.0;
  for (const auto& p : pts) {
    const double r = p.loss - (report.slope_per_kpa * p.pressure_kpa + report.intercept);
    report.residuals.push_back({p.pressure_kpa, r});
    ss_res += r * r;
  }
  // A flat series is fit perfectly by the horizontal line.
  report.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;

  if (reference)
    if (const auto* lin = std::get_if<LinearLoss>(&reference->form()))
      report.reference_deltas = std::make_pair(report.slope_per_kpa - lin->slope_per_kpa,
                                               report.intercept - lin->intercept);
  return report;
}

struct ComparisonRow {
  std::string shape_id;
  double pressure_kpa;
  double ideal_force_n;
  double predicted_force_n;
  double mean_measured_force_n;
  double loss_fraction; // measured
};

inline ComparisonRow comparison_row(const std::string& shape_id, double pressure_kpa, const CrossSection& cs,
                                    const LossModel& fitted, double mean_measured_force_n) {
  if (pressure_kpa == 0.0) return {shape_id, 0.0, 0.0, 0.0, 0.0, 0.0};
  const Pressure p{pressure_kpa};
  const double ideal = p.kpa() * area(cs) * kKpaMm2ToNewton;
  return {shape_id,
          pressure_kpa,
          ideal,
          ideal * (1.0 - loss_fraction(p, fitted).fraction),
          mean_measured_force_n,
          loss_from_measurement(p, cs, Force{mean_measured_force_n})};
}

// One row per (shape, pressure) step in the dataset.
inline std::vector<ComparisonRow> comparison_report(const SweepDataset& ds,
                                                    const std::map<std::string, CrossSection>& shapes,
                                                    const LossModel& fitted) {
  std::vector<ComparisonRow> rows;
  for (const auto& a : ds.aggregates()) {
    auto it = shapes.find(a.shape_id);
    if (it == shapes.end())
      throw UnknownShape("no cross-section configured for shape '" + a.shape_id + "'");
    rows.push_back(comparison_row(a.shape_id, a.pressure_kpa, it->second, fitted, a.mean_force_n));
  }
  return rows;
}

} // namespace softact
