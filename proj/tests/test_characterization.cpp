#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "softact/csv.hpp"
#include "softact/synthetic_rig.hpp"

using namespace softact;
using namespace softact::oracle;

namespace {

std::map<std::string, CrossSection> default_shapes() {
  std::map<std::string, CrossSection> shapes;
  for (const auto& [id, spec] : default_rig_config().ground_truth) shapes.emplace(id, spec.cross_section());
  return shapes;
}

SweepDataset clean_dataset() {
  auto cfg = default_rig_config(1);
  cfg.noise_sigma_n = 0.0;
  return generate_sweep(cfg);
}

std::vector<MeasurementRecord> without(std::vector<MeasurementRecord> rs, const std::string& shape, double p) {
  std::erase_if(rs, [&](const MeasurementRecord& r) { return r.shape_id == shape && r.pressure_kpa == p; });
  return rs;
}

// Loss lines ordered rectangle < square < circle < triangle.
RigConfig ordered_rig(std::uint64_t seed, double sigma) {
  auto cfg = default_rig_config(seed);
  const std::map<std::string, double> intercepts{
      {"rectangle", 0.500}, {"square", 0.505}, {"circle", 0.522}, {"triangle", 0.545}};
  std::map<std::string, ActuatorSpec> gt;
  for (const auto& [id, spec] : cfg.ground_truth)
    gt.emplace(id, ActuatorSpec{spec.cross_section(), LossModel{LinearLoss{-0.005, intercepts.at(id)}, {30, 60}},
                                60, 5});
  cfg.ground_truth = gt;
  cfg.noise_sigma_n = sigma;
  return cfg;
}

} // namespace

TEST(Dataset, AggregatesAreGroupMeans) {
  const SweepDataset ds{{{"a", 10, 1, 1.0}, {"a", 10, 2, 2.0}, {"a", 10, 3, 6.0}, {"b", 10, 1, 4.0}}};
  ASSERT_EQ(ds.aggregates().size(), 2u);
  EXPECT_EQ(ds.aggregates()[0].count, 3u);
  EXPECT_DOUBLE_EQ(ds.aggregates()[0].mean_force_n, 3.0);
  EXPECT_DOUBLE_EQ(ds.aggregates()[0].stddev_force_n, std::sqrt(7.0));
  EXPECT_EQ(ds.aggregates()[1].stddev_force_n, 0.0);
}

TEST(Dataset, RejectsInvalidRecords) {
  EXPECT_THROW(SweepDataset({{"a", 0, 1, 1}}), ConfigError);
  EXPECT_THROW(SweepDataset({{"a", 10, 0, 1}}), ConfigError);
  EXPECT_THROW(SweepDataset({{"a", 10, 1, -1}}), ConfigError);
  EXPECT_THROW(SweepDataset({{"", 10, 1, 1}}), ConfigError);
}

TEST(ValidateSweep, ConformantDataset) {
  const auto ds = clean_dataset();
  EXPECT_EQ(ds.shape_ids().size(), 4u);
  EXPECT_TRUE(validate_sweep(ds, SweepProtocol{}).empty());
}

TEST(ValidateSweep, MissingStep) {
  const SweepDataset ds{without(clean_dataset().records(), "square", 45)};
  const auto v = validate_sweep(ds, SweepProtocol{});
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], (Violation{Violation::Kind::MissingStep, "square", 45.0}));
}

TEST(ValidateSweep, OverCap) {
  auto rs = clean_dataset().records();
  rs.push_back({"circle", 70, 1, 100});
  const auto v = validate_sweep(SweepDataset{rs}, SweepProtocol{});
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, Violation::Kind::OverCap);
  EXPECT_EQ(v[0].pressure_kpa, 70.0);
}

TEST(ValidateSweep, TrialCountAndOffGrid) {
  auto rs = clean_dataset().records();
  std::erase_if(rs, [](const MeasurementRecord& r) { return r.shape_id == "circle" && r.pressure_kpa == 20 && r.trial == 3; });
  rs.push_back({"triangle", 42.5, 1, 50});
  const auto v = validate_sweep(SweepDataset{rs}, SweepProtocol{});
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0], (Violation{Violation::Kind::TrialCount, "circle", 20.0, 2}));
  EXPECT_EQ(v[1], (Violation{Violation::Kind::OffProtocolStep, "triangle", 42.5}));
}

TEST(LossSeries, NoiselessRoundTripOnLine) {
  const auto series = compute_loss_series(clean_dataset(), default_shapes());
  ASSERT_EQ(series.size(), 4u);
  for (const auto& [id, pts] : series)
    for (const auto& pt : pts)
      if (pt.pressure_kpa >= 30) {
        EXPECT_NEAR(pt.loss, -0.005 * pt.pressure_kpa + 0.522, 1e-12) << id;
      }
}

TEST(LossSeries, BalloonEndpoints) {
  const SweepDataset ds{{{"circle", 60, 1, 91.66}, {"circle", 30, 1, 36.99}}};
  const auto s = compute_loss_series(ds, {{"circle", Circle{25}}}).at("circle");
  EXPECT_NEAR(s[0].loss, 0.372, 1e-4);
  EXPECT_NEAR(s[1].loss, 0.222, 1e-4);
}

TEST(LossSeries, UnknownShape) {
  const SweepDataset ds{{{"hexagon", 60, 1, 91.66}}};
  EXPECT_THROW(compute_loss_series(ds, {{"circle", Circle{25}}}), UnknownShape);
}

TEST(Fit, ExactPointsOnLine) {
  const std::vector<LossPoint> pts{{30, 0.372}, {35, 0.347}, {40, 0.322}, {45, 0.297},
                                   {50, 0.272}, {55, 0.247}, {60, 0.222}};
  const auto f = fit_linear_loss(pts);
  EXPECT_NEAR(f.slope_per_kpa, -0.005, 1e-12);
  EXPECT_NEAR(f.intercept, 0.522, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_EQ(f.residuals.size(), 7u);
}

TEST(Fit, WindowAndReference) {
  auto pts = line_points(-0.005, 0.522, 5, 60);
  pts[0].loss = 0.70; // pre-pressurization regime, outside the window
  const auto f = fit_linear_loss(pts, {30, 60}, balloon_spec().loss_model());
  EXPECT_EQ(f.residuals.size(), 7u);
  ASSERT_TRUE(f.reference_deltas.has_value());
  EXPECT_NEAR(f.reference_deltas->first, 0.0, 1e-12);
  EXPECT_NEAR(f.reference_deltas->second, 0.0, 1e-12);
  EXPECT_FALSE(fit_linear_loss(pts, {30, 60}, engineered_spec().loss_model()).reference_deltas.has_value());
}

TEST(Fit, Errors) {
  EXPECT_THROW(fit_linear_loss(line_points(-0.005, 0.5, 30, 35)), InsufficientData);
  const std::vector<LossPoint> same{{40, 0.3}, {40, 0.31}, {40, 0.29}};
  EXPECT_THROW(fit_linear_loss(same), DegenerateData);
}

TEST(Fit, FlatSeriesHasUnitRSquared) {
  const auto f = fit_linear_loss(line_points(0.0, 0.25));
  EXPECT_EQ(f.slope_per_kpa, 0.0);
  EXPECT_EQ(f.r_squared, 1.0);
}

TEST(Fit, ResidualsSumToZero) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto f = fit_linear_loss(noisy(line_points(-0.005, 0.522), 0.02, seed));
    double sum = 0.0;
    for (const auto& r : f.residuals) sum += r.loss;
    EXPECT_LT(std::abs(sum), 1e-9 * 7);
    EXPECT_GE(f.r_squared, 0.0);
    EXPECT_LE(f.r_squared, 1.0);
  }
}

TEST(Fit, MatchesGridSearchOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> s(-0.01, 0.0), i(0.3, 0.7), sigma(0.0, 0.03);
  for (int k = 0; k < 20; ++k) {
    const auto pts = noisy(line_points(s(rng), i(rng)), sigma(rng), 1000 + k);
    const auto g = grid_search_fit(pts);
    const auto f = fit_linear_loss(pts);
    EXPECT_NEAR(f.slope_per_kpa, g.slope, 16 * g.slope_cell);
    EXPECT_NEAR(f.intercept, g.intercept, 16 * g.intercept_cell);
  }
}

TEST(Fit, MonteCarloSlopeRecovery) {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto f = fit_linear_loss(noisy(line_points(-0.005, 0.522), 0.01, seed));
    if (std::abs(f.slope_per_kpa + 0.005) <= 0.0008) ++hits;
  }
  EXPECT_GE(hits, 190);
}

TEST(Fit, RSquaredFallsWithNoise) {
  const double sigmas[] = {0.0, 0.005, 0.01, 0.02};
  double prev = 2.0;
  for (double sigma : sigmas) {
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed)
      mean += fit_linear_loss(noisy(line_points(-0.005, 0.522), sigma, seed)).r_squared;
    mean /= 200;
    EXPECT_LT(mean, prev) << sigma;
    prev = mean;
  }
}

TEST(Fit, DefaultRigNoisyDatasetHighRSquared) {
  const auto ds = generate_sweep(default_rig_config(7));
  const auto avg = average_loss_series(compute_loss_series(ds, default_shapes()));
  EXPECT_GE(fit_linear_loss(avg).r_squared, 0.97);
}

TEST(Report, SixtyKpaRow) {
  const auto row = comparison_row("circle", 60, Circle{25}, balloon_spec().loss_model(), 91.66);
  EXPECT_NEAR(row.ideal_force_n, 117.81, 0.01);
  EXPECT_NEAR(row.predicted_force_n, 91.66, 0.01);
  EXPECT_NEAR(row.loss_fraction, 0.222, 1e-4);
}

TEST(Report, ZeroPressureRow) {
  const auto row = comparison_row("circle", 0, Circle{25}, balloon_spec().loss_model(), 0.0);
  EXPECT_EQ(row.ideal_force_n, 0.0);
  EXPECT_EQ(row.predicted_force_n, 0.0);
  EXPECT_EQ(row.mean_measured_force_n, 0.0);
  EXPECT_EQ(row.loss_fraction, 0.0);
}

TEST(Report, ShapeOrderingOnDefaultRigData) {
  const auto ds = generate_sweep(ordered_rig(3, 0.2));
  const auto rows = comparison_report(ds, default_shapes(), balloon_spec().loss_model());
  std::map<double, std::map<std::string, double>> by_p;
  for (const auto& r : rows) by_p[r.pressure_kpa][r.shape_id] = r.loss_fraction;
  int checked = 0;
  for (const auto& [p, loss] : by_p) {
    if (p < 30) continue;
    EXPECT_LE(loss.at("square"), loss.at("circle")) << p;
    EXPECT_LE(loss.at("rectangle"), loss.at("circle")) << p;
    EXPECT_LE(loss.at("circle"), loss.at("triangle")) << p;
    ++checked;
  }
  EXPECT_EQ(checked, 7);
}

TEST(Report, PermutationInvariance) {
  const auto base = generate_sweep(default_rig_config(9));
  auto shuffled = base.records();
  std::mt19937_64 rng(4);
  const auto ref_fit = fit_linear_loss(average_loss_series(compute_loss_series(base, default_shapes())));
  const auto ref_csv = csv::write_report(comparison_report(base, default_shapes(), ref_fit.to_loss_model()));
  for (int k = 0; k < 10; ++k) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const SweepDataset ds{shuffled};
    ASSERT_EQ(ds.aggregates().size(), base.aggregates().size());
    for (std::size_t i = 0; i < ds.aggregates().size(); ++i)
      EXPECT_EQ(ds.aggregates()[i].mean_force_n, base.aggregates()[i].mean_force_n);
    const auto fit = fit_linear_loss(average_loss_series(compute_loss_series(ds, default_shapes())));
    EXPECT_EQ(fit.slope_per_kpa, ref_fit.slope_per_kpa);
    EXPECT_EQ(fit.intercept, ref_fit.intercept);
    EXPECT_EQ(csv::write_report(comparison_report(ds, default_shapes(), fit.to_loss_model())), ref_csv);
  }
}
