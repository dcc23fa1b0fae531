// softact: command-line front end for the actuator toolkit.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "softact/softact.hpp"

namespace fs = std::filesystem;
using namespace softact;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// Raised for bad flag values that CLI11 cannot check on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Output {
  std::string dir;
  std::string format = "both";

  bool csv() const { return format != "svg"; }
  bool svg() const { return format != "csv"; }

  void prepare() const {
    if (dir.empty()) return;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw UsageError("cannot create output directory " + dir);
  }

  void write(const std::string& name, const std::string& content) const {
    if (dir.empty()) return;
    const auto path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw UsageError("cannot write " + path.string());
    std::cout << "wrote " << path.string() << "\n";
  }
};

void add_output_flags(CLI::App* cmd, Output& out) {
  cmd->add_option("--out", out.dir, "Output directory (created if missing)");
  cmd->add_option("--format", out.format, "Output files to write")
      ->check(CLI::IsMember({"csv", "svg", "both"}))
      ->capture_default_str();
}

// "30:60:5" (inclusive range) or "0,30,45.5".
std::vector<double> parse_pressures(const std::string& text) {
  std::vector<double> out;
  auto number = [&](std::string_view s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(std::string(s), &used);
      if (used != s.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw UsageError("bad pressure value '" + std::string(s) + "'");
    }
  };
  if (text.find(':') != std::string::npos) {
    const auto parts = csv::split(text, ':');
    if (parts.size() != 3) throw UsageError("pressure range must be start:stop:step");
    const double start = number(parts[0]), stop = number(parts[1]), step = number(parts[2]);
    if (!(step > 0.0) || stop < start) throw UsageError("pressure range needs step > 0 and stop >= start");
    for (std::size_t i = 0;; ++i) {
      const double p = start + static_cast<double>(i) * step;
      if (p > stop + 1e-9 * step) break;
      out.push_back(p);
    }
  } else {
    for (auto part : csv::split(text, ',')) out.push_back(number(part));
  }
  if (out.empty()) throw UsageError("no pressures given");
  return out;
}

PressureRange parse_window(const std::string& text) {
  const auto parts = csv::split(text, ':');
  if (parts.size() != 2) throw UsageError("window must be min:max");
  try {
    const PressureRange w{std::stod(std::string(parts[0])), std::stod(std::string(parts[1]))};
    if (!(w.min_kpa < w.max_kpa)) throw UsageError("window needs min < max");
    return w;
  } catch (const std::invalid_argument&) {
    throw UsageError("bad window '" + text + "'");
  }
}

// A spec argument is a JSON file, or one of the built-in names when no such
// file exists.
ActuatorSpec resolve_spec(const std::string& arg) {
  if (fs::exists(arg)) return actuator_spec_from_json(load_json_file(arg));
  if (arg == "balloon") return balloon_spec();
  if (arg == "engineered") return engineered_spec();
  throw UsageError("spec '" + arg + "' is neither a file nor a built-in (balloon, engineered)");
}

std::string shape_table(const std::array<CrossSection, 4>& family) {
  const char* names[] = {"circle", "triangle", "square", "rectangle"};
  std::string out = "shape,kind,width_mm,height_mm,area_mm2\n";
  for (std::size_t i = 0; i < family.size(); ++i) {
    double w = 0.0, h = 0.0;
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Circle>) {
            w = h = 2.0 * s.radius_mm;
          } else if constexpr (std::is_same_v<T, EquilateralTriangle>) {
            w = s.side_mm;
            h = std::sqrt(3.0) / 2.0 * s.side_mm;
          } else if constexpr (std::is_same_v<T, Square>) {
            w = h = s.side_mm;
          } else {
            w = s.width_mm;
            h = s.height_mm;
          }
        },
        family[i].shape());
    out += fmt::format("{},{},{},{},{}\n", names[i], family[i].kind(), csv::fixed(w), csv::fixed(h),
                       csv::fixed(area(family[i])));
  }
  return out;
}

int cmd_geometry(double radius, double aspect, const Output& out) {
  std::array<CrossSection, 4> family = [&] {
    try {
      return equal_area_family(radius, aspect);
    } catch (const InvalidDimension& e) {
      throw UsageError(e.what());
    }
  }();
  const auto table = shape_table(family);
  std::cout << table;
  out.prepare();
  if (out.csv()) out.write("geometry.csv", table);
  return 0;
}

int cmd_predict(const std::string& spec_arg, const std::string& pressures_arg, const Output& out) {
  const auto spec = resolve_spec(spec_arg);
  const auto pressures = parse_pressures(pressures_arg);
  std::string table = "pressure_kpa,ideal_force_n,loss_fraction,efficiency,predicted_force_n,extrapolated\n";
  svg::Series ideal{"ideal", {}}, predicted{"predicted", {}};
  for (double kpa : pressures) {
    const Pressure p{kpa};
    const double fi = ideal_force(p, spec.cross_section(), spec.safety_cap_kpa()).newtons();
    const double fp = predicted_force(p, spec).newtons();
    const auto loss = loss_fraction(p, spec.loss_model());
    table += fmt::format("{},{},{},{},{},{}\n", csv::fixed(kpa), csv::fixed(fi), csv::fixed(loss.fraction),
                         csv::fixed(1.0 - loss.fraction), csv::fixed(fp), loss.extrapolated ? 1 : 0);
    ideal.points.emplace_back(kpa, fi);
    predicted.points.emplace_back(kpa, fp);
  }
  std::cout << table;
  out.prepare();
  if (out.csv()) out.write("predict.csv", table);
  if (out.svg())
    out.write("predict.svg", svg::line_chart("Ideal vs predicted block force", "pressure (kPa)", "force (N)",
                                             {ideal, predicted}));
  return 0;
}

int cmd_generate(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<double> noise,
                 const Output& out) {
  RigConfig cfg = config_path.empty() ? default_rig_config() : rig_config_from_json(load_json_file(config_path));
  if (seed) cfg.seed = *seed;
  if (noise) cfg.noise_sigma_n = *noise;
  const auto ds = generate_sweep(cfg);
  std::map<std::string, CrossSection> shapes;
  for (const auto& [id, spec] : cfg.ground_truth) shapes.emplace(id, spec.cross_section());

  const auto text = csv::write_measurements(ds);
  if (out.dir.empty()) {
    std::cout << text;
    return 0;
  }
  out.prepare();
  out.write("measurements.csv", text);
  out.write("shapes.json", shapes_to_json(shapes).dump(2) + "\n");
  return 0;
}

int cmd_fit(const std::string& input, const std::string& shapes_path, const std::string& window_arg,
            const std::string& protocol_path, const std::string& reference_arg, const Output& out) {
  const auto window = parse_window(window_arg);
  std::ifstream in(input, std::ios::binary);
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  const auto ds = csv::read_measurements(text);
  const auto shapes = shapes_from_json(load_json_file(shapes_path));
  const SweepProtocol protocol =
      protocol_path.empty() ? SweepProtocol{} : sweep_protocol_from_json(load_json_file(protocol_path));

  const auto violations = validate_sweep(ds, protocol);
  if (!violations.empty()) {
    std::cerr << "protocol violations:\n";
    for (const auto& v : violations) std::cerr << "  " << v.describe() << "\n";
    return kExitData;
  }

  std::optional<LossModel> reference;
  if (!reference_arg.empty()) reference = resolve_spec(reference_arg).loss_model();

  const auto series = compute_loss_series(ds, shapes);
  std::vector<std::pair<std::string, FitReport>> fits;
  for (const auto& [id, pts] : series) fits.emplace_back(id, fit_linear_loss(pts, window, reference));
  const auto average = average_loss_series(series);
  const auto avg_fit = fit_linear_loss(average, window, reference);
  fits.emplace_back("average", avg_fit);

  for (const auto& [name, f] : fits)
    std::cout << fmt::format("{:>10}: loss = {:.6f} * P + {:.6f}   r2 = {:.4f}\n", name, f.slope_per_kpa,
                             f.intercept, f.r_squared);

  const auto rows = comparison_report(ds, shapes, avg_fit.to_loss_model());
  out.prepare();
  if (out.csv()) {
    out.write("fit.csv", csv::write_fits(fits));
    out.write("residuals.csv", csv::write_residuals(fits));
    out.write("report.csv", csv::write_report(rows));
  }
  if (out.svg()) {
    std::vector<svg::Series> eff;
    for (const auto& [id, pts] : series) {
      svg::Series s{id, {}};
      for (const auto& pt : pts) s.points.emplace_back(pt.pressure_kpa, 1.0 - pt.loss);
      eff.push_back(std::move(s));
    }
    svg::Series line{"average fit", {}};
    for (double p : {window.min_kpa, window.max_kpa})
      line.points.emplace_back(p, 1.0 - (avg_fit.slope_per_kpa * p + avg_fit.intercept));
    eff.push_back(std::move(line));
    out.write("efficiency.svg", svg::line_chart("Efficiency (1 - loss) vs pressure", "pressure (kPa)",
                                                "efficiency", eff));

    std::map<std::string, std::array<svg::Series, 3>> force_series;
    for (const auto& r : rows) {
      auto [it, fresh] = force_series.try_emplace(r.shape_id);
      auto& s = it->second;
      if (fresh) {
        s[0].name = r.shape_id + " ideal";
        s[1].name = r.shape_id + " predicted";
        s[2].name = r.shape_id + " measured";
      }
      s[0].points.emplace_back(r.pressure_kpa, r.ideal_force_n);
      s[1].points.emplace_back(r.pressure_kpa, r.predicted_force_n);
      s[2].points.emplace_back(r.pressure_kpa, r.mean_measured_force_n);
    }
    std::vector<svg::Series> flat;
    for (auto& [id, s] : force_series)
      for (auto& one : s) flat.push_back(std::move(one));
    out.write("forces.svg", svg::line_chart("Ideal, predicted and mean measured force", "pressure (kPa)",
                                            "force (N)", flat));
  }
  return 0;
}

int cmd_simulate(const std::string& layout_path, const std::string& schedule_path, double duration, double dt,
                 const Output& out) {
  const auto layout = layout_path.empty() ? default_brace_layout() : brace_layout_from_json(load_json_file(layout_path));
  const auto schedule =
      schedule_path.empty() ? default_valgus_schedule() : gait_schedule_from_json(load_json_file(schedule_path));
  const auto trace = run_gait_cycle(layout, schedule, duration, dt);

  double peak_moment = 0.0;
  std::vector<double> peak_force(trace.actuator_ids.size(), 0.0);
  for (const auto& s : trace.samples) {
    if (std::abs(s.moment_nm) > std::abs(peak_moment)) peak_moment = s.moment_nm;
    for (std::size_t i = 0; i < s.actuators.size(); ++i) peak_force[i] = std::max(peak_force[i], s.actuators[i].force_n);
  }
  std::cout << fmt::format("samples: {}  peak corrective moment: {} N*m\n", trace.samples.size(),
                           csv::fixed(peak_moment));
  for (std::size_t i = 0; i < peak_force.size(); ++i)
    std::cout << fmt::format("  {:<14} peak force {} N\n", trace.actuator_ids[i], csv::fixed(peak_force[i]));

  const auto text = csv::write_trace(trace);
  if (out.dir.empty()) return 0;
  out.prepare();
  if (out.csv()) out.write("trace.csv", text);
  if (out.svg()) {
    std::vector<svg::Series> series;
    for (std::size_t i = 0; i < trace.actuator_ids.size(); ++i) {
      svg::Series s{trace.actuator_ids[i] + " force (N)", {}};
      for (const auto& smp : trace.samples) s.points.emplace_back(smp.t_s, smp.actuators[i].force_n);
      series.push_back(std::move(s));
    }
    svg::Series m{"moment (N*m)", {}};
    for (const auto& smp : trace.samples) m.points.emplace_back(smp.t_s, smp.moment_nm);
    series.push_back(std::move(m));
    out.write("trace.svg", svg::line_chart("Knee brace gait cycle", "time (s)", "force (N) / moment (N*m)", series));
  }
  return 0;
}

int cmd_defaults(const Output& out) {
  if (out.dir.empty()) throw UsageError("defaults needs --out");
  out.prepare();
  std::map<std::string, CrossSection> shapes;
  const auto rig = default_rig_config();
  for (const auto& [id, spec] : rig.ground_truth) shapes.emplace(id, spec.cross_section());
  out.write("balloon_spec.json", to_json(balloon_spec()).dump(2) + "\n");
  out.write("engineered_spec.json", to_json(engineered_spec()).dump(2) + "\n");
  out.write("shapes.json", shapes_to_json(shapes).dump(2) + "\n");
  out.write("rig.json", to_json(rig).dump(2) + "\n");
  out.write("layout.json", to_json(default_brace_layout()).dump(2) + "\n");
  out.write("valgus_schedule.json", to_json(default_valgus_schedule()).dump(2) + "\n");
  out.write("rest_schedule.json", to_json(GaitSchedule{{{"rest", 1.0, {}}}}).dump(2) + "\n");
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shell-constrained soft actuator toolkit: loss models, sweep fitting and knee-brace simulation"};
  app.require_subcommand(1);
  Output out;

  double radius = 25.0, aspect = 2.0;
  auto* geometry = app.add_subcommand("geometry", "Equal-area cross-section family");
  geometry->add_option("--radius", radius, "Reference circle radius (mm)")->capture_default_str();
  geometry->add_option("--aspect", aspect, "Rectangle width/height ratio (>= 1)")->capture_default_str();
  add_output_flags(geometry, out);

  std::string spec_arg, pressures_arg = "30:60:5";
  auto* predict = app.add_subcommand("predict", "Ideal and predicted block force over a pressure list");
  predict->add_option("--spec", spec_arg, "Actuator spec JSON, or built-in 'balloon' / 'engineered'")->required();
  predict->add_option("--pressures", pressures_arg, "start:stop:step or comma list (kPa)")->capture_default_str();
  add_output_flags(predict, out);

  std::string rig_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> noise;
  auto* generate = app.add_subcommand("generate", "Synthetic pressure-sweep measurements");
  generate->add_option("--config", rig_path, "Rig config JSON (default: four equal-area balloon shells)")
      ->check(CLI::ExistingFile);
  generate->add_option("--seed", seed, "Random seed (overrides the config)");
  generate->add_option("--noise", noise, "Force noise sigma in N (overrides the config)")->check(CLI::NonNegativeNumber);
  add_output_flags(generate, out);

  std::string input, shapes_path, window_arg = "30:60", protocol_path, reference_arg;
  auto* fit = app.add_subcommand("fit", "Fit the linear loss model and compare forces");
  fit->add_option("--input", input, "Measurement CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--shapes", shapes_path, "Shapes JSON")->required()->check(CLI::ExistingFile);
  fit->add_option("--window", window_arg, "Fit window min:max (kPa)")->capture_default_str();
  fit->add_option("--protocol", protocol_path, "Sweep protocol JSON (default 5..60 kPa step 5, 3 trials)")
      ->check(CLI::ExistingFile);
  fit->add_option("--reference", reference_arg, "Spec whose linear loss the fit is compared against");
  add_output_flags(fit, out);

  std::string layout_path, schedule_path;
  double duration = 1.0, dt = 0.01;
  auto* simulate = app.add_subcommand("simulate", "Simulate one gait cycle of the six-actuator brace");
  simulate->add_option("--layout", layout_path, "Brace layout JSON (default layout)")->check(CLI::ExistingFile);
  simulate->add_option("--schedule", schedule_path, "Gait schedule JSON (default valgus schedule)")
      ->check(CLI::ExistingFile);
  simulate->add_option("--duration", duration, "Gait cycle duration (s)")->capture_default_str();
  simulate->add_option("--dt", dt, "Time step (s)")->capture_default_str();
  add_output_flags(simulate, out);

  auto* defaults = app.add_subcommand("defaults", "Write the built-in configs as JSON files");
  add_output_flags(defaults, out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*geometry) return cmd_geometry(radius, aspect, out);
    if (*predict) return cmd_predict(spec_arg, pressures_arg, out);
    if (*generate) return cmd_generate(rig_path, seed, noise, out);
    if (*fit) return cmd_fit(input, shapes_path, window_arg, protocol_path, reference_arg, out);
    if (*simulate) return cmd_simulate(layout_path, schedule_path, duration, dt, out);
    if (*defaults) return cmd_defaults(out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
