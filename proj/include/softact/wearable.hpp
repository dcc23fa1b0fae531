#pragma once
// Six-actuator knee brace: gait-phase scheduling, first-order pressure
// response, per-actuator block force and the corrective knee moment.
//
// Sign conventions (coronal plane, forces treated as point loads):
//   * a MedialToLateral force is positive, LateralToMedial negative;
//   * lever arms are measured along the leg from the knee axis, thigh > 0,
//     shank < 0, knee-site ~ 0;
//   * the corrective moment is the relative angulation moment of shank versus
//     thigh, so each load contributes signed(F) * |lever arm|.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "softact/config.hpp"
#include "softact/error.hpp"
#include "softact/force_model.hpp"
#include "softact/units.hpp"

namespace softact {

enum class Site { Thigh, Knee, Shank };
enum class Side { Medial, Lateral };
enum class ForceDirection { MedialToLateral, LateralToMedial };

inline constexpr double kKneeArmTolerance_m = 0.05;
inline constexpr double kDefaultTau_s = 0.2;

struct BraceActuator {
  std::string id;
  Site site;
  Side side;
  ActuatorSpec spec;
  double lever_arm_m;
  ForceDirection direction;
};

inline double direction_sign(ForceDirection d) { return d == ForceDirection::MedialToLateral ? 1.0 : -1.0; }

class BraceLayout {
public:
  explicit BraceLayout(std::vector<BraceActuator> actuators, double tau_s = kDefaultTau_s)
      : actuators_(std::move(actuators)), tau_s_(tau_s) {
    if (actuators_.size() != 6)
      throw ConfigError("brace needs exactly 6 actuators, got " + std::to_string(actuators_.size()));
    if (!std::isfinite(tau_s) || tau_s <= 0.0) throw ConfigError("pressure time constant must be > 0 s");
    std::set<std::string> ids;
    std::set<std::pair<Site, Side>> slots;
    for (const auto& a : actuators_) {
      if (a.id.empty() || !ids.insert(a.id).second) throw ConfigError("actuator ids must be unique and non-empty");
      if (!slots.insert({a.site, a.side}).second)
        throw ConfigError("more than one actuator at the same site and side ('" + a.id + "')");
      const bool arm_ok = a.site == Site::Thigh   ? a.lever_arm_m > 0.0
                          : a.site == Site::Shank ? a.lever_arm_m < 0.0
                                                  : std::abs(a.lever_arm_m) <= kKneeArmTolerance_m;
      if (!std::isfinite(a.lever_arm_m) || !arm_ok)
        throw ConfigError("lever arm of '" + a.id + "' violates the thigh > 0, knee ~ 0, shank < 0 convention");
    }
  }

  std::span<const BraceActuator> actuators() const { return actuators_; }
  double tau_s() const { return tau_s_; }

  std::size_t index_of(const std::string& id) const {
    for (std::size_t i = 0; i < actuators_.size(); ++i)
      if (actuators_[i].id == id) return i;
    throw ScheduleError("unknown actuator id '" + id + "'");
  }

private:
  std::vector<BraceActuator> actuators_;
  double tau_s_;
};

// Engineered actuators on both sides of thigh, knee and shank. Each pushes
// away from the side it is mounted on.
inline BraceLayout default_brace_layout(const ActuatorSpec& spec = engineered_spec(), double thigh_arm_m = 0.15,
                                        double shank_arm_m = -0.15, double tau_s = kDefaultTau_s) {
  std::vector<BraceActuator> acts;
  const std::pair<Site, double> sites[] = {{Site::Thigh, thigh_arm_m}, {Site::Knee, 0.0}, {Site::Shank, shank_arm_m}};
  const char* site_names[] = {"thigh", "knee", "shank"};
  for (std::size_t s = 0; s < 3; ++s)
    for (Side side : {Side::Medial, Side::Lateral})
      acts.push_back({std::string(site_names[s]) + (side == Side::Medial ? "_medial" : "_lateral"), sites[s].first,
                      side, spec, sites[s].second,
                      side == Side::Medial ? ForceDirection::MedialToLateral : ForceDirection::LateralToMedial});
  return BraceLayout{std::move(acts), tau_s};
}

struct MomentResult {
  double net_force_n;
  double moment_nm;
};

// forces_n[i] is the magnitude exerted by layout.actuators()[i]; 0 when idle.
inline MomentResult corrective_moment(const BraceLayout& layout, std::span<const double> forces_n) {
  if (forces_n.size() != layout.actuators().size())
    throw ConfigError("corrective_moment needs one force per actuator");
  MomentResult out{0.0, 0.0};
  for (std::size_t i = 0; i < forces_n.size(); ++i) {
    const auto& a = layout.actuators()[i];
    const double f = direction_sign(a.direction) * forces_n[i];
    out.net_force_n += f;
    out.moment_nm += f * std::abs(a.lever_arm_m);
  }
  return out;
}

// Exact zero-order-hold solution of a first-order lag over one step.
inline double step_pressure(double actual_kpa, double commanded_kpa, double dt_s, double tau_s) {
  if (!(dt_s > 0.0) || !(tau_s > 0.0)) throw ConfigError("step_pressure needs dt > 0 and tau > 0");
  const double next = actual_kpa + (commanded_kpa - actual_kpa) * (1.0 - std::exp(-dt_s / tau_s));
  return std::clamp(next, std::min(actual_kpa, commanded_kpa), std::max(actual_kpa, commanded_kpa));
}

struct GaitPhase {
  std::string name;
  double fraction; // of the gait cycle
  std::map<std::string, double> commands_kpa; // actuator id -> commanded pressure; others vent to 0
};

class GaitSchedule {
public:
  explicit GaitSchedule(std::vector<GaitPhase> phases) : phases_(std::move(phases)) {
    if (phases_.empty()) throw ScheduleError("schedule needs at least one phase");
    double sum = 0.0;
    for (const auto& ph : phases_) {
      if (!std::isfinite(ph.fraction) || ph.fraction <= 0.0)
        throw ScheduleError("phase '" + ph.name + "' must have a positive duration fraction");
      sum += ph.fraction;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ScheduleError("phase fractions must sum to 1");
  }

  std::span<const GaitPhase> phases() const { return phases_; }

  // Throws unless every command targets a known actuator within its rating.
  void validate_for(const BraceLayout& layout) const {
    for (const auto& ph : phases_)
      for (const auto& [id, kpa] : ph.commands_kpa) {
        const auto& a = layout.actuators()[layout.index_of(id)];
        if (!std::isfinite(kpa) || kpa < 0.0)
          throw ScheduleError("phase '" + ph.name + "' commands a negative pressure to '" + id + "'");
        if (kpa > a.spec.max_pressure_kpa())
          throw ScheduleError("phase '" + ph.name + "' commands " + std::to_string(kpa) + " kPa to '" + id +
                              "', above its max " + std::to_string(a.spec.max_pressure_kpa()) + " kPa");
      }
  }

  double shortest_fraction() const {
    double m = 1.0;
    for (const auto& ph : phases_) m = std::min(m, ph.fraction);
    return m;
  }

private:
  std::vector<GaitPhase> phases_;
};

// Illustrative valgus-correction pattern: the medial knee actuator pushes the
// knee laterally through stance while the lateral thigh and shank actuators
// provide the counter-forces at mid-stance. Swing is unassisted.
inline GaitSchedule default_valgus_schedule(double pressure_kpa = 50.0) {
  return GaitSchedule{{
      {"heel_strike", 0.10, {{"knee_medial", pressure_kpa}}},
      {"mid_stance", 0.30, {{"knee_medial", pressure_kpa}, {"thigh_lateral", pressure_kpa}, {"shank_lateral", pressure_kpa}}},
      {"toe_off", 0.20, {{"knee_medial", pressure_kpa}}},
      {"swing", 0.40, {}},
  }};
}

struct ActuatorSample {
  double commanded_kpa;
  double actual_kpa;
  double force_n;
};

struct TraceSample {
  double t_s;
  std::size_t phase;
  std::vector<ActuatorSample> actuators; // layout order
  double net_force_n;
  double moment_nm;
};

struct SimulationTrace {
  std::vector<std::string> actuator_ids;
  std::vector<TraceSample> samples;
};

// Samples t = k*dt for k = 0..floor(duration/dt). Commands switch at the exact
// cumulative phase fractions; pressures start vented unless `initial_kpa` is given.
inline SimulationTrace run_gait_cycle(const BraceLayout& layout, const GaitSchedule& schedule,
                                      double cycle_duration_s, double dt_s,
                                      std::span<const double> initial_kpa = {}) {
  if (!(cycle_duration_s > 0.0) || !std::isfinite(cycle_duration_s))
    throw ScheduleError("cycle duration must be > 0 s");
  if (!(dt_s > 0.0)) throw ScheduleError("dt must be > 0 s");
  if (dt_s >= schedule.shortest_fraction() * cycle_duration_s)
    throw ScheduleError("dt must be shorter than the shortest gait phase");
  schedule.validate_for(layout);

  const auto acts = layout.actuators();
  const std::size_t n_act = acts.size();
  if (!initial_kpa.empty() && initial_kpa.size() != n_act)
    throw ScheduleError("initial pressures need one value per actuator");

  // command table [phase][actuator]
  std::vector<std::vector<double>> commands;
  std::vector<double> boundaries;
  double cum = 0.0;
  for (const auto& ph : schedule.phases()) {
    std::vector<double> row(n_act, 0.0);
    for (const auto& [id, kpa] : ph.commands_kpa) row[layout.index_of(id)] = kpa;
    commands.push_back(std::move(row));
    cum += ph.fraction;
    boundaries.push_back(cum);
  }
  boundaries.back() = 1.0;

  SimulationTrace trace;
  for (const auto& a : acts) trace.actuator_ids.push_back(a.id);

  std::vector<double> actual(n_act, 0.0);
  if (!initial_kpa.empty()) {
    for (std::size_t i = 0; i < n_act; ++i) {
      if (!(initial_kpa[i] >= 0.0) || initial_kpa[i] > acts[i].spec.max_pressure_kpa())
        throw ScheduleError("initial pressure out of range for '" + acts[i].id + "'");
      actual[i] = initial_kpa[i];
    }
  }

  const auto n_steps = static_cast<std::size_t>(std::floor(cycle_duration_s / dt_s + 1e-9));
  std::vector<double> forces(n_act);
  for (std::size_t k = 0; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) * dt_s;
    const double frac = t / cycle_duration_s;
    std::size_t phase = 0;
    // 1e-12 absorbs rounding in the cumulative sums (0.4 + 0.2 != 0.6)
    while (phase + 1 < boundaries.size() && frac >= boundaries[phase] - 1e-12) ++phase;

    TraceSample s{t, phase, {}, 0.0, 0.0};
    s.actuators.reserve(n_act);
    for (std::size_t i = 0; i < n_act; ++i) {
      forces[i] = predicted_force(Pressure{actual[i]}, acts[i].spec).newtons();
      s.actuators.push_back({commands[phase][i], actual[i], forces[i]});
    }
    const auto m = corrective_moment(layout, forces);
    s.net_force_n = m.net_force_n;
    s.moment_nm = m.moment_nm;
    trace.samples.push_back(std::move(s));

    for (std::size_t i = 0; i < n_act; ++i)
      actual[i] = step_pressure(actual[i], commands[phase][i], dt_s, layout.tau_s());
  }
  return trace;
}

// Layout config:
//   {"tau_s": 0.2, "actuators": [{"id", "site": "thigh"|"knee"|"shank", "side": "medial"|"lateral",
//     "lever_arm_m", "force_direction": "medial_to_lateral"|"lateral_to_medial", "spec": {...}}, ...]}
// Schedule config:
//   {"phases": [{"name", "fraction", "commands_kpa": {"<actuator id>": kPa, ...}}, ...]}

namespace detail {

template <typename E, std::size_t N>
E parse_enum(const std::string& text, const std::array<std::pair<const char*, E>, N>& table, const char* what) {
  for (const auto& [name, value] : table)
    if (text == name) return value;
  throw ConfigError(std::string("unknown ") + what + " '" + text + "'");
}

template <typename E, std::size_t N>
std::string enum_name(E value, const std::array<std::pair<const char*, E>, N>& table) {
  for (const auto& [name, v] : table)
    if (v == value) return name;
  return "?";
}

inline constexpr std::array<std::pair<const char*, Site>, 3> kSiteNames{
    {{"thigh", Site::Thigh}, {"knee", Site::Knee}, {"shank", Site::Shank}}};
inline constexpr std::array<std::pair<const char*, Side>, 2> kSideNames{
    {{"medial", Side::Medial}, {"lateral", Side::Lateral}}};
inline constexpr std::array<std::pair<const char*, ForceDirection>, 2> kDirectionNames{
    {{"medial_to_lateral", ForceDirection::MedialToLateral}, {"lateral_to_medial", ForceDirection::LateralToMedial}}};

} // namespace detail

inline Json to_json(const BraceLayout& layout) {
  Json acts = Json::array();
  for (const auto& a : layout.actuators())
    acts.push_back(Json{{"id", a.id},
                        {"site", detail::enum_name(a.site, detail::kSiteNames)},
                        {"side", detail::enum_name(a.side, detail::kSideNames)},
                        {"lever_arm_m", a.lever_arm_m},
                        {"force_direction", detail::enum_name(a.direction, detail::kDirectionNames)},
                        {"spec", to_json(a.spec)}});
  return Json{{"tau_s", layout.tau_s()}, {"actuators", acts}};
}

inline BraceLayout brace_layout_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("actuators") || !j.at("actuators").is_array())
    throw ConfigError("layout config needs an 'actuators' array");
  std::vector<BraceActuator> acts;
  for (const auto& a : j.at("actuators")) {
    if (!a.contains("spec")) throw ConfigError("actuator entry needs a 'spec'");
    acts.push_back({detail::required<std::string>(a, "id"),
                    detail::parse_enum(detail::required<std::string>(a, "site"), detail::kSiteNames, "site"),
                    detail::parse_enum(detail::required<std::string>(a, "side"), detail::kSideNames, "side"),
                    actuator_spec_from_json(a.at("spec")),
                    detail::required<double>(a, "lever_arm_m"),
                    detail::parse_enum(detail::required<std::string>(a, "force_direction"), detail::kDirectionNames,
                                       "force direction")});
  }
  return BraceLayout{std::move(acts), detail::optional<double>(j, "tau_s", kDefaultTau_s)};
}

inline Json to_json(const GaitSchedule& schedule) {
  Json phases = Json::array();
  for (const auto& ph : schedule.phases()) {
    Json cmds = Json::object();
    for (const auto& [id, kpa] : ph.commands_kpa) cmds[id] = kpa;
    phases.push_back(Json{{"name", ph.name}, {"fraction", ph.fraction}, {"commands_kpa", cmds}});
  }
  return Json{{"phases", phases}};
}

inline GaitSchedule gait_schedule_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("phases") || !j.at("phases").is_array())
    throw ConfigError("schedule config needs a 'phases' array");
  std::vector<GaitPhase> phases;
  for (const auto& ph : j.at("phases")) {
    GaitPhase phase{detail::required<std::string>(ph, "name"), detail::required<double>(ph, "fraction"), {}};
    if (ph.contains("commands_kpa"))
      phase.commands_kpa = detail::required<std::map<std::string, double>>(ph, "commands_kpa");
    phases.push_back(std::move(phase));
  }
  return GaitSchedule{std::move(phases)};
}

} // namespace softact
