#pragma once
// Seedable stand-in for the balloon test rig. Produces sweep datasets from a
// ground-truth actuator model so fits can be checked against known answers.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "softact/characterization.hpp"
#include "softact/config.hpp"
#include "softact/error.hpp"
#include "softact/force_model.hpp"
#include "softact/geometry.hpp"

namespace softact {

struct RigConfig {
  std::map<std::string, ActuatorSpec> ground_truth;
  SweepProtocol protocol;
  double noise_sigma_n = 0.0;
  // Below this pressure the bladder is still filling the shell and loss is
  // blended linearly from start_loss (at the first step) to the model value here.
  double pre_pressurization_knee_kpa = 30.0;
  double start_loss = 0.70;
  std::uint64_t seed = 0;
  int conditioning_cycles = 10;

  void validate() const {
    protocol.validate();
    if (ground_truth.empty()) throw ConfigError("rig needs at least one ground-truth shape");
    if (!(noise_sigma_n >= 0.0)) throw ConfigError("noise sigma must be >= 0 N");
    if (!(start_loss >= 0.0 && start_loss <= 1.0)) throw ConfigError("start loss must be in [0, 1]");
    if (!std::isfinite(pre_pressurization_knee_kpa) || pre_pressurization_knee_kpa < 0.0)
      throw ConfigError("pre-pressurization knee must be >= 0 kPa");
    if (conditioning_cycles < 0) throw ConfigError("conditioning cycles must be >= 0");
    for (const auto& [id, spec] : ground_truth)
      if (protocol.stop_kpa > spec.max_pressure_kpa())
        throw ConfigError("protocol stop exceeds max pressure of shape '" + id + "'");
  }
};

inline Json to_json(const RigConfig& cfg) {
  Json gt = Json::object();
  for (const auto& [id, spec] : cfg.ground_truth) gt[id] = to_json(spec);
  return Json{{"ground_truth", gt},
              {"protocol", to_json(cfg.protocol)},
              {"noise_sigma_n", cfg.noise_sigma_n},
              {"pre_pressurization_knee_kpa", cfg.pre_pressurization_knee_kpa},
              {"start_loss", cfg.start_loss},
              {"seed", cfg.seed},
              {"conditioning_cycles", cfg.conditioning_cycles}};
}

inline RigConfig rig_config_from_json(const Json& j) {
  RigConfig cfg;
  if (!j.is_object() || !j.contains("ground_truth") || !j.at("ground_truth").is_object())
    throw ConfigError("rig config needs a 'ground_truth' object");
  for (const auto& [id, spec] : j.at("ground_truth").items())
    cfg.ground_truth.emplace(id, actuator_spec_from_json(spec));
  if (j.contains("protocol")) cfg.protocol = sweep_protocol_from_json(j.at("protocol"));
  cfg.noise_sigma_n = detail::optional<double>(j, "noise_sigma_n", cfg.noise_sigma_n);
  cfg.pre_pressurization_knee_kpa =
      detail::optional<double>(j, "pre_pressurization_knee_kpa", cfg.pre_pressurization_knee_kpa);
  cfg.start_loss = detail::optional<double>(j, "start_loss", cfg.start_loss);
  cfg.seed = detail::optional<std::uint64_t>(j, "seed", cfg.seed);
  cfg.conditioning_cycles = detail::optional<int>(j, "conditioning_cycles", cfg.conditioning_cycles);
  cfg.validate();
  return cfg;
}

// Balloon pre-conditioning is recorded only; it has no numeric effect.
inline std::vector<std::string> precondition_cycles(int n) {
  if (n < 0) throw ConfigError("conditioning cycle count must be >= 0");
  std::vector<std::string> log;
  for (int i = 1; i <= n; ++i) log.push_back(fmt::format("conditioning cycle {}/{}: inflate-deflate", i, n));
  return log;
}

// 1% of the ideal force at the middle of the default fit window.
inline double default_noise_sigma(const CrossSection& reference) {
  const double mid = (kDefaultFitWindow.min_kpa + kDefaultFitWindow.max_kpa) / 2.0;
  return 0.01 * ideal_force(Pressure{mid}, reference).newtons();
}

// The four equal-area shell shapes, each driven by the fitted balloon loss line.
inline RigConfig default_rig_config(std::uint64_t seed = 0) {
  RigConfig cfg;
  const auto family = equal_area_family(25.0, 2.0);
  const char* ids[] = {"circle", "triangle", "square", "rectangle"};
  const auto balloon = balloon_spec();
  for (std::size_t i = 0; i < family.size(); ++i)
    cfg.ground_truth.emplace(ids[i], ActuatorSpec{family[i], balloon.loss_model(), balloon.max_pressure_kpa(),
                                                  balloon.stroke_mm(), balloon.safety_cap_kpa()});
  cfg.noise_sigma_n = default_noise_sigma(family[0]);
  cfg.seed = seed;
  return cfg;
}

// Noise-free loss the rig applies at pressure p.
inline double rig_loss(const RigConfig& cfg, const ActuatorSpec& spec, double p_kpa) {
  const double knee = cfg.pre_pressurization_knee_kpa;
  const double start = cfg.protocol.start_kpa;
  if (p_kpa >= knee || knee <= start) return loss_fraction(Pressure{p_kpa}, spec.loss_model()).fraction;
  const double at_knee = loss_fraction(Pressure{knee}, spec.loss_model()).fraction;
  const double t = (p_kpa - start) / (knee - start);
  return cfg.start_loss + t * (at_knee - cfg.start_loss);
}

// Shapes in id order, then pressure steps, then trials; one normal draw per
// record from a single mt19937_64 stream. Negative noisy forces clamp to 0.
inline SweepDataset generate_sweep(const RigConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, cfg.noise_sigma_n > 0.0 ? cfg.noise_sigma_n : 1.0);

  std::vector<MeasurementRecord> records;
  const auto steps = cfg.protocol.steps();
  for (const auto& [id, spec] : cfg.ground_truth) {
    for (double p : steps) {
      double clean;
      if (p >= cfg.pre_pressurization_knee_kpa) {
        clean = predicted_force(Pressure{p}, spec).newtons();
      } else {
        const double ideal = ideal_force(Pressure{p}, spec.cross_section(), spec.safety_cap_kpa()).newtons();
        clean = ideal * (1.0 - rig_loss(cfg, spec, p));
      }
      for (int trial = 1; trial <= cfg.protocol.trials; ++trial) {
        const double f = cfg.noise_sigma_n > 0.0 ? clean + noise(rng) : clean;
        records.push_back({id, p, trial, f < 0.0 ? 0.0 : f});
      }
    }
  }

  std::vector<std::string> provenance{
      "generator=softact synthetic rig",
      fmt::format("seed={}", cfg.seed),
      fmt::format("config_hash={:016x}", fnv1a64(to_json(cfg).dump())),
      fmt::format("conditioning_cycles={}", cfg.conditioning_cycles),
  };
  for (auto& line : precondition_cycles(cfg.conditioning_cycles)) provenance.push_back(std::move(line));
  return SweepDataset{std::move(records), std::move(provenance)};
}

} // namespace softact
