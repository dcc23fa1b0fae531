#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <variant>

#include "softact/error.hpp"
#include "softact/geometry.hpp"
#include "softact/units.hpp"

namespace softact {

struct LinearLoss {
  double slope_per_kpa;
  double intercept;
  friend bool operator==(const LinearLoss&, const LinearLoss&) = default;
};

struct ExponentialLoss {
  double amplitude;
  double decay_per_kpa;
  friend bool operator==(const ExponentialLoss&, const ExponentialLoss&) = default;
};

struct PressureRange {
  double min_kpa;
  double max_kpa;

  bool contains(double kpa) const { return kpa >= min_kpa && kpa <= max_kpa; }
  friend bool operator==(const PressureRange&, const PressureRange&) = default;
};

// Fraction of the ideal P*A force lost to bladder deformation, as a function
// of supply pressure. Valid (fitted) only within `valid_range`.
class LossModel {
public:
  using Form = std::variant<LinearLoss, ExponentialLoss>;

  LossModel(Form form, PressureRange valid_range) : form_(form), range_(valid_range) {
    if (!std::isfinite(range_.min_kpa) || !std::isfinite(range_.max_kpa) || range_.min_kpa < 0.0 ||
        range_.min_kpa >= range_.max_kpa)
      throw ConfigError("loss model valid range must satisfy 0 <= min < max");
    std::visit(
        [](const auto& f) {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, LinearLoss>) {
            if (!std::isfinite(f.slope_per_kpa) || !std::isfinite(f.intercept))
              throw ConfigError("linear loss coefficients must be finite");
          } else {
            if (!std::isfinite(f.amplitude) || !std::isfinite(f.decay_per_kpa) || f.amplitude < 0.0)
              throw ConfigError("exponential loss needs finite coefficients and amplitude >= 0");
          }
        },
        form_);
  }

  const Form& form() const { return form_; }
  const PressureRange& valid_range() const { return range_; }

  friend bool operator==(const LossModel&, const LossModel&) = default;

private:
  Form form_;
  PressureRange range_;
};

struct LossValue {
  double fraction;
  bool extrapolated; // pressure outside the model's valid range
};

inline LossValue loss_fraction(Pressure p, const LossModel& m) {
  const double raw = std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LinearLoss>)
          return f.slope_per_kpa * p.kpa() + f.intercept;
        else
          return f.amplitude * std::exp(-f.decay_per_kpa * p.kpa());
      },
      m.form());
  return {std::clamp(raw, 0.0, 1.0), !m.valid_range().contains(p.kpa())};
}

inline double efficiency(Pressure p, const LossModel& m) { return 1.0 - loss_fraction(p, m).fraction; }

// Exponential loss through two (pressure, loss) anchors.
inline ExponentialLoss exponential_through_anchors(double p1_kpa, double loss1, double p2_kpa, double loss2) {
  if (p1_kpa == p2_kpa || loss1 <= 0.0 || loss2 <= 0.0)
    throw ConfigError("exponential anchors need distinct pressures and positive losses");
  const double decay = std::log(loss1 / loss2) / (p2_kpa - p1_kpa);
  return {loss1 * std::exp(decay * p1_kpa), decay};
}

class ActuatorSpec {
public:
  ActuatorSpec(CrossSection cross_section, LossModel loss_model, double max_pressure_kpa, double stroke_mm,
               double safety_cap_kpa = kDefaultSafetyCapKpa, bool allow_extrapolation = false)
      : cross_section_(cross_section),
        loss_model_(loss_model),
        max_pressure_kpa_(max_pressure_kpa),
        stroke_mm_(stroke_mm),
        safety_cap_kpa_(safety_cap_kpa),
        allow_extrapolation_(allow_extrapolation) {
    if (!std::isfinite(stroke_mm) || stroke_mm <= 0.0)
      throw ConfigError("stroke must be > 0 mm");
    if (!std::isfinite(safety_cap_kpa) || safety_cap_kpa <= 0.0)
      throw ConfigError("safety cap must be > 0 kPa");
    if (!std::isfinite(max_pressure_kpa) || max_pressure_kpa <= 0.0 || max_pressure_kpa > safety_cap_kpa)
      throw ConfigError("max pressure must be in (0, safety cap]");
    if (loss_model.valid_range().max_kpa > safety_cap_kpa)
      throw ConfigError("loss model valid range exceeds the safety cap");
    if (max_pressure_kpa > loss_model.valid_range().max_kpa && !allow_extrapolation)
      throw ConfigError("max pressure lies above the loss model's valid range; set allow_extrapolation");
  }

  const CrossSection& cross_section() const { return cross_section_; }
  const LossModel& loss_model() const { return loss_model_; }
  double max_pressure_kpa() const { return max_pressure_kpa_; }
  double stroke_mm() const { return stroke_mm_; }
  double safety_cap_kpa() const { return safety_cap_kpa_; }
  bool allow_extrapolation() const { return allow_extrapolation_; }

  friend bool operator==(const ActuatorSpec&, const ActuatorSpec&) = default;

private:
  CrossSection cross_section_;
  LossModel loss_model_;
  double max_pressure_kpa_;
  double stroke_mm_;
  double safety_cap_kpa_;
  bool allow_extrapolation_;
};

// Block force: ideal force scaled by (1 - loss).
inline Force predicted_force(Pressure p, const ActuatorSpec& spec) {
  if (p.kpa() > spec.max_pressure_kpa())
    throw OverPressure("pressure " + std::to_string(p.kpa()) + " kPa exceeds actuator max " +
                       std::to_string(spec.max_pressure_kpa()) + " kPa");
  const Force ideal = ideal_force(p, spec.cross_section(), spec.safety_cap_kpa());
  return Force{ideal.newtons() * (1.0 - loss_fraction(p, spec.loss_model()).fraction)};
}

// Loss implied by a measured force. Not clamped: a negative value means the
// measurement beat the ideal model and should be inspected.
inline double loss_from_measurement(Pressure p, const CrossSection& cs, Force measured) {
  if (p.kpa() <= 0.0)
    throw ZeroPressure("loss is undefined at zero pressure");
  if (measured.newtons() < 0.0)
    throw InvalidDimension("measured force must be >= 0 N");
  const double ideal = p.kpa() * area(cs) * kKpaMm2ToNewton;
  return 1.0 - measured.newtons() / ideal;
}

// Latex balloon in the circular test shell, linear loss fitted over 30..60 kPa.
inline ActuatorSpec balloon_spec() {
  return ActuatorSpec{CrossSection{Circle{25.0}}, LossModel{LinearLoss{-0.005, 0.522}, {30.0, 60.0}}, 60.0, 5.0};
}

// Molded rounded-rectangle actuator used on the knee brace; loss falls from
// ~70% at 5 kPa to ~3% at 50 kPa.
inline ActuatorSpec engineered_spec() {
  return ActuatorSpec{CrossSection{RoundedRectangle{60.0, 40.0, 8.0}},
                      LossModel{ExponentialLoss{0.9930, 0.0700}, {5.0, 50.0}}, 50.0, 5.0};
}

} // namespace softact
