#pragma once
// Unit conventions: pressure in kPa, length in mm, area in mm^2, force in N,
// time in s, lever arms in m, moments in N*m.

#include <cmath>
#include <compare>
#include <string>

#include "softact/error.hpp"

namespace softact {

inline constexpr double kPi = 3.14159265358979323846;

// 1 kPa acting on 1 mm^2 is 1e-3 N.
inline constexpr double kKpaMm2ToNewton = 1e-3;

// Beyond 60 kPa the 3D-printed rig risks fracture.
inline constexpr double kDefaultSafetyCapKpa = 60.0;

class Pressure {
public:
  constexpr Pressure() = default;
  explicit Pressure(double kpa) : kpa_(kpa) {
    if (!std::isfinite(kpa) || kpa < 0.0)
      throw InvalidDimension("pressure must be finite and >= 0 kPa, got " + std::to_string(kpa));
  }

  constexpr double kpa() const { return kpa_; }

  friend constexpr auto operator<=>(const Pressure&, const Pressure&) = default;

private:
  double kpa_ = 0.0;
};

class Force {
public:
  constexpr Force() = default;
  explicit Force(double newtons) : newtons_(newtons) {
    if (!std::isfinite(newtons))
      throw InvalidDimension("force must be finite");
  }

  constexpr double newtons() const { return newtons_; }

  friend constexpr auto operator<=>(const Force&, const Force&) = default;

private:
  double newtons_ = 0.0;
};

inline void check_safety_cap(Pressure p, double cap_kpa) {
  if (p.kpa() > cap_kpa)
    throw SafetyCapExceeded("pressure " + std::to_string(p.kpa()) + " kPa exceeds safety cap " +
                            std::to_string(cap_kpa) + " kPa");
}

} // namespace softact
