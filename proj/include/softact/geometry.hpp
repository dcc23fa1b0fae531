#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "softact/error.hpp"
#include "softact/units.hpp"

namespace softact {

struct Circle {
  double radius_mm;
  friend bool operator==(const Circle&, const Circle&) = default;
};

struct EquilateralTriangle {
  double side_mm;
  friend bool operator==(const EquilateralTriangle&, const EquilateralTriangle&) = default;
};

struct Square {
  double side_mm;
  friend bool operator==(const Square&, const Square&) = default;
};

struct Rectangle {
  double width_mm;
  double height_mm;
  friend bool operator==(const Rectangle&, const Rectangle&) = default;
};

struct RoundedRectangle {
  double width_mm;
  double height_mm;
  double corner_radius_mm;
  friend bool operator==(const RoundedRectangle&, const RoundedRectangle&) = default;
};

// Planar interaction geometry between the pressurized bladder and the shell.
// Always valid once constructed.
class CrossSection {
public:
  using Shape = std::variant<Circle, EquilateralTriangle, Square, Rectangle, RoundedRectangle>;

  CrossSection(Shape shape) : shape_(shape) { validate(); } // NOLINT(google-explicit-constructor)

  template <typename S>
    requires std::is_constructible_v<Shape, S> && (!std::is_same_v<std::decay_t<S>, Shape>)
  CrossSection(S shape) : CrossSection(Shape{shape}) {} // NOLINT(google-explicit-constructor)

  const Shape& shape() const { return shape_; }

  std::string_view kind() const {
    return std::visit(
        [](const auto& s) -> std::string_view {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Circle>) return "circle";
          else if constexpr (std::is_same_v<T, EquilateralTriangle>) return "equilateral_triangle";
          else if constexpr (std::is_same_v<T, Square>) return "square";
          else if constexpr (std::is_same_v<T, Rectangle>) return "rectangle";
          else return "rounded_rectangle";
        },
        shape_);
  }

  friend bool operator==(const CrossSection&, const CrossSection&) = default;

private:
  static void positive(double v, const char* what) {
    if (!std::isfinite(v) || v <= 0.0)
      throw InvalidDimension(std::string(what) + " must be > 0 mm, got " + std::to_string(v));
  }

  void validate() const {
    std::visit(
        [](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Circle>) {
            positive(s.radius_mm, "radius");
          } else if constexpr (std::is_same_v<T, EquilateralTriangle> || std::is_same_v<T, Square>) {
            positive(s.side_mm, "side");
          } else if constexpr (std::is_same_v<T, Rectangle>) {
            positive(s.width_mm, "width");
            positive(s.height_mm, "height");
          } else {
            positive(s.width_mm, "width");
            positive(s.height_mm, "height");
            if (!std::isfinite(s.corner_radius_mm) || s.corner_radius_mm < 0.0)
              throw InvalidDimension("corner radius must be >= 0 mm");
            if (s.corner_radius_mm > std::min(s.width_mm, s.height_mm) / 2.0)
              throw InvalidDimension("corner radius exceeds min(width, height)/2");
          }
        },
        shape_);
  }

  Shape shape_;
};

// Exact analytic area in mm^2.
inline double area(const CrossSection& cs) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return kPi * s.radius_mm * s.radius_mm;
        } else if constexpr (std::is_same_v<T, EquilateralTriangle>) {
          return std::sqrt(3.0) / 4.0 * s.side_mm * s.side_mm;
        } else if constexpr (std::is_same_v<T, Square>) {
          return s.side_mm * s.side_mm;
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          return s.width_mm * s.height_mm;
        } else {
          // Each rounded corner removes an r x r square minus a quarter disc.
          const double r = s.corner_radius_mm;
          return s.width_mm * s.height_mm - (4.0 - kPi) * r * r;
        }
      },
      cs.shape());
}

// Circle, equilateral triangle, square and rectangle (width/height = aspect),
// all with the area of a circle of `reference_radius_mm`.
inline std::array<CrossSection, 4> equal_area_family(double reference_radius_mm, double rectangle_aspect) {
  if (!std::isfinite(reference_radius_mm) || reference_radius_mm <= 0.0)
    throw InvalidDimension("reference radius must be > 0 mm");
  if (!std::isfinite(rectangle_aspect) || rectangle_aspect < 1.0)
    throw InvalidDimension("rectangle aspect must be >= 1");

  const double a = kPi * reference_radius_mm * reference_radius_mm;
  const double height = std::sqrt(a / rectangle_aspect);
  return {
      CrossSection{Circle{reference_radius_mm}},
      CrossSection{EquilateralTriangle{std::sqrt(4.0 * a / std::sqrt(3.0))}},
      CrossSection{Square{std::sqrt(a)}},
      CrossSection{Rectangle{rectangle_aspect * height, height}},
  };
}

// Force of an ideal (lossless) piston: P * A.
inline Force ideal_force(Pressure p, const CrossSection& cs, double safety_cap_kpa = kDefaultSafetyCapKpa) {
  check_safety_cap(p, safety_cap_kpa);
  return Force{p.kpa() * area(cs) * kKpaMm2ToNewton};
}

} // namespace softact
