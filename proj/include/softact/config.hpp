#pragma once
// JSON config schema for cross-sections, loss models, actuator specs and sweep
// protocols. Field names carry their unit suffix.
//
//   cross section: {"kind": "circle", "radius_mm": 25}
//                  {"kind": "equilateral_triangle" | "square", "side_mm": ...}
//                  {"kind": "rectangle", "width_mm": ..., "height_mm": ...}
//                  {"kind": "rounded_rectangle", "width_mm", "height_mm", "corner_radius_mm"}
//   loss model:    {"form": "linear", "slope_per_kpa", "intercept", "valid_range_kpa": [lo, hi]}
//                  {"form": "exponential", "amplitude", "decay_per_kpa", "valid_range_kpa": [lo, hi]}
//   actuator spec: {"cross_section": {...}, "loss_model": {...}, "max_pressure_kpa", "stroke_mm",
//                   "safety_cap_kpa" (optional, 60), "allow_extrapolation" (optional, false)}
//   shapes:        {"shapes": {"<shape_id>": <cross section>, ...}}

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>

#include <json.hpp>

#include "softact/characterization.hpp"
#include "softact/error.hpp"
#include "softact/force_model.hpp"
#include "softact/geometry.hpp"

namespace softact {

using Json = nlohmann::ordered_json;

namespace detail {

template <typename T>
T required(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <typename T>
T optional(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? required<T>(j, key) : fallback;
}

} // namespace detail

inline Json to_json(const CrossSection& cs) {
  Json j;
  j["kind"] = std::string(cs.kind());
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle>) {
          j["radius_mm"] = s.radius_mm;
        } else if constexpr (std::is_same_v<T, EquilateralTriangle> || std::is_same_v<T, Square>) {
          j["side_mm"] = s.side_mm;
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          j["width_mm"] = s.width_mm;
          j["height_mm"] = s.height_mm;
        } else {
          j["width_mm"] = s.width_mm;
          j["height_mm"] = s.height_mm;
          j["corner_radius_mm"] = s.corner_radius_mm;
        }
      },
      cs.shape());
  return j;
}

inline CrossSection cross_section_from_json(const Json& j) {
  using detail::required;
  const auto kind = required<std::string>(j, "kind");
  if (kind == "circle") return Circle{required<double>(j, "radius_mm")};
  if (kind == "equilateral_triangle") return EquilateralTriangle{required<double>(j, "side_mm")};
  if (kind == "square") return Square{required<double>(j, "side_mm")};
  if (kind == "rectangle") return Rectangle{required<double>(j, "width_mm"), required<double>(j, "height_mm")};
  if (kind == "rounded_rectangle")
    return RoundedRectangle{required<double>(j, "width_mm"), required<double>(j, "height_mm"),
                            required<double>(j, "corner_radius_mm")};
  throw ConfigError("unknown cross-section kind '" + kind + "'");
}

inline Json to_json(const LossModel& m) {
  Json j;
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LinearLoss>) {
          j["form"] = "linear";
          j["slope_per_kpa"] = f.slope_per_kpa;
          j["intercept"] = f.intercept;
        } else {
          j["form"] = "exponential";
          j["amplitude"] = f.amplitude;
          j["decay_per_kpa"] = f.decay_per_kpa;
        }
      },
      m.form());
  j["valid_range_kpa"] = {m.valid_range().min_kpa, m.valid_range().max_kpa};
  return j;
}

inline LossModel loss_model_from_json(const Json& j) {
  using detail::required;
  const auto range = required<std::vector<double>>(j, "valid_range_kpa");
  if (range.size() != 2) throw ConfigError("valid_range_kpa must be [min, max]");
  const auto form = required<std::string>(j, "form");
  if (form == "linear")
    return LossModel{LinearLoss{required<double>(j, "slope_per_kpa"), required<double>(j, "intercept")},
                     {range[0], range[1]}};
  if (form == "exponential")
    return LossModel{ExponentialLoss{required<double>(j, "amplitude"), required<double>(j, "decay_per_kpa")},
                     {range[0], range[1]}};
  throw ConfigError("unknown loss model form '" + form + "'");
}

inline Json to_json(const ActuatorSpec& s) {
  Json j;
  j["cross_section"] = to_json(s.cross_section());
  j["loss_model"] = to_json(s.loss_model());
  j["max_pressure_kpa"] = s.max_pressure_kpa();
  j["stroke_mm"] = s.stroke_mm();
  j["safety_cap_kpa"] = s.safety_cap_kpa();
  j["allow_extrapolation"] = s.allow_extrapolation();
  return j;
}

inline ActuatorSpec actuator_spec_from_json(const Json& j) {
  using detail::required;
  if (!j.is_object() || !j.contains("cross_section") || !j.contains("loss_model"))
    throw ConfigError("actuator spec needs 'cross_section' and 'loss_model'");
  return ActuatorSpec{cross_section_from_json(j.at("cross_section")),
                      loss_model_from_json(j.at("loss_model")),
                      required<double>(j, "max_pressure_kpa"),
                      required<double>(j, "stroke_mm"),
                      detail::optional<double>(j, "safety_cap_kpa", kDefaultSafetyCapKpa),
                      detail::optional<bool>(j, "allow_extrapolation", false)};
}

inline Json to_json(const SweepProtocol& p) {
  return Json{{"start_kpa", p.start_kpa},
              {"step_kpa", p.step_kpa},
              {"stop_kpa", p.stop_kpa},
              {"trials", p.trials},
              {"safety_cap_kpa", p.safety_cap_kpa}};
}

inline SweepProtocol sweep_protocol_from_json(const Json& j) {
  SweepProtocol p;
  p.start_kpa = detail::optional<double>(j, "start_kpa", p.start_kpa);
  p.step_kpa = detail::optional<double>(j, "step_kpa", p.step_kpa);
  p.stop_kpa = detail::optional<double>(j, "stop_kpa", p.stop_kpa);
  p.trials = detail::optional<int>(j, "trials", p.trials);
  p.safety_cap_kpa = detail::optional<double>(j, "safety_cap_kpa", p.safety_cap_kpa);
  p.validate();
  return p;
}

inline Json shapes_to_json(const std::map<std::string, CrossSection>& shapes) {
  Json inner = Json::object();
  for (const auto& [id, cs] : shapes) inner[id] = to_json(cs);
  return Json{{"shapes", inner}};
}

inline std::map<std::string, CrossSection> shapes_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("shapes") || !j.at("shapes").is_object())
    throw ConfigError("shapes config needs a 'shapes' object");
  std::map<std::string, CrossSection> out;
  for (const auto& [id, cs] : j.at("shapes").items()) out.emplace(id, cross_section_from_json(cs));
  return out;
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str());
}

// 64-bit FNV-1a, used for config fingerprints in provenance headers.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace softact
