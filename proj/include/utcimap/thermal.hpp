#pragma once

/**
 * @file thermal.hpp
 * @brief Thermophysical core: vapour pressure, mean radiant temperature from a
 *        black globe, UTCI and the UTCI offset against a shaded, sheltered
 *        reference.
 *
 * Everything here is pure: no state, no I/O, and identical inputs give
 * bit-identical outputs.
 */

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "utcimap/errors.hpp"
#include "utcimap/time.hpp"
#include "utcimap/utci_coefficients.hpp"

namespace utcimap::thermal {

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

constexpr std::uint64_t checksum(const decltype(kUtciTerms)& terms) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto mix = [&h](std::uint8_t b) {
    h ^= b;
    h *= 0x100000001B3ULL;
  };
  for (const auto& t : terms) {
    mix(t.ta);
    mix(t.va);
    mix(t.dmrt);
    mix(t.pa);
    const auto bits = std::bit_cast<std::uint64_t>(t.coefficient);
    for (int i = 0; i < 8; ++i) mix(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  return h;
}

static_assert(checksum(kUtciTerms) == kUtciTermsChecksum,
              "UTCI coefficient table does not match its recorded checksum");

}  // namespace detail

/// One instrument reading as seen by the thermal formulas.
struct ThermalState {
  double t_air = 0.0;                    // °C
  double rh = 0.0;                       // %
  std::optional<double> t_globe;         // °C
  double wind = 0.0;                     // m/s at `height`
  double height = 1.5;                   // m
  std::optional<double> net_radiation;   // W/m²

  void validate() const {
    if (!std::isfinite(t_air) || !std::isfinite(rh) || !std::isfinite(wind) || !std::isfinite(height))
      throw DomainError("thermal state: non-finite value");
    if (rh < 0.0 || rh > 100.0) throw DomainError("thermal state: rh " + detail::num(rh) + " outside [0, 100]");
    if (wind < 0.0) throw DomainError("thermal state: negative wind " + detail::num(wind));
    if (height <= 0.0) throw DomainError("thermal state: height must be > 0");
  }
};

enum class GlobeFormula {
  ashrae_standard_globe,  // 150 mm globe, fixed 2.47e8 convective coefficient
  iso7726_forced,         // forced convection, explicit diameter and emissivity
};

struct GlobeSpec {
  double diameter = 0.15;   // m
  double emissivity = 0.95;
  GlobeFormula formula = GlobeFormula::iso7726_forced;

  void validate() const {
    if (!(diameter > 0.0)) throw DomainError("globe spec: diameter must be > 0");
    if (!(emissivity > 0.0 && emissivity <= 1.0)) throw DomainError("globe spec: emissivity must be in (0, 1]");
  }
};

/// Magnus saturation vapour pressure over water, hPa.
inline double saturation_vapor_pressure(double t_air) {
  if (!std::isfinite(t_air) || t_air <= -60.0 || t_air >= 60.0)
    throw DomainError("saturation vapour pressure: t_air " + detail::num(t_air) + " outside (-60, 60)");
  return 6.1078 * std::exp(17.27 * t_air / (t_air + 237.3));
}

/// Actual vapour pressure (hPa) from air temperature (°C) and relative humidity (%).
inline double vapor_pressure(double t_air, double rh) {
  if (!std::isfinite(rh) || rh < 0.0 || rh > 100.0)
    throw DomainError("vapour pressure: rh " + detail::num(rh) + " outside [0, 100]");
  return rh / 100.0 * saturation_vapor_pressure(t_air);
}

/**
 * Mean radiant temperature (°C) from black-globe temperature, air temperature
 * and air speed at the globe.
 *
 * ASHRAE:  Tmrt = [(Tg+273)^4 + 2.47e8 v^0.5 (Tg - Ta)]^(1/4) - 273
 * ISO 7726 forced convection:
 *          Tmrt = [(Tg+273)^4 + 1.1e8 v^0.6 / (eps D^0.4) (Tg - Ta)]^(1/4) - 273
 *
 * `sample` labels the reading in error messages.
 */
inline double mrt_from_globe(double t_globe, double t_air, double wind, const GlobeSpec& spec = {},
                             std::string_view sample = {}) {
  spec.validate();
  if (!std::isfinite(t_globe) || !std::isfinite(t_air) || !std::isfinite(wind) || wind < 0.0) {
    throw DomainError("mrt_from_globe" + (sample.empty() ? std::string{} : " [" + std::string{sample} + "]") +
                      ": invalid input (t_globe=" + detail::num(t_globe) + ", t_air=" + detail::num(t_air) +
                      ", wind=" + detail::num(wind) + ")");
  }
  double convective = 0.0;
  switch (spec.formula) {
    case GlobeFormula::ashrae_standard_globe:
      convective = 2.47e8 * std::sqrt(wind);
      break;
    case GlobeFormula::iso7726_forced:
      convective = 1.1e8 * std::pow(wind, 0.6) / (spec.emissivity * std::pow(spec.diameter, 0.4));
      break;
  }
  const double exchange = convective * (t_globe - t_air);
  if (exchange == 0.0) return t_globe;
  const double tg_k = t_globe + 273.0;
  const double radicand = tg_k * tg_k * tg_k * tg_k + exchange;
  if (!(radicand >= 0.0)) {
    throw DomainError("mrt_from_globe" + (sample.empty() ? std::string{} : " [" + std::string{sample} + "]") +
                      ": negative radicand for t_globe=" + detail::num(t_globe) + ", t_air=" +
                      detail::num(t_air) + ", wind=" + detail::num(wind));
  }
  return std::pow(radicand, 0.25) - 273.0;
}

/// Neutral logarithmic wind profile, speed at `height` to speed at 10 m.
inline double wind_at_10m(double wind, double height, double roughness_length = 0.01) {
  if (!(wind >= 0.0) || !(height > roughness_length) || !(roughness_length > 0.0))
    throw DomainError("wind_at_10m: need wind >= 0 and height > z0 > 0");
  return wind * std::log(10.0 / roughness_length) / std::log(height / roughness_length);
}

struct UtciInput {
  double t_air = 0.0;           // °C
  double t_mrt = 0.0;           // °C
  double wind_10m = 0.5;        // m/s
  double vapor_pressure = 0.0;  // hPa
};

inline constexpr double kUtciMinTair = -50.0;
inline constexpr double kUtciMaxTair = 50.0;
inline constexpr double kUtciMinWind = 0.5;
inline constexpr double kUtciMaxWind = 17.0;
inline constexpr double kUtciMinDeltaMrt = -30.0;
inline constexpr double kUtciMaxDeltaMrt = 70.0;
inline constexpr double kUtciMaxVaporPressure = 50.0;

/// Checksum of the embedded coefficient table (FNV-1a over exponents and IEEE bits).
inline constexpr std::uint64_t utci_coefficient_checksum() { return detail::checksum(detail::kUtciTerms); }

/**
 * UTCI equivalent temperature (°C), operational polynomial approximation.
 *
 * Wind below 0.5 m/s is clamped up to 0.5. Every other driver must lie inside
 * the validity domain; violations throw RangeError naming the bound.
 */
inline double utci(const UtciInput& in) {
  const double ta = in.t_air;
  if (!std::isfinite(ta) || !std::isfinite(in.t_mrt) || !std::isfinite(in.wind_10m) ||
      !std::isfinite(in.vapor_pressure))
    throw RangeError("finite", "utci: non-finite input");
  if (ta < kUtciMinTair || ta > kUtciMaxTair)
    throw RangeError("t_air", "utci: t_air " + detail::num(ta) + " outside [-50, 50] degC");
  if (in.wind_10m > kUtciMaxWind)
    throw RangeError("wind_10m", "utci: wind_10m " + detail::num(in.wind_10m) + " above 17 m/s");
  if (in.wind_10m < 0.0) throw RangeError("wind_10m", "utci: negative wind_10m");
  const double dmrt = in.t_mrt - ta;
  if (dmrt < kUtciMinDeltaMrt || dmrt > kUtciMaxDeltaMrt)
    throw RangeError("t_mrt - t_air", "utci: t_mrt - t_air = " + detail::num(dmrt) + " outside [-30, 70] degC");
  if (in.vapor_pressure < 0.0 || in.vapor_pressure > kUtciMaxVaporPressure)
    throw RangeError("vapor_pressure",
                     "utci: vapour pressure " + detail::num(in.vapor_pressure) + " hPa outside [0, 50]");

  const double va = in.wind_10m < kUtciMinWind ? kUtciMinWind : in.wind_10m;
  const double pa = in.vapor_pressure / 10.0;  // kPa

  std::array<double, 7> p_ta{}, p_va{}, p_d{}, p_pa{};
  p_ta[0] = p_va[0] = p_d[0] = p_pa[0] = 1.0;
  for (std::size_t i = 1; i < 7; ++i) {
    p_ta[i] = p_ta[i - 1] * ta;
    p_va[i] = p_va[i - 1] * va;
    p_d[i] = p_d[i - 1] * dmrt;
    p_pa[i] = p_pa[i - 1] * pa;
  }
  double sum = 0.0;
  for (const auto& t : detail::kUtciTerms) sum += t.coefficient * p_ta[t.ta] * p_va[t.va] * p_d[t.dmrt] * p_pa[t.pa];
  return ta + sum;
}

/// Drivers of one UTCI evaluation in measurement units (rh instead of vapour pressure).
struct UtciDrivers {
  double t_air = 0.0;     // °C
  double rh = 0.0;        // %
  double t_mrt = 0.0;     // °C
  double wind_10m = 0.5;  // m/s

  UtciInput utci_input() const { return {t_air, t_mrt, wind_10m, vapor_pressure(t_air, rh)}; }
  bool operator==(const UtciDrivers&) const = default;
};

/// Shaded, sheltered reference built from control-station air temperature and humidity.
struct ReferenceConditions {
  static constexpr double kWind = 0.5;

  double t_air = 0.0;
  double rh = 0.0;
  double t_mrt_ref = 0.0;  // always equal to t_air
  double v_ref = kWind;

  static ReferenceConditions from_control(double t_air, double rh) { return {t_air, rh, t_air, kWind}; }

  UtciDrivers drivers() const { return {t_air, rh, t_mrt_ref, v_ref}; }
};

struct UtciOffset {
  double value = 0.0;        // °C, utci_mobile - utci_ref
  double utci_mobile = 0.0;
  double utci_ref = 0.0;
  std::string point_id;
  Instant timestamp{};       // mobile observation
  Instant control_time{};    // matched control sample
};

/// utci(a) - utci(b); errors are labelled with the failing side.
inline double utci_difference(const UtciDrivers& a, const UtciDrivers& b, double* utci_a = nullptr,
                              double* utci_b = nullptr) {
  double ua = 0.0, ub = 0.0;
  try {
    ua = utci(a.utci_input());
  } catch (const RangeError& e) {
    throw RangeError(e.bound(), std::string{"mobile side: "} + e.what());
  } catch (const DomainError& e) {
    throw DomainError(std::string{"mobile side: "} + e.what());
  }
  try {
    ub = utci(b.utci_input());
  } catch (const RangeError& e) {
    throw RangeError(e.bound(), std::string{"reference side: "} + e.what());
  } catch (const DomainError& e) {
    throw DomainError(std::string{"reference side: "} + e.what());
  }
  if (utci_a) *utci_a = ua;
  if (utci_b) *utci_b = ub;
  return ua - ub;
}

/// UTCI offset of a measured point against the control-derived reference.
inline UtciOffset utci_offset(const UtciDrivers& mobile, const ReferenceConditions& ref, std::string point_id = {},
                              Instant timestamp = {}, Instant control_time = {}) {
  UtciOffset out;
  out.value = utci_difference(mobile, ref.drivers(), &out.utci_mobile, &out.utci_ref);
  out.point_id = std::move(point_id);
  out.timestamp = timestamp;
  out.control_time = control_time;
  return out;
}

enum class HeatStress {
  extreme_cold,
  very_strong_cold,
  strong_cold,
  moderate_cold,
  slight_cold,
  no_thermal_stress,
  moderate_heat,
  strong_heat,
  very_strong_heat,
  extreme_heat,
};

// Lower bounds of the assessment scale; each class is [lower, next lower).
inline constexpr std::array<double, 9> kHeatStressLowerBounds{-40.0, -27.0, -13.0, 0.0, 9.0,
                                                               26.0, 32.0, 38.0, 46.0};

inline HeatStress heat_stress_category(double utci_value) {
  std::size_t k = 0;
  while (k < kHeatStressLowerBounds.size() && utci_value >= kHeatStressLowerBounds[k]) ++k;
  return static_cast<HeatStress>(k);
}

inline std::string_view to_string(HeatStress c) {
  switch (c) {
    case HeatStress::extreme_cold: return "extreme cold stress";
    case HeatStress::very_strong_cold: return "very strong cold stress";
    case HeatStress::strong_cold: return "strong cold stress";
    case HeatStress::moderate_cold: return "moderate cold stress";
    case HeatStress::slight_cold: return "slight cold stress";
    case HeatStress::no_thermal_stress: return "no thermal stress";
    case HeatStress::moderate_heat: return "moderate heat stress";
    case HeatStress::strong_heat: return "strong heat stress";
    case HeatStress::very_strong_heat: return "very strong heat stress";
    case HeatStress::extreme_heat: return "extreme heat stress";
  }
  return "unknown";
}

inline std::string_view to_string(GlobeFormula f) {
  return f == GlobeFormula::ashrae_standard_globe ? "ashrae_standard_globe" : "iso7726_forced";
}

inline std::optional<GlobeFormula> parse_globe_formula(std::string_view s) {
  if (s == "ashrae_standard_globe" || s == "ashrae") return GlobeFormula::ashrae_standard_globe;
  if (s == "iso7726_forced" || s == "iso7726") return GlobeFormula::iso7726_forced;
  return std::nullopt;
}

}  // namespace utcimap::thermal
