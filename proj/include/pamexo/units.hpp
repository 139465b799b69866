#pragma once

#include <numbers>

namespace pamexo {

inline constexpr double kPascalPerBar = 1.0e5;
inline constexpr double kAtmosphereBar = 1.01325;

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

constexpr double circle_area(double diameter) {
  return std::numbers::pi * diameter * diameter / 4.0;
}

/// Pressure stored on the absolute scale. Construct through the named
/// factories so the gauge/absolute intent is explicit at every call site.
class Pressure {
 public:
  constexpr Pressure() = default;

  static constexpr Pressure gauge_bar(double bar) { return Pressure(bar + kAtmosphereBar); }
  static constexpr Pressure absolute_bar(double bar) { return Pressure(bar); }
  static constexpr Pressure atmospheric() { return Pressure(kAtmosphereBar); }

  constexpr double gauge_bar() const { return abs_bar_ - kAtmosphereBar; }
  constexpr double absolute_bar() const { return abs_bar_; }
  constexpr double gauge_pa() const { return gauge_bar() * kPascalPerBar; }

  constexpr auto operator<=>(const Pressure&) const = default;

 private:
  explicit constexpr Pressure(double abs_bar) : abs_bar_(abs_bar) {}
  double abs_bar_ = kAtmosphereBar;
};

/// Scale in which Boyle-law products are formed. Absolute is the physical
/// reading; GaugeNaive applies pV = const directly to gauge values.
enum class PressureConvention { Absolute, GaugeNaive };

constexpr double boyle_scale(Pressure p, PressureConvention conv) {
  return conv == PressureConvention::Absolute ? p.absolute_bar() : p.gauge_bar();
}

constexpr Pressure from_boyle_scale(double value, PressureConvention conv) {
  return conv == PressureConvention::Absolute ? Pressure::absolute_bar(value)
                                              : Pressure::gauge_bar(value);
}

}  // namespace pamexo
