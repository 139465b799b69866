#pragma once

#include <array>
#include <functional>
#include <string>

#include "pamexo/units.hpp"

namespace pamexo {

// ---------------------------------------------------------------------------
// Air pump: exponential charge law p(t) = p_max (1 - exp(-t / k)), gauge bar.
// ---------------------------------------------------------------------------

struct PumpModel {
  double p_max_bar = 3.32;
  double k_s = 1.8302;
  std::string label = "small";

  /// BD-04A-20L, 20 L/min.
  static PumpModel small();
  /// BD-07A-35L piston pump, 35 L/min.
  static PumpModel large();

  void validate() const;
};

double pump_pressure_at(const PumpModel& pump, double t_s);

/// Charging time between two gauge pressures. Throws kUnreachablePressure
/// when the target is at or above the pump asymptote.
double pump_time_to(const PumpModel& pump, double from_bar, double to_bar);

// ---------------------------------------------------------------------------
// Pneumatic artificial muscle used as a compliant reservoir.
// ---------------------------------------------------------------------------

struct PamModel {
  double rest_length_m = 0.100;
  double rest_diameter_m = 0.020;
  /// Quartic contraction coefficients c1..c5 (c1 multiplies p^4), mm/bar^i.
  std::array<double, 5> contraction_coeffs{0.1022, -1.3370, 5.1426, -0.8131, 0.4189};
  double max_contraction_mm = 25.0;
  /// Upper bound of the pressure range the quartic was identified on.
  double identified_max_bar = 3.32;
  double thread_length_m = 0.0;
  double thread_turns = 0.0;
  double tube_area_m2 = 0.0;
  double tube_length_m = 0.0;

  /// Braid calibration: thread length and turn count follow from the rest
  /// geometry and the initial braid angle, which makes the braid volume
  /// equal the rest cylinder volume exactly.
  void calibrate_braid(double braid_angle_deg);

  static PamModel defaults();
  void validate() const;

  double tube_volume() const { return tube_area_m2 * tube_length_m; }
};

struct Contraction {
  double mm = 0.0;
  bool extrapolated = false;
};

Contraction pam_contraction(const PamModel& pam, double p_gauge_bar);
double pam_length(const PamModel& pam, double p_gauge_bar);
/// Braid volume at length L_m plus the tube dead volume.
double pam_volume(const PamModel& pam, double length_m);
double pam_volume_at(const PamModel& pam, Pressure p);

// ---------------------------------------------------------------------------
// Cylinder and knee linkage.
// ---------------------------------------------------------------------------

struct CylinderModel {
  double piston_area_m2 = 0.0;
  double stroke_m = 0.100;
  double tube_area_m2 = 0.0;
  double tube_length_m = 0.0;

  static CylinderModel from_bore(double bore_m, double stroke_m);
  static CylinderModel defaults();
  void validate() const;

  double tube_volume() const { return tube_area_m2 * tube_length_m; }
};

double cylinder_volume(const CylinderModel& cyl, double z_m);

/// Two-pin crank: the cylinder spans a thigh pin at distance `a` and a shank
/// pin at distance `b` from the knee axis. The included angle at the joint is
/// gamma0 - theta, so flexion shortens the cylinder.
class LinkageModel {
 public:
  LinkageModel() = default;
  LinkageModel(double a_m, double b_m, double gamma0_deg, double theta_hi_deg = 107.0);

  double a() const { return a_; }
  double b() const { return b_; }
  double gamma0_deg() const { return gamma0_deg_; }
  double theta_hi_deg() const { return theta_hi_deg_; }
  double l_min() const { return l_min_; }
  double l_max() const { return l_max_; }

  double length(double theta_deg) const;
  double lever_arm(double theta_deg) const;

 private:
  double a_ = 0.0;
  double b_ = 0.0;
  double gamma0_deg_ = 0.0;
  double theta_hi_deg_ = 107.0;
  double l_min_ = 0.0;
  double l_max_ = 0.0;
};

inline constexpr double kMaxKneeAngleDeg = 135.0;

double cylinder_length(const LinkageModel& link, double theta_deg);
double piston_position(const LinkageModel& link, const CylinderModel& cyl, double theta_deg);


// ---------------------------------------------------------------------------
// Gas network.
// ---------------------------------------------------------------------------

struct GasState {
  Pressure p;
  double volume_m3 = 0.0;
};

/// Boyle product in the convention's pressure scale, bar * m^3.
double boyle_product(const GasState& s, PressureConvention conv);

GasState isothermal_expand(const GasState& s, double new_volume_m3,
                           PressureConvention conv = PressureConvention::Absolute);

using VolumeOfPressure = std::function<double(Pressure)>;

struct SolveResult {
  Pressure p;
  int iterations = 0;
};

/// Finds p with boyle(p) * V(p) = target by bisection. V must be positive and
/// make the product increasing over the bracket.
SolveResult solve_boyle(double target_product, const VolumeOfPressure& volume,
                        PressureConvention conv);

/// Connects two sealed volumes and returns the equalised pressure of the
/// joined volume `joint_volume(p)`.
Pressure merge_isothermal(const GasState& a, const GasState& b,
                          const VolumeOfPressure& joint_volume,
                          PressureConvention conv = PressureConvention::Absolute);

struct ActuatorModel {
  PumpModel pump;
  PamModel pam;
  CylinderModel cylinder;
  LinkageModel linkage;

  static ActuatorModel defaults();
};

/// Volume of PAM plus cylinder when connected, at knee angle theta.
double connected_volume(const ActuatorModel& m, double theta_deg, Pressure p);

/// Pressure of the connected PAM-cylinder volume at `theta_deg`, expanding
/// isothermally from `init` (pressure and total volume at Torque entry).
Pressure coupled_pressure_at_angle(double theta_deg, const GasState& init,
                                   const ActuatorModel& m,
                                   PressureConvention conv = PressureConvention::Absolute);

/// Net piston force. The rod side is at atmosphere, so force follows gauge
/// pressure in either convention.
double cylinder_force(Pressure p, const CylinderModel& cyl);
double exo_torque(double force_n, const LinkageModel& link, double theta_deg);

/// Targets for fitting the unknown linkage dimensions. The pin distance
/// `a` is solved so the peak torque over [0, theta_hi] at `peak_pressure_bar`
/// equals `peak_torque_nm`. gamma0 is the smallest value for which the torque
/// of a Torque-mode extension starting at theta_hi under `ref_pressure_bar`
/// does not rise: the torque slope at theta_hi is zero.
struct LinkageCalibration {
  double b_m = 0.32;
  double theta_hi_deg = 107.0;
  double peak_torque_nm = 20.0;
  double peak_pressure_bar = 8.0;
  double ref_pressure_bar = 3.2;
};

LinkageModel calibrate_linkage(const LinkageCalibration& target, const PamModel& pam, const CylinderModel& cyl,
                               PressureConvention conv = PressureConvention::Absolute);

}  // namespace pamexo
