#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pamexo/core_model.hpp"
#include "pamexo/valve_fsm.hpp"

namespace pamexo {

struct TrajectoryPoint {
  double t_s = 0.0;
  double theta_deg = 0.0;
};

using Trajectory = std::vector<TrajectoryPoint>;

/// Throws kInvalidArgument unless t is strictly increasing and every angle is
/// inside [0, max_theta_deg].
void validate_trajectory(const Trajectory& traj, double max_theta_deg = kMaxKneeAngleDeg);

/// Repeated sit-stand motion with minimum-jerk transfers.
struct SyntheticMotion {
  double seat_deg = 65.0;
  double stand_deg = 0.0;
  double transfer_s = 2.0;
  double stand_hold_s = 2.0;
  double seated_hold_s = 2.0;
  double initial_hold_s = 2.0;
  double final_hold_s = 2.0;
  double dt_s = 0.01;
  int repetitions = 10;
};

Trajectory min_jerk_trajectory(const SyntheticMotion& motion);

struct SimSample {
  double t_s = 0.0;
  double theta_deg = 0.0;
  ExoMode mode = ExoMode::ReleaseAll;
  double p_pam_bar = 0.0;  // gauge
  double p_cyl_bar = 0.0;  // gauge
  double v_pam_m3 = 0.0;
  double v_cyl_m3 = 0.0;
  double pam_length_m = 0.0;
  double piston_z_m = 0.0;
  double force_n = 0.0;
  double torque_nm = 0.0;
};

inline constexpr const char* kSampleCsvHeader = "t,theta_deg,mode,p_pam_bar,p_cyl_bar,V_m_m3,V_c_m3,L_m_m,z_m,F_N,T_Nm";
std::string to_csv_line(const SimSample& s);

/// Torque-mode sweep from `theta_from` to `theta_to` starting with the PAM
/// and cylinder joined at `p_init_bar` (gauge) at theta_from.
std::vector<SimSample> theoretical_profiles(const ActuatorModel& m, double p_init_bar,
                                            double theta_from_deg, double theta_to_deg, int steps,
                                            PressureConvention conv = PressureConvention::Absolute);

struct QuasiPassiveResult {
  Pressure p_cyl;
  double torque_nm = 0.0;
};

/// Cylinder-only compression of air trapped at `theta_entry_deg`.
QuasiPassiveResult quasi_passive_compress(const ActuatorModel& m, Pressure p_trapped,
                                          double theta_entry_deg, double theta_deg,
                                          PressureConvention conv = PressureConvention::Absolute);

struct EnergyReport {
  std::string pump_label;
  int legs = 2;
  double p_set_bar = 0.0;
  double p_standing_bar = 0.0;
  double p_recovered_bar = 0.0;
  double refill_with_er_leg_s = 0.0;
  double refill_without_er_leg_s = 0.0;
  double refill_with_er_all_s = 0.0;
  double refill_without_er_all_s = 0.0;
  double max_freq_with_er_per_min = 0.0;
  double max_freq_without_er_per_min = 0.0;
  double endurance_factor = 0.0;
  double pump_on_total_s = 0.0;
  std::optional<double> battery_autonomy_h;
};

EnergyReport energy_report(const PumpModel& pump, double p_set_bar, double p_standing_bar,
                           double p_recovered_bar, int legs);

/// Flat `key=value` lines.
std::string to_key_value(const EnergyReport& r);

struct ScenarioOptions {
  Thresholds thresholds;
  int repetitions = 10;
  int legs = 1;
  PressureConvention convention = PressureConvention::Absolute;
  /// Join PAM and the vented cylinder volume on Torque entry. When false the
  /// joined volume starts at the PAM pressure.
  bool merge_on_torque_entry = true;
  /// Continuous-run autonomy of the pump battery.
  double pump_autonomy_h = 3.4;
};

struct CycleStats {
  int index = 0;
  double pump_on_s = 0.0;
  double p_entry_bar = 0.0;
  double torque_entry_nm = 0.0;
  double p_standing_bar = 0.0;
  double peak_damper_torque_nm = 0.0;
  double p_recovered_bar = 0.0;
};

struct ScenarioResult {
  std::vector<SimSample> samples;
  std::vector<Event> events;
  std::vector<CycleStats> cycles;
  EnergyReport report;
};

/// Drives the valve controller and the quasi-static gas network along a
/// knee-angle trajectory.
ScenarioResult run_scenario(const ActuatorModel& m, const ScenarioOptions& opt, const Trajectory& traj);

/// Synthetic motion whose holds are long enough for the pump to finish
/// charging in every repetition (worst case: charging from atmosphere).
SyntheticMotion synthetic_motion_for(const ActuatorModel& m, const ScenarioOptions& opt,
                                     double seat_deg, double dt_s = 0.01);

}  // namespace pamexo
