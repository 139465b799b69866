#include "pamexo/cycle_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pamexo/error.hpp"

namespace pamexo {

void validate_trajectory(const Trajectory& traj, double max_theta_deg) {
  if (traj.size() < 2) throw Error(ErrorCode::kInvalidArgument, "trajectory needs at least two points");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& p = traj[i];
    if (!std::isfinite(p.t_s) || !std::isfinite(p.theta_deg)) {
      throw Error(ErrorCode::kInvalidArgument, "trajectory point " + std::to_string(i) + " is not finite");
    }
    if (p.theta_deg < 0.0 || p.theta_deg > max_theta_deg) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "trajectory angle %.6g deg at point %zu outside [0, %.6g]", p.theta_deg, i,
                    max_theta_deg);
      throw Error(ErrorCode::kInvalidArgument, buf);
    }
    if (i > 0 && !(p.t_s > traj[i - 1].t_s)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "trajectory time must be strictly increasing (point " + std::to_string(i) + ")");
    }
  }
}

Trajectory min_jerk_trajectory(const SyntheticMotion& mo) {
  if (!(mo.dt_s > 0.0) || !(mo.transfer_s > 0.0) || mo.repetitions < 0) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic motion needs dt > 0, transfer > 0, repetitions >= 0");
  }
  Trajectory traj;
  std::size_t index = 0;
  traj.push_back({0.0, mo.seat_deg});
  auto samples = [&](double duration) {
    return static_cast<std::size_t>(std::max(0.0, std::round(duration / mo.dt_s)));
  };
  auto hold = [&](double duration) {
    double theta = traj.back().theta_deg;
    for (std::size_t n = samples(duration), j = 0; j < n; ++j) {
      ++index;
      traj.push_back({static_cast<double>(index) * mo.dt_s, theta});
    }
  };
  auto move = [&](double from, double to) {
    std::size_t n = std::max<std::size_t>(1, samples(mo.transfer_s));
    for (std::size_t j = 1; j <= n; ++j) {
      double tau = static_cast<double>(j) / static_cast<double>(n);
      double s = tau * tau * tau * (10.0 - 15.0 * tau + 6.0 * tau * tau);
      ++index;
      traj.push_back({static_cast<double>(index) * mo.dt_s, from + (to - from) * s});
    }
  };
  hold(mo.initial_hold_s);
  for (int r = 0; r < mo.repetitions; ++r) {
    move(mo.seat_deg, mo.stand_deg);
    hold(mo.stand_hold_s);
    move(mo.stand_deg, mo.seat_deg);
    hold(mo.seated_hold_s);
  }
  hold(mo.final_hold_s);
  return traj;
}

std::string to_csv_line(const SimSample& s) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.8e,%.8e,%s,%.8e,%.8e,%.8e,%.8e,%.8e,%.8e,%.8e,%.8e", s.t_s, s.theta_deg,
                to_string(s.mode), s.p_pam_bar, s.p_cyl_bar, s.v_pam_m3, s.v_cyl_m3, s.pam_length_m, s.piston_z_m,
                s.force_n, s.torque_nm);
  return buf;
}

namespace {

SimSample make_sample(const ActuatorModel& m, double t, double theta, ExoMode mode, Pressure p_pam,
                      Pressure p_cyl) {
  SimSample s;
  s.t_s = t;
  s.theta_deg = theta;
  s.mode = mode;
  s.p_pam_bar = p_pam.gauge_bar();
  s.p_cyl_bar = p_cyl.gauge_bar();
  s.pam_length_m = pam_length(m.pam, s.p_pam_bar);
  s.v_pam_m3 = pam_volume(m.pam, s.pam_length_m);
  s.piston_z_m = piston_position(m.linkage, m.cylinder, theta);
  s.v_cyl_m3 = cylinder_volume(m.cylinder, s.piston_z_m);
  s.force_n = cylinder_force(p_cyl, m.cylinder);
  s.torque_nm = exo_torque(s.force_n, m.linkage, theta);
  return s;
}

double cylinder_volume_at(const ActuatorModel& m, double theta) {
  return cylinder_volume(m.cylinder, piston_position(m.linkage, m.cylinder, theta));
}

}  // namespace

std::vector<SimSample> theoretical_profiles(const ActuatorModel& m, double p_init_bar, double theta_from_deg,
                                            double theta_to_deg, int steps, PressureConvention conv) {
  if (steps < 2) throw Error(ErrorCode::kInvalidArgument, "profiles need at least 2 steps");
  if (!(theta_from_deg > theta_to_deg)) {
    throw Error(ErrorCode::kInvalidArgument, "profiles sweep from a flexed to a more extended angle (from > to)");
  }
  Pressure p0 = Pressure::gauge_bar(p_init_bar);
  GasState init{p0, connected_volume(m, theta_from_deg, p0)};
  std::vector<SimSample> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    double theta = theta_from_deg + (theta_to_deg - theta_from_deg) * i / (steps - 1);
    Pressure p = i == 0 ? p0 : coupled_pressure_at_angle(theta, init, m, conv);
    out.push_back(make_sample(m, 0.0, theta, ExoMode::Torque, p, p));
    out.back().t_s = static_cast<double>(i);
  }
  return out;
}

QuasiPassiveResult quasi_passive_compress(const ActuatorModel& m, Pressure p_trapped, double theta_entry_deg,
                                          double theta_deg, PressureConvention conv) {
  double v_entry = cylinder_volume_at(m, theta_entry_deg);
  double v_now = cylinder_volume_at(m, theta_deg);
  if (!(v_now > 0.0) || !(v_entry > 0.0)) {
    throw Error(ErrorCode::kDomain, "cylinder volume at or below zero dead volume; trapped air cannot be compressed");
  }
  GasState s = isothermal_expand({p_trapped, v_entry}, v_now, conv);
  return {s.p, exo_torque(cylinder_force(s.p, m.cylinder), m.linkage, theta_deg)};
}

EnergyReport energy_report(const PumpModel& pump, double p_set, double p_standing, double p_recovered, int legs) {
  if (legs != 1 && legs != 2) throw Error(ErrorCode::kInvalidArgument, "legs must be 1 or 2");
  if (!(p_set < pump.p_max_bar)) {
    throw Error(ErrorCode::kUnreachablePressure, "set pressure is not below the " + pump.label +
                                                     " pump maximum");
  }
  if (!(p_standing >= 0.0 && p_standing < p_recovered && p_recovered < p_set)) {
    throw Error(ErrorCode::kInvalidArgument,
                "energy report needs 0 <= p_standing < p_recovered < p_set");
  }
  EnergyReport r;
  r.pump_label = pump.label;
  r.legs = legs;
  r.p_set_bar = p_set;
  r.p_standing_bar = p_standing;
  r.p_recovered_bar = p_recovered;
  r.refill_with_er_leg_s = pump_time_to(pump, p_recovered, p_set);
  r.refill_without_er_leg_s = pump_time_to(pump, p_standing, p_set);
  // One pump serves both legs, so charging serialises.
  r.refill_with_er_all_s = legs * r.refill_with_er_leg_s;
  r.refill_without_er_all_s = legs * r.refill_without_er_leg_s;
  r.max_freq_with_er_per_min = 60.0 / r.refill_with_er_all_s;
  r.max_freq_without_er_per_min = 60.0 / r.refill_without_er_all_s;
  r.endurance_factor = r.refill_without_er_leg_s / r.refill_with_er_leg_s;
  return r;
}

std::string to_key_value(const EnergyReport& r) {
  std::string out;
  char buf[128];
  auto put = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s=%.8e\n", key, v);
    out += buf;
  };
  out += "pump=" + r.pump_label + "\n";
  out += "legs=" + std::to_string(r.legs) + "\n";
  put("p_set_bar", r.p_set_bar);
  put("p_standing_bar", r.p_standing_bar);
  put("p_recovered_bar", r.p_recovered_bar);
  put("refill_with_er_leg_s", r.refill_with_er_leg_s);
  put("refill_without_er_leg_s", r.refill_without_er_leg_s);
  put("refill_with_er_all_legs_s", r.refill_with_er_all_s);
  put("refill_without_er_all_legs_s", r.refill_without_er_all_s);
  put("max_freq_with_er_per_min", r.max_freq_with_er_per_min);
  put("max_freq_without_er_per_min", r.max_freq_without_er_per_min);
  put("endurance_factor", r.endurance_factor);
  put("pump_on_total_s", r.pump_on_total_s);
  if (r.battery_autonomy_h) put("battery_autonomy_h", *r.battery_autonomy_h);
  return out;
}

namespace {

int next_phase(int phase, bool done) {
  switch (phase) {
    case 1: return 2;
    case 7: return done ? 1 : 2;
    default: return phase + 1;
  }
}

const char* phase_mode_name(int phase) {
  switch (phase) {
    case 1: return "ReleaseAll";
    case 2: return "PumpCharging";
    case 3:
    case 7: return "HoldAirTransparent";
    case 4: return "Torque";
    case 5: return "QuasiPassiveDamper";
    case 6: return "AirReturn";
  }
  return "?";
}

// Gas-network state of one leg.
struct Plant {
  Pressure p_pam = Pressure::atmospheric();
  Pressure p_cyl = Pressure::atmospheric();
  GasState joined;         // PAM+cylinder while connected
  GasState trapped;        // cylinder air in damper mode
  double trapped_theta = 0.0;
};

}  // namespace

ScenarioResult run_scenario(const ActuatorModel& m, const ScenarioOptions& opt, const Trajectory& traj) {
  m.pump.validate();
  m.pam.validate();
  m.cylinder.validate();
  validate_trajectory(traj, m.linkage.theta_hi_deg());
  if (opt.legs != 1 && opt.legs != 2) throw Error(ErrorCode::kInvalidArgument, "legs must be 1 or 2");
  const Thresholds& th = opt.thresholds;
  if (!(th.p_set_bar < m.pump.p_max_bar)) {
    throw Error(ErrorCode::kUnreachablePressure, "set pressure is not below the " + m.pump.label +
                                                     " pump maximum");
  }
  const PressureConvention conv = opt.convention;
  ValveController fsm(th, opt.repetitions);
  Plant plant;
  ScenarioResult res;
  res.samples.reserve(traj.size());
  double pump_on_total = 0.0;

  auto joined_volume = [&](double theta) {
    double vc = cylinder_volume_at(m, theta);
    return [&m, vc](Pressure p) { return vc + pam_volume_at(m.pam, p); };
  };

  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj[i].t_s;
    const double theta = traj[i].theta_deg;

    // Advance the plant over (t_{i-1}, t_i] in the mode held during it.
    if (i > 0) {
      const double dt = t - traj[i - 1].t_s;
      switch (fsm.mode()) {
        case ExoMode::ReleaseAll:
          plant.p_pam = plant.p_cyl = Pressure::atmospheric();
          break;
        case ExoMode::PumpCharging: {
          double p = std::max(0.0, plant.p_pam.gauge_bar());
          if (p < th.p_set_bar) {
            double need = pump_time_to(m.pump, p, th.p_set_bar);
            double budget = dt / opt.legs;
            double run = std::min(budget, need);
            double p_new = run >= need ? th.p_set_bar
                                       : m.pump.p_max_bar - (m.pump.p_max_bar - p) * std::exp(-run / m.pump.k_s);
            plant.p_pam = Pressure::gauge_bar(p_new);
            double wall = run * opt.legs;
            pump_on_total += wall;
            if (!res.cycles.empty()) res.cycles.back().pump_on_s += wall;
          }
          plant.p_cyl = Pressure::atmospheric();
          break;
        }
        case ExoMode::HoldAirTransparent:
          plant.p_cyl = Pressure::atmospheric();
          break;
        case ExoMode::Torque:
        case ExoMode::AirReturn: {
          Pressure p = coupled_pressure_at_angle(theta, plant.joined, m, conv);
          plant.p_pam = plant.p_cyl = p;
          break;
        }
        case ExoMode::QuasiPassiveDamper:
          plant.p_cyl = quasi_passive_compress(m, plant.trapped.p, plant.trapped_theta, theta, conv).p_cyl;
          break;
      }
    }

    SensorSnapshot snap;
    snap.t_s = t;
    snap.theta_deg = theta;
    snap.p_pam_bar = plant.p_pam.gauge_bar();
    snap.omega_deg_s = i == 0 ? 0.0 : (theta - traj[i - 1].theta_deg) / (t - traj[i - 1].t_s);

    auto step = fsm.step(snap);

    // Instantaneous valve switching at t_i.
    for (const Event& e : step.events) {
      switch (e.to) {
        case ExoMode::ReleaseAll:
          plant.p_pam = plant.p_cyl = Pressure::atmospheric();
          break;
        case ExoMode::PumpCharging:
          res.cycles.push_back(CycleStats{static_cast<int>(res.cycles.size()) + 1});
          plant.p_cyl = Pressure::atmospheric();
          break;
        case ExoMode::HoldAirTransparent:
          plant.p_cyl = Pressure::atmospheric();
          break;
        case ExoMode::Torque: {
          auto vol = joined_volume(theta);
          if (opt.merge_on_torque_entry) {
            GasState pam{plant.p_pam, pam_volume_at(m.pam, plant.p_pam)};
            GasState cyl{plant.p_cyl, cylinder_volume_at(m, theta)};
            Pressure p = merge_isothermal(pam, cyl, vol, conv);
            plant.joined = {p, vol(p)};
          } else {
            plant.joined = {plant.p_pam, vol(plant.p_pam)};
          }
          plant.p_pam = plant.p_cyl = plant.joined.p;
          if (!res.cycles.empty()) {
            auto& c = res.cycles.back();
            c.p_entry_bar = plant.joined.p.gauge_bar();
            c.torque_entry_nm = exo_torque(cylinder_force(plant.joined.p, m.cylinder), m.linkage, theta);
          }
          break;
        }
        case ExoMode::QuasiPassiveDamper:
          plant.trapped = {plant.p_cyl, cylinder_volume_at(m, theta)};
          plant.trapped_theta = theta;
          if (!res.cycles.empty()) res.cycles.back().p_standing_bar = plant.p_pam.gauge_bar();
          break;
        case ExoMode::AirReturn: {
          auto vol = joined_volume(theta);
          GasState pam{plant.p_pam, pam_volume_at(m.pam, plant.p_pam)};
          GasState cyl{plant.p_cyl, cylinder_volume_at(m, theta)};
          Pressure p = merge_isothermal(pam, cyl, vol, conv);
          plant.joined = {p, vol(p)};
          plant.p_pam = plant.p_cyl = p;
          if (!res.cycles.empty()) res.cycles.back().p_recovered_bar = p.gauge_bar();
          break;
        }
      }
      res.events.push_back(e);
    }

    res.samples.push_back(make_sample(m, t, theta, fsm.mode(), plant.p_pam, plant.p_cyl));
    if (fsm.mode() == ExoMode::QuasiPassiveDamper && !res.cycles.empty()) {
      auto& c = res.cycles.back();
      c.peak_damper_torque_nm = std::max(c.peak_damper_torque_nm, res.samples.back().torque_nm);
    }
  }

  bool done = fsm.completed_repetitions() >= opt.repetitions;
  if (!done || fsm.mode() != ExoMode::ReleaseAll) {
    int missing = next_phase(fsm.phase(), done);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "trajectory ended in phase %d (%s) after %d of %d repetitions; missing phase %d (%s)",
                  fsm.phase(), to_string(fsm.mode()), fsm.completed_repetitions(), opt.repetitions, missing,
                  phase_mode_name(missing));
    throw Error(ErrorCode::kScenario, buf);
  }

  if (!res.cycles.empty()) {
    const CycleStats& last = res.cycles.back();
    res.report = energy_report(m.pump, th.p_set_bar, last.p_standing_bar, last.p_recovered_bar, opt.legs);
  } else {
    res.report.pump_label = m.pump.label;
    res.report.legs = opt.legs;
    res.report.p_set_bar = th.p_set_bar;
  }
  res.report.pump_on_total_s = pump_on_total;
  double duration = traj.back().t_s - traj.front().t_s;
  if (pump_on_total > 0.0 && duration > 0.0) {
    res.report.battery_autonomy_h = opt.pump_autonomy_h * duration / pump_on_total;
  }
  return res;
}

SyntheticMotion synthetic_motion_for(const ActuatorModel& m, const ScenarioOptions& opt, double seat_deg,
                                     double dt_s) {
  SyntheticMotion mo;
  mo.seat_deg = seat_deg;
  mo.dt_s = dt_s;
  mo.repetitions = opt.repetitions;
  double worst_charge = opt.legs * pump_time_to(m.pump, 0.0, opt.thresholds.p_set_bar);
  double margin = 1.0 + 2.0 * opt.thresholds.dwell_s;
  // Round up to whole seconds so the cycle period is a whole number of samples.
  mo.initial_hold_s = std::ceil(worst_charge + margin);
  mo.seated_hold_s = std::max(mo.seated_hold_s, std::ceil(worst_charge + margin));
  mo.final_hold_s = std::ceil(margin);
  return mo;
}

}  // namespace pamexo
