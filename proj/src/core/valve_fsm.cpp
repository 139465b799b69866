#include "pamexo/valve_fsm.hpp"

#include <array>
#include <cstdio>

#include "pamexo/error.hpp"

namespace pamexo {

namespace {

constexpr std::array<std::pair<ExoMode, const char*>, 6> kModeNames{{
    {ExoMode::ReleaseAll, "ReleaseAll"},
    {ExoMode::HoldAirTransparent, "HoldAirTransparent"},
    {ExoMode::PumpCharging, "PumpCharging"},
    {ExoMode::Torque, "Torque"},
    {ExoMode::QuasiPassiveDamper, "QuasiPassiveDamper"},
    {ExoMode::AirReturn, "AirReturn"},
}};

// The pump stops at the set pressure; the plant caps the charge there, so a
// relative slack of a few ulps is enough.
constexpr double kSetPressureSlack = 1e-9;

}  // namespace

const char* to_string(ExoMode mode) {
  for (const auto& [m, name] : kModeNames) {
    if (m == mode) return name;
  }
  return "?";
}

std::optional<ExoMode> parse_mode(std::string_view name) {
  for (const auto& [m, n] : kModeNames) {
    if (name == n) return m;
  }
  return std::nullopt;
}

ValveConfig config_of(ExoMode mode) {
  using enum ValvePos;
  switch (mode) {
    case ExoMode::ReleaseAll: return {One, One, One, false};
    case ExoMode::HoldAirTransparent: return {One, Two, One, false};
    case ExoMode::PumpCharging: return {One, Two, Two, true};
    case ExoMode::Torque: return {Two, One, One, false};
    case ExoMode::QuasiPassiveDamper: return {Two, Two, One, false};
    case ExoMode::AirReturn: return {Two, One, One, false};
  }
  return {};
}

std::vector<ValveAction> valve_sequence(ExoMode from, ExoMode to) {
  ValveConfig a = config_of(from);
  ValveConfig b = config_of(to);
  std::vector<ValveAction> seq;
  // Seal first: valve 2 closing isolates the PAM, valve 1 closing stops the
  // cylinder vent. Only then open paths.
  if (a.v2 != b.v2 && b.v2 == ValvePos::Two) seq.push_back({Valve::V2, ValvePos::Two});
  if (a.v1 != b.v1 && b.v1 == ValvePos::Two) seq.push_back({Valve::V1, ValvePos::Two});
  if (a.v1 != b.v1 && b.v1 == ValvePos::One) seq.push_back({Valve::V1, ValvePos::One});
  if (a.v2 != b.v2 && b.v2 == ValvePos::One) seq.push_back({Valve::V2, ValvePos::One});
  // Valve P vents the pump line once charging ends.
  if (a.p_valve != b.p_valve) seq.push_back({Valve::P, b.p_valve});
  return seq;
}

Thresholds Thresholds::for_seat(double seat_deg) {
  Thresholds th;
  th.theta_sitting_deg = seat_deg - 5.0;
  return th;
}

void Thresholds::validate() const {
  if (!(p_set_bar > 0 && p_band_bar > 0 && theta_standing_deg > 0 && theta_sitting_deg > 0 &&
        omega_trigger_deg_s > 0 && dwell_s > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "controller thresholds must all be positive");
  }
  if (!(theta_standing_deg < theta_sitting_deg)) {
    throw Error(ErrorCode::kInvalidArgument, "standing threshold must be below sitting threshold");
  }
  if (!(p_band_bar < p_set_bar)) {
    throw Error(ErrorCode::kInvalidArgument, "pressure band must be smaller than the set pressure");
  }
}

std::string to_csv_line(const Event& e) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8e", e.t_s);
  return std::string(buf) + "," + to_string(e.from) + "," + to_string(e.to) + "," + e.trigger;
}

ValveController::ValveController(Thresholds thresholds, int repetitions)
    : th_(thresholds), target_(repetitions) {
  th_.validate();
  if (repetitions < 0) throw Error(ErrorCode::kInvalidArgument, "repetitions must be >= 0");
}

bool ValveController::dwell_elapsed(bool condition, double t) {
  if (!condition) {
    condition_since_.reset();
    return false;
  }
  if (!condition_since_) condition_since_ = t;
  // Small slack so a dwell of exactly N samples is not lost to rounding of t.
  return t - *condition_since_ >= th_.dwell_s - 1e-9;
}

Event ValveController::transition(double t, ExoMode to, std::string trigger) {
  Event e;
  e.t_s = t;
  e.from = mode_;
  e.to = to;
  e.trigger = std::move(trigger);
  e.actions = valve_sequence(mode_, to);
  switch (to) {
    case ExoMode::ReleaseAll: phase_ = 1; break;
    case ExoMode::PumpCharging: phase_ = 2; break;
    case ExoMode::HoldAirTransparent: phase_ = mode_ == ExoMode::AirReturn ? 7 : 3; break;
    case ExoMode::Torque: phase_ = 4; break;
    case ExoMode::QuasiPassiveDamper: phase_ = 5; break;
    case ExoMode::AirReturn: phase_ = 6; break;
  }
  e.phase = phase_;
  mode_ = to;
  condition_since_.reset();
  return e;
}

ValveController::StepResult ValveController::step(const SensorSnapshot& s) {
  if (last_t_ && s.t_s < *last_t_) {
    throw Error(ErrorCode::kInvalidArgument, "sensor snapshots must have nondecreasing time");
  }
  last_t_ = s.t_s;

  std::vector<Event> events;
  switch (mode_) {
    case ExoMode::ReleaseAll:
      if (dwell_elapsed(completed_ < target_, s.t_s)) {
        events.push_back(transition(s.t_s, ExoMode::PumpCharging, "start"));
      }
      break;
    case ExoMode::PumpCharging:
      if (s.p_pam_bar >= th_.p_set_bar * (1.0 - kSetPressureSlack)) {
        events.push_back(transition(s.t_s, ExoMode::HoldAirTransparent, "pressure_reached"));
      }
      break;
    case ExoMode::HoldAirTransparent:
      if (completed_ >= target_) {
        events.push_back(transition(s.t_s, ExoMode::ReleaseAll, "cycles_done"));
      } else if (s.p_pam_bar < th_.p_set_bar - th_.p_band_bar) {
        events.push_back(transition(s.t_s, ExoMode::PumpCharging, "pressure_low"));
      } else if (s.omega_deg_s < -th_.omega_trigger_deg_s) {
        events.push_back(transition(s.t_s, ExoMode::Torque, "stand_up_detected"));
      }
      break;
    case ExoMode::Torque:
      if (dwell_elapsed(s.theta_deg <= th_.theta_standing_deg, s.t_s)) {
        events.push_back(transition(s.t_s, ExoMode::QuasiPassiveDamper, "standing_dwell"));
      }
      break;
    case ExoMode::QuasiPassiveDamper:
      if (dwell_elapsed(s.theta_deg >= th_.theta_sitting_deg, s.t_s)) {
        ++completed_;
        events.push_back(transition(s.t_s, ExoMode::AirReturn, "sitting_dwell"));
      }
      break;
    case ExoMode::AirReturn:
      events.push_back(transition(s.t_s, ExoMode::HoldAirTransparent, "return_complete"));
      break;
  }
  return {mode_, config_of(mode_), std::move(events)};
}

}  // namespace pamexo
