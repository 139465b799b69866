#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pamexo {

enum class ExoMode {
  ReleaseAll,
  HoldAirTransparent,
  PumpCharging,
  Torque,
  QuasiPassiveDamper,
  AirReturn,
};

const char* to_string(ExoMode mode);
std::optional<ExoMode> parse_mode(std::string_view name);

enum class ValvePos { One, Two };

struct ValveConfig {
  ValvePos v1 = ValvePos::One;
  ValvePos v2 = ValvePos::One;
  ValvePos p_valve = ValvePos::One;
  bool pump_on = false;

  bool operator==(const ValveConfig&) const = default;
};

/// Static mode -> valve map of the pneumatic circuit.
ValveConfig config_of(ExoMode mode);

enum class Valve { V1, V2, P };

struct ValveAction {
  Valve valve;
  ValvePos to;

  bool operator==(const ValveAction&) const = default;
};

/// Valve switching order for a mode change. Sealing moves come first so no
/// path to atmosphere is ever open while PAM and cylinder are joined.
std::vector<ValveAction> valve_sequence(ExoMode from, ExoMode to);

struct SensorSnapshot {
  double t_s = 0.0;
  double p_pam_bar = 0.0;  // gauge
  double theta_deg = 0.0;
  double omega_deg_s = 0.0;
};

struct Thresholds {
  double p_set_bar = 3.2;
  double p_band_bar = 0.05;
  double theta_standing_deg = 5.0;
  double theta_sitting_deg = 60.0;
  double omega_trigger_deg_s = 10.0;
  double dwell_s = 0.2;

  /// Defaults with the sitting trigger placed 5 deg short of the seat angle.
  static Thresholds for_seat(double seat_deg);
  void validate() const;
};

struct Event {
  double t_s = 0.0;
  ExoMode from = ExoMode::ReleaseAll;
  ExoMode to = ExoMode::ReleaseAll;
  std::string trigger;
  /// Protocol phase (1..7) entered by this transition.
  int phase = 1;
  std::vector<ValveAction> actions;
};

/// CSV line `t,mode_from,mode_to,trigger` without trailing newline.
std::string to_csv_line(const Event& e);
inline constexpr const char* kEventCsvHeader = "t,mode_from,mode_to,trigger";

/// Threshold-driven operating-mode controller for one leg. Runs the
/// sit-to-stand protocol for a fixed number of repetitions and then releases
/// all air. Single-owner; feed snapshots with nondecreasing time.
class ValveController {
 public:
  explicit ValveController(Thresholds thresholds, int repetitions = 10);

  struct StepResult {
    ExoMode mode;
    ValveConfig config;
    std::vector<Event> events;
  };

  StepResult step(const SensorSnapshot& snap);

  ExoMode mode() const { return mode_; }
  int phase() const { return phase_; }
  int completed_repetitions() const { return completed_; }
  int target_repetitions() const { return target_; }
  const Thresholds& thresholds() const { return th_; }

 private:
  bool dwell_elapsed(bool condition, double t);
  Event transition(double t, ExoMode to, std::string trigger);

  Thresholds th_;
  int target_;
  int completed_ = 0;
  ExoMode mode_ = ExoMode::ReleaseAll;
  int phase_ = 1;
  std::optional<double> condition_since_;
  std::optional<double> last_t_;
};

}  // namespace pamexo
