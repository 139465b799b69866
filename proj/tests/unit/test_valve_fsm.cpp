#include <vector>

#include "pamexo/valve_fsm.hpp"
#include "test_support.hpp"

using namespace pamexo;
using test::error_code_of;

namespace {

// Feeds snapshots at 100 Hz and collects every transition.
struct Driver {
  ValveController ctl;
  double t = 0.0;
  std::vector<Event> events;

  explicit Driver(int reps = 1) : ctl(Thresholds::for_seat(65.0), reps) {}

  void run(double seconds, double p, double theta, double omega = 0.0) {
    int n = static_cast<int>(seconds * 100.0 + 0.5);
    for (int i = 0; i < n; ++i) {
      auto r = ctl.step({t, p, theta, omega});
      events.insert(events.end(), r.events.begin(), r.events.end());
      t += 0.01;
    }
  }

  std::vector<ExoMode> modes() const {
    std::vector<ExoMode> m;
    for (const auto& e : events) m.push_back(e.to);
    return m;
  }
};

}  // namespace

TEST_CASE("valve positions of the named states") {
  // Release all opens both valves to atmosphere; the damper closes both.
  CHECK(config_of(ExoMode::ReleaseAll) == ValveConfig{ValvePos::One, ValvePos::One, ValvePos::One, false});
  CHECK(config_of(ExoMode::QuasiPassiveDamper) == ValveConfig{ValvePos::Two, ValvePos::Two, ValvePos::One, false});
  // Valve 1 in '1' keeps the cylinder vented and transparent.
  CHECK(config_of(ExoMode::HoldAirTransparent).v1 == ValvePos::One);
  CHECK(config_of(ExoMode::PumpCharging).pump_on);
  for (auto m : {ExoMode::ReleaseAll, ExoMode::HoldAirTransparent, ExoMode::Torque, ExoMode::QuasiPassiveDamper,
                 ExoMode::AirReturn}) {
    CHECK_FALSE(config_of(m).pump_on);
  }
}

TEST_CASE("mode names round trip") {
  for (auto m : {ExoMode::ReleaseAll, ExoMode::HoldAirTransparent, ExoMode::PumpCharging, ExoMode::Torque,
                 ExoMode::QuasiPassiveDamper, ExoMode::AirReturn}) {
    CHECK(parse_mode(to_string(m)) == m);
  }
  CHECK_FALSE(parse_mode("Nope").has_value());
}

TEST_CASE("valve sequencing seals before it opens") {
  auto seq = valve_sequence(ExoMode::HoldAirTransparent, ExoMode::Torque);
  REQUIRE(seq.size() == 2);
  CHECK(seq[0] == ValveAction{Valve::V1, ValvePos::Two});
  CHECK(seq[1] == ValveAction{Valve::V2, ValvePos::One});

  auto charge_end = valve_sequence(ExoMode::PumpCharging, ExoMode::HoldAirTransparent);
  REQUIRE(charge_end.size() == 1);
  CHECK(charge_end[0] == ValveAction{Valve::P, ValvePos::One});

  auto damper = valve_sequence(ExoMode::Torque, ExoMode::QuasiPassiveDamper);
  REQUIRE(damper.size() == 1);
  CHECK(damper[0] == ValveAction{Valve::V2, ValvePos::Two});

  CHECK(valve_sequence(ExoMode::Torque, ExoMode::Torque).empty());
}

TEST_CASE("one repetition walks the seven phases") {
  Driver d(1);
  d.run(0.5, 0.0, 65.0);        // start dwell, then charging
  d.run(0.1, 3.2, 65.0);        // pressure reached
  d.run(0.1, 3.2, 60.0, -30.0); // stand-up motion
  d.run(0.5, 2.0, 2.0);         // standing long enough
  d.run(0.5, 2.0, 64.0);        // seated long enough
  d.run(0.1, 2.5, 65.0);        // return finishes, then low-pressure recharge
  d.run(0.1, 3.2, 65.0);
  std::vector<ExoMode> expected{ExoMode::PumpCharging,       ExoMode::HoldAirTransparent, ExoMode::Torque,
                                ExoMode::QuasiPassiveDamper, ExoMode::AirReturn,          ExoMode::HoldAirTransparent,
                                ExoMode::ReleaseAll};
  CHECK(d.modes() == expected);
  std::vector<int> phases;
  for (const auto& e : d.events) phases.push_back(e.phase);
  CHECK(phases == std::vector<int>{2, 3, 4, 5, 6, 7, 1});
  CHECK(d.ctl.completed_repetitions() == 1);
}

TEST_CASE("pressure band restarts charging") {
  Driver d(3);
  d.run(0.3, 0.0, 65.0);
  d.run(0.05, 3.2, 65.0);
  REQUIRE(d.ctl.mode() == ExoMode::HoldAirTransparent);
  d.run(0.05, 3.16, 65.0);  // inside the band: keep holding
  CHECK(d.ctl.mode() == ExoMode::HoldAirTransparent);
  d.run(0.05, 3.14, 65.0);
  CHECK(d.ctl.mode() == ExoMode::PumpCharging);
  CHECK(d.events.back().trigger == "pressure_low");
}

TEST_CASE("dwell rejects short blips") {
  Driver d(1);
  d.run(0.3, 0.0, 65.0);
  d.run(0.05, 3.2, 65.0);
  d.run(0.05, 3.2, 60.0, -30.0);
  REQUIRE(d.ctl.mode() == ExoMode::Torque);
  d.run(0.15, 2.0, 3.0);   // below the standing threshold for less than the dwell
  d.run(0.05, 2.0, 10.0);
  d.run(0.15, 2.0, 3.0);
  CHECK(d.ctl.mode() == ExoMode::Torque);
  d.run(0.25, 2.0, 3.0);
  CHECK(d.ctl.mode() == ExoMode::QuasiPassiveDamper);
}

TEST_CASE("slow knee motion does not trigger assistance") {
  Driver d(1);
  d.run(0.3, 0.0, 65.0);
  d.run(0.05, 3.2, 65.0);
  d.run(1.0, 3.2, 64.0, -5.0);
  CHECK(d.ctl.mode() == ExoMode::HoldAirTransparent);
}

TEST_CASE("controller is deterministic") {
  auto run = [] {
    Driver d(2);
    for (int rep = 0; rep < 2; ++rep) {
      d.run(0.5, 0.0, 65.0);
      d.run(0.1, 3.2, 65.0);
      d.run(0.1, 3.2, 60.0, -30.0);
      d.run(0.5, 2.0, 2.0);
      d.run(0.5, 2.0, 64.0);
      d.run(0.1, 2.5, 65.0);
    }
    std::vector<std::string> lines;
    for (const auto& e : d.events) lines.push_back(to_csv_line(e));
    return lines;
  };
  CHECK(run() == run());
}

TEST_CASE("zero repetitions stays released") {
  Driver d(0);
  d.run(2.0, 0.0, 65.0);
  CHECK(d.events.empty());
  CHECK(d.ctl.mode() == ExoMode::ReleaseAll);
}

TEST_CASE("controller input checks") {
  Thresholds bad;
  bad.theta_standing_deg = 70.0;
  CHECK(error_code_of([&] { ValveController c(bad); }) == ErrorCode::kInvalidArgument);
  CHECK(error_code_of([] { ValveController c(Thresholds{}, -1); }) == ErrorCode::kInvalidArgument);
  ValveController c(Thresholds{});
  c.step({1.0, 0.0, 0.0, 0.0});
  CHECK(error_code_of([&] { c.step({0.5, 0.0, 0.0, 0.0}); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("event CSV line") {
  Event e;
  e.t_s = 1.5;
  e.from = ExoMode::Torque;
  e.to = ExoMode::QuasiPassiveDamper;
  e.trigger = "standing_dwell";
  CHECK(to_csv_line(e) == "1.50000000e+00,Torque,QuasiPassiveDamper,standing_dwell");
}
