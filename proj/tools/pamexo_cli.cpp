// Command-line front end over the pamexo C API.

#include <climits>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pamexo/pamexo.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitNumerical = 4;

int exit_code(pamexo_status s) {
  switch (s) {
    case PAMEXO_OK: return kExitOk;
    case PAMEXO_ERR_INVALID_ARGUMENT:
    case PAMEXO_ERR_FILTER_DESIGN: return kExitUsage;
    case PAMEXO_ERR_PARSE:
    case PAMEXO_ERR_IO: return kExitInput;
    default: return kExitNumerical;
  }
}

struct Failure {
  pamexo_status status;
};

void check(pamexo_status s) {
  if (s != PAMEXO_OK) throw Failure{s};
}

class ConfigHandle {
 public:
  ConfigHandle() { check(pamexo_config_create(&cfg_)); }
  ~ConfigHandle() { pamexo_config_destroy(cfg_); }
  ConfigHandle(const ConfigHandle&) = delete;
  ConfigHandle& operator=(const ConfigHandle&) = delete;

  void set(const std::string& key, const std::string& value) { check(pamexo_config_set(cfg_, key.c_str(), value.c_str())); }
  double number(const char* key) const {
    double v = 0.0;
    check(pamexo_config_get_double(cfg_, key, &v));
    return v;
  }
  pamexo_config* get() const { return cfg_; }

 private:
  pamexo_config* cfg_ = nullptr;
};

struct TableHandle {
  pamexo_table* t = nullptr;
  ~TableHandle() { pamexo_table_destroy(t); }
};

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;

  void attach(CLI::App* sub) {
    sub->add_option("--config", config_path, "Configuration file (key = value with [sections])")
        ->check(CLI::ExistingFile);
    sub->add_option("--set", overrides, "Override a configuration entry, section.key=value");
  }

  void apply(ConfigHandle& cfg) const {
    if (!config_path.empty()) check(pamexo_config_load(cfg.get(), config_path.c_str()));
    for (const auto& kv : overrides) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "error: --set expects section.key=value, got '%s'\n", kv.c_str());
        throw Failure{PAMEXO_ERR_INVALID_ARGUMENT};
      }
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
  }
};

const char* or_stdout(const std::string& path) { return path.empty() ? "-" : path.c_str(); }

int cmd_profiles(const Common& common, std::optional<double> p_init, double from, double to, int steps,
                 const std::string& out) {
  ConfigHandle cfg;
  common.apply(cfg);
  double p0 = p_init ? *p_init : cfg.number("control.p_set");
  TableHandle t;
  check(pamexo_profiles(cfg.get(), p0, from, to, steps, &t.t));
  check(pamexo_table_write_csv(t.t, or_stdout(out)));
  return kExitOk;
}

struct SimulateArgs {
  std::string trajectory;
  bool synthetic = false;
  std::optional<double> seat;
  std::optional<int> legs;
  std::optional<int> repetitions;
  std::string samples_out;
  std::string events_out;
  std::string cycles_out;
  std::string report_out;
};

int cmd_simulate(const Common& common, const SimulateArgs& a) {
  if (a.trajectory.empty() && !a.synthetic) {
    std::fprintf(stderr, "error: simulate needs --trajectory FILE or --synthetic\n");
    return kExitUsage;
  }
  ConfigHandle cfg;
  common.apply(cfg);
  if (a.seat) cfg.set("scenario.seat_angle", std::to_string(*a.seat));
  if (a.legs) cfg.set("scenario.legs", std::to_string(*a.legs));
  if (a.repetitions) cfg.set("scenario.repetitions", std::to_string(*a.repetitions));

  pamexo_scenario* s = nullptr;
  check(pamexo_scenario_run(cfg.get(), a.trajectory.empty() ? nullptr : a.trajectory.c_str(), &s));
  struct Guard {
    pamexo_scenario* s;
    ~Guard() { pamexo_scenario_destroy(s); }
  } guard{s};

  if (!a.samples_out.empty()) check(pamexo_table_write_csv(pamexo_scenario_samples(s), a.samples_out.c_str()));
  if (!a.events_out.empty()) check(pamexo_table_write_csv(pamexo_scenario_events(s), a.events_out.c_str()));
  if (!a.cycles_out.empty()) check(pamexo_table_write_csv(pamexo_scenario_cycles(s), a.cycles_out.c_str()));
  pamexo_energy_report r;
  check(pamexo_scenario_report(s, &r));
  check(pamexo_energy_report_write(&r, or_stdout(a.report_out)));
  return kExitOk;
}

struct EnergyArgs {
  std::string pump = "both";
  std::optional<double> p_set;
  std::optional<double> p_standing;
  std::optional<double> p_recovered;
  std::optional<int> legs;
};

int cmd_energy_report(const Common& common, const EnergyArgs& a) {
  std::vector<std::string> pumps;
  if (a.pump == "both") {
    pumps = {"small", "large"};
  } else {
    pumps = {a.pump};
  }
  bool first = true;
  for (const auto& name : pumps) {
    ConfigHandle cfg;
    common.apply(cfg);
    if (a.pump != "config") cfg.set("pump.name", name);
    double p_set = a.p_set ? *a.p_set : cfg.number("control.p_set");
    double p_st = a.p_standing ? *a.p_standing : cfg.number("energy.p_standing");
    double p_rec = a.p_recovered ? *a.p_recovered : cfg.number("energy.p_recovered");
    int legs = a.legs ? *a.legs : static_cast<int>(cfg.number("energy.legs"));
    pamexo_energy_report r;
    check(pamexo_energy_report_compute(cfg.get(), p_set, p_st, p_rec, legs, &r));
    if (!first) std::cout << '\n' << std::flush;
    first = false;
    check(pamexo_energy_report_write(&r, "-"));
  }
  return kExitOk;
}

int cmd_fit(bool pump, const std::string& input, const std::string& out) {
  pamexo_fit fit;
  check(pump ? pamexo_fit_pump_csv(input.c_str(), &fit) : pamexo_fit_pam_csv(input.c_str(), &fit));
  check(pamexo_fit_write(&fit, or_stdout(out)));
  return kExitOk;
}

struct EmgArgs {
  std::string input;
  std::string out;
  std::string sitting_out;
  std::string standing_out;
  pamexo_emg_options opt{};
};

int cmd_emg(const EmgArgs& a) {
  TableHandle env;
  TableHandle sit;
  TableHandle stand;
  bool segment = !a.sitting_out.empty() || !a.standing_out.empty();
  check(pamexo_emg_envelope_csv(a.input.c_str(), &a.opt, &env.t, segment ? &sit.t : nullptr,
                                segment ? &stand.t : nullptr));
  check(pamexo_table_write_csv(env.t, or_stdout(a.out)));
  if (!a.sitting_out.empty()) check(pamexo_table_write_csv(sit.t, a.sitting_out.c_str()));
  if (!a.standing_out.empty()) check(pamexo_table_write_csv(stand.t, a.standing_out.c_str()));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Air-regenerative pneumatic knee exoskeleton: simulation, identification and EMG tools"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pamexo_version()));

  Common common;

  auto* profiles = app.add_subcommand("profiles", "Pressure, volume and torque over a knee-extension sweep");
  common.attach(profiles);
  std::optional<double> p_init;
  double from = 107.0;
  double to = 0.0;
  int steps = 200;
  std::string profiles_out;
  profiles->add_option("--p-init", p_init, "Initial gauge pressure [bar] (default control.p_set)");
  profiles->add_option("--from", from, "Start angle [deg]")->capture_default_str();
  profiles->add_option("--to", to, "End angle [deg]")->capture_default_str();
  profiles->add_option("--steps", steps, "Number of rows")->capture_default_str()->check(CLI::Range(2, INT_MAX));
  profiles->add_option("-o,--output", profiles_out, "Output CSV (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Run the sit-stand scenario through the valve controller");
  common.attach(simulate);
  SimulateArgs sim;
  simulate->add_option("--trajectory", sim.trajectory, "CSV with columns t,theta_deg");
  simulate->add_flag("--synthetic", sim.synthetic, "Use the minimum-jerk synthetic motion");
  simulate->add_option("--seat", sim.seat, "Seated knee angle [deg] for the synthetic motion");
  simulate->add_option("--legs", sim.legs, "Legs served by the pump")->check(CLI::IsMember({1, 2}));
  simulate->add_option("--repetitions", sim.repetitions, "Sit-stand repetitions")->check(CLI::NonNegativeNumber);
  simulate->add_option("--samples", sim.samples_out, "Sample CSV output");
  simulate->add_option("--events", sim.events_out, "Mode transition CSV output");
  simulate->add_option("--cycles", sim.cycles_out, "Per-cycle summary CSV output");
  simulate->add_option("--report", sim.report_out, "Energy report output (default stdout)");

  auto* energy = app.add_subcommand("energy-report", "Refill times, actuation frequency and endurance factor");
  common.attach(energy);
  EnergyArgs en;
  energy->add_option("--pump", en.pump, "small, large, both, or config (use pump.* entries)")->capture_default_str()
      ->check(CLI::IsMember({"small", "large", "both", "config"}));
  energy->add_option("--p-set", en.p_set, "Set pressure [bar]");
  energy->add_option("--p-standing", en.p_standing, "PAM pressure after standing [bar]");
  energy->add_option("--p-recovered", en.p_recovered, "PAM pressure after air return [bar]");
  energy->add_option("--legs", en.legs, "Legs served by the pump")->check(CLI::IsMember({1, 2}));

  std::string fit_in;
  std::string fit_out;
  auto* fit_pump = app.add_subcommand("fit-pump", "Fit p(t) = p_max (1 - exp(-t/k)) to a CSV with columns x,y");
  auto* fit_pam = app.add_subcommand("fit-pam", "Fit a quartic contraction curve to a CSV with columns x,y");
  for (auto* sub : {fit_pump, fit_pam}) {
    sub->add_option("input", fit_in, "Input CSV")->required();
    sub->add_option("-o,--output", fit_out, "Report output (default stdout)");
  }

  auto* emg = app.add_subcommand("emg-envelope", "Band-pass, rectify and low-pass an EMG trace");
  EmgArgs em;
  pamexo_emg_options_default(&em.opt);
  emg->add_option("input", em.input, "CSV with t,value or t,emg,knee_deg")->required();
  emg->add_option("--rate", em.opt.sample_rate_hz, "Sample rate [Hz] (default from the t column)");
  emg->add_option("--band-low", em.opt.band_low_hz, "Band-pass lower edge [Hz]")->capture_default_str();
  emg->add_option("--band-high", em.opt.band_high_hz, "Band-pass upper edge [Hz]")->capture_default_str();
  emg->add_option("--lowpass", em.opt.lowpass_hz, "Envelope low-pass cutoff [Hz]")->capture_default_str();
  emg->add_option("--order", em.opt.order, "Butterworth order")->capture_default_str();
  emg->add_option("--mvc", em.opt.mvc_level, "MVC level for percent normalisation");
  emg->add_option("--grid", em.opt.grid_points, "Phase grid points")->capture_default_str()->check(CLI::Range(2, INT_MAX));
  emg->add_option("-o,--output", em.out, "Envelope CSV output (default stdout)");
  emg->add_option("--sitting", em.sitting_out, "Stand-to-sit phase-averaged CSV output");
  emg->add_option("--standing", em.standing_out, "Sit-to-stand phase-averaged CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*profiles) return cmd_profiles(common, p_init, from, to, steps, profiles_out);
    if (*simulate) return cmd_simulate(common, sim);
    if (*energy) return cmd_energy_report(common, en);
    if (*fit_pump) return cmd_fit(true, fit_in, fit_out);
    if (*fit_pam) return cmd_fit(false, fit_in, fit_out);
    if (*emg) return cmd_emg(em);
  } catch (const Failure& f) {
    const char* msg = pamexo_last_error();
    std::fprintf(stderr, "error: %s%s%s\n", pamexo_status_name(f.status), *msg ? ": " : "", msg);
    return exit_code(f.status);
  }
  return kExitUsage;
}
