#include "pamexo/pamexo.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "pamexo/config.hpp"
#include "pamexo/csv.hpp"
#include "pamexo/cycle_sim.hpp"
#include "pamexo/error.hpp"
#include "pamexo/fitting.hpp"
#include "pamexo/signal.hpp"

struct pamexo_config {
  pamexo::Config cfg;
};

struct pamexo_table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> text;
  std::vector<std::vector<double>> num;  // NaN marks a text cell

  void add_row(std::vector<std::string> cells, std::vector<double> values) {
    text.push_back(std::move(cells));
    num.push_back(std::move(values));
  }
};

struct pamexo_scenario {
  pamexo::ScenarioResult result;
  pamexo_table samples;
  pamexo_table events;
  pamexo_table cycles;
};

namespace {

thread_local std::string g_last_error;

pamexo_status to_status(pamexo::ErrorCode c) {
  using pamexo::ErrorCode;
  switch (c) {
    case ErrorCode::kInvalidArgument: return PAMEXO_ERR_INVALID_ARGUMENT;
    case ErrorCode::kDomain: return PAMEXO_ERR_DOMAIN;
    case ErrorCode::kUnreachablePressure: return PAMEXO_ERR_UNREACHABLE_PRESSURE;
    case ErrorCode::kSolver: return PAMEXO_ERR_SOLVER;
    case ErrorCode::kIterationLimit: return PAMEXO_ERR_ITERATION_LIMIT;
    case ErrorCode::kIllConditioned: return PAMEXO_ERR_ILL_CONDITIONED;
    case ErrorCode::kParse: return PAMEXO_ERR_PARSE;
    case ErrorCode::kIo: return PAMEXO_ERR_IO;
    case ErrorCode::kScenario: return PAMEXO_ERR_SCENARIO;
    case ErrorCode::kSegmentation: return PAMEXO_ERR_SEGMENTATION;
    case ErrorCode::kFilterDesign: return PAMEXO_ERR_FILTER_DESIGN;
  }
  return PAMEXO_ERR_INTERNAL;
}

template <class F>
pamexo_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return PAMEXO_OK;
  } catch (const pamexo::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PAMEXO_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return PAMEXO_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw pamexo::Error(pamexo::ErrorCode::kInvalidArgument, what);
}

constexpr double kText = std::numeric_limits<double>::quiet_NaN();

void write_text(const std::string& content, const char* path) {
  if (path == nullptr || std::strcmp(path, "-") == 0) {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw pamexo::Error(pamexo::ErrorCode::kIo, std::string("cannot write '") + path + "'");
  f << content;
  if (!f) throw pamexo::Error(pamexo::ErrorCode::kIo, std::string("write failed for '") + path + "'");
}

pamexo_table sample_table(const std::vector<pamexo::SimSample>& samples) {
  pamexo_table t;
  t.header = {"t", "theta_deg", "mode", "p_pam_bar", "p_cyl_bar", "V_m_m3", "V_c_m3", "L_m_m", "z_m", "F_N", "T_Nm"};
  for (const auto& s : samples) {
    std::vector<double> v{s.t_s,     s.theta_deg, kText,        s.p_pam_bar,  s.p_cyl_bar, s.v_pam_m3,
                          s.v_cyl_m3, s.pam_length_m, s.piston_z_m, s.force_n, s.torque_nm};
    std::vector<std::string> c;
    for (std::size_t i = 0; i < v.size(); ++i) {
      c.push_back(i == 2 ? std::string(pamexo::to_string(s.mode)) : pamexo::format_number(v[i]));
    }
    t.add_row(std::move(c), std::move(v));
  }
  return t;
}

pamexo_table event_table(const std::vector<pamexo::Event>& events) {
  pamexo_table t;
  t.header = {"t", "mode_from", "mode_to", "trigger"};
  for (const auto& e : events) {
    t.add_row({pamexo::format_number(e.t_s), pamexo::to_string(e.from), pamexo::to_string(e.to), e.trigger},
              {e.t_s, kText, kText, kText});
  }
  return t;
}

pamexo_table cycle_table(const std::vector<pamexo::CycleStats>& cycles) {
  pamexo_table t;
  t.header = {"cycle", "pump_on_s", "p_entry_bar", "torque_entry_Nm", "p_standing_bar", "peak_damper_torque_Nm",
              "p_recovered_bar"};
  for (const auto& c : cycles) {
    std::vector<double> v{static_cast<double>(c.index), c.pump_on_s,     c.p_entry_bar,   c.torque_entry_nm,
                          c.p_standing_bar,             c.peak_damper_torque_nm, c.p_recovered_bar};
    std::vector<std::string> cells{std::to_string(c.index)};
    for (std::size_t i = 1; i < v.size(); ++i) cells.push_back(pamexo::format_number(v[i]));
    t.add_row(std::move(cells), std::move(v));
  }
  return t;
}

pamexo_table numeric_table(std::vector<std::string> header, const std::vector<std::vector<double>>& columns) {
  pamexo_table t;
  t.header = std::move(header);
  std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> v;
    std::vector<std::string> c;
    for (const auto& col : columns) {
      v.push_back(col[r]);
      c.push_back(pamexo::format_number(col[r]));
    }
    t.add_row(std::move(c), std::move(v));
  }
  return t;
}

void fill_report(const pamexo::EnergyReport& r, pamexo_energy_report* out) {
  *out = pamexo_energy_report{};
  out->legs = r.legs;
  out->p_set_bar = r.p_set_bar;
  out->p_standing_bar = r.p_standing_bar;
  out->p_recovered_bar = r.p_recovered_bar;
  out->refill_with_er_leg_s = r.refill_with_er_leg_s;
  out->refill_without_er_leg_s = r.refill_without_er_leg_s;
  out->refill_with_er_all_s = r.refill_with_er_all_s;
  out->refill_without_er_all_s = r.refill_without_er_all_s;
  out->max_freq_with_er_per_min = r.max_freq_with_er_per_min;
  out->max_freq_without_er_per_min = r.max_freq_without_er_per_min;
  out->endurance_factor = r.endurance_factor;
  out->pump_on_total_s = r.pump_on_total_s;
  out->has_battery_autonomy = r.battery_autonomy_h.has_value() ? 1 : 0;
  out->battery_autonomy_h = r.battery_autonomy_h.value_or(0.0);
  std::snprintf(out->pump_label, sizeof out->pump_label, "%s", r.pump_label.c_str());
}

pamexo::EnergyReport from_c(const pamexo_energy_report& in) {
  pamexo::EnergyReport r;
  r.pump_label = in.pump_label;
  r.legs = in.legs;
  r.p_set_bar = in.p_set_bar;
  r.p_standing_bar = in.p_standing_bar;
  r.p_recovered_bar = in.p_recovered_bar;
  r.refill_with_er_leg_s = in.refill_with_er_leg_s;
  r.refill_without_er_leg_s = in.refill_without_er_leg_s;
  r.refill_with_er_all_s = in.refill_with_er_all_s;
  r.refill_without_er_all_s = in.refill_without_er_all_s;
  r.max_freq_with_er_per_min = in.max_freq_with_er_per_min;
  r.max_freq_without_er_per_min = in.max_freq_without_er_per_min;
  r.endurance_factor = in.endurance_factor;
  r.pump_on_total_s = in.pump_on_total_s;
  if (in.has_battery_autonomy) r.battery_autonomy_h = in.battery_autonomy_h;
  return r;
}

void fill_fit(const pamexo::FitResult& f, pamexo_fit* out) {
  *out = pamexo_fit{};
  out->n_params = f.params.size();
  for (std::size_t i = 0; i < f.params.size() && i < 5; ++i) {
    std::snprintf(out->names[i], sizeof out->names[i], "%s", f.params[i].first.c_str());
    out->params[i] = f.params[i].second;
  }
  out->r_squared = f.r_squared;
  out->rms_residual = f.rms_residual;
}

pamexo::SampleSeries series(const double* x, const double* y, size_t n) {
  require(n == 0 || (x != nullptr && y != nullptr), "null sample arrays");
  return {std::vector<double>(x, x + n), std::vector<double>(y, y + n)};
}

pamexo::SampleSeries series_from_csv(const char* path) {
  require(path != nullptr, "null path");
  auto t = pamexo::read_csv(path);
  return {t.column_values(t.column("x")), t.column_values(t.column("y"))};
}

pamexo::signal::EnvelopeOptions envelope_options(const pamexo_emg_options& o) {
  return {o.band_low_hz, o.band_high_hz, o.lowpass_hz, o.order};
}

}  // namespace

extern "C" {

const char* pamexo_version(void) { return "1.0.0"; }

const char* pamexo_status_name(pamexo_status status) {
  switch (status) {
    case PAMEXO_OK: return "ok";
    case PAMEXO_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PAMEXO_ERR_DOMAIN: return "domain error";
    case PAMEXO_ERR_UNREACHABLE_PRESSURE: return "unreachable pressure";
    case PAMEXO_ERR_SOLVER: return "solver error";
    case PAMEXO_ERR_ITERATION_LIMIT: return "iteration limit";
    case PAMEXO_ERR_ILL_CONDITIONED: return "ill-conditioned fit";
    case PAMEXO_ERR_PARSE: return "parse error";
    case PAMEXO_ERR_IO: return "i/o error";
    case PAMEXO_ERR_SCENARIO: return "scenario error";
    case PAMEXO_ERR_SEGMENTATION: return "segmentation error";
    case PAMEXO_ERR_FILTER_DESIGN: return "filter design error";
    case PAMEXO_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* pamexo_last_error(void) { return g_last_error.c_str(); }

pamexo_status pamexo_config_create(pamexo_config** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new pamexo_config{};
  });
}

void pamexo_config_destroy(pamexo_config* cfg) { delete cfg; }

pamexo_status pamexo_config_load(pamexo_config* cfg, const char* path) {
  return guarded([&] {
    require(cfg != nullptr && path != nullptr, "null argument");
    cfg->cfg.load_file(path);
  });
}

pamexo_status pamexo_config_set(pamexo_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg != nullptr && key != nullptr && value != nullptr, "null argument");
    cfg->cfg.set(key, value);
  });
}

pamexo_status pamexo_config_get_double(const pamexo_config* cfg, const char* key, double* out) {
  return guarded([&] {
    require(cfg != nullptr && key != nullptr && out != nullptr, "null argument");
    *out = cfg->cfg.number(key);
  });
}

void pamexo_table_destroy(pamexo_table* table) { delete table; }
size_t pamexo_table_rows(const pamexo_table* t) { return t ? t->text.size() : 0; }
size_t pamexo_table_cols(const pamexo_table* t) { return t ? t->header.size() : 0; }

const char* pamexo_table_column_name(const pamexo_table* t, size_t col) {
  if (t == nullptr || col >= t->header.size()) return nullptr;
  return t->header[col].c_str();
}

pamexo_status pamexo_table_value(const pamexo_table* t, size_t row, size_t col, double* out) {
  return guarded([&] {
    require(t != nullptr && out != nullptr, "null argument");
    require(row < t->num.size() && col < t->header.size(), "table index out of range");
    double v = t->num[row][col];
    require(!std::isnan(v), "table cell is text");
    *out = v;
  });
}

const char* pamexo_table_text(const pamexo_table* t, size_t row, size_t col) {
  if (t == nullptr || row >= t->text.size() || col >= t->header.size()) return nullptr;
  return t->text[row][col].c_str();
}

pamexo_status pamexo_table_write_csv(const pamexo_table* t, const char* path) {
  return guarded([&] {
    require(t != nullptr, "null table");
    std::string out;
    for (std::size_t i = 0; i < t->header.size(); ++i) out += (i ? "," : "") + t->header[i];
    out += '\n';
    for (const auto& row : t->text) {
      for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
      out += '\n';
    }
    write_text(out, path);
  });
}

pamexo_status pamexo_pump_pressure_at(const pamexo_config* cfg, double t_s, double* out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    *out = pamexo::pump_pressure_at(cfg->cfg.pump(), t_s);
  });
}

pamexo_status pamexo_pump_time_to(const pamexo_config* cfg, double from_bar, double to_bar, double* out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    *out = pamexo::pump_time_to(cfg->cfg.pump(), from_bar, to_bar);
  });
}

pamexo_status pamexo_linkage(const pamexo_config* cfg, pamexo_linkage_info* out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    auto link = cfg->cfg.model().linkage;
    *out = {link.a(), link.b(), link.gamma0_deg(), link.theta_hi_deg(), link.l_min(), link.l_max()};
  });
}

pamexo_status pamexo_coupled_pressure(const pamexo_config* cfg, double p_init_bar, double theta_init_deg,
                                      double theta_deg, double* out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    auto m = cfg->cfg.model();
    auto p0 = pamexo::Pressure::gauge_bar(p_init_bar);
    pamexo::GasState init{p0, pamexo::connected_volume(m, theta_init_deg, p0)};
    *out = pamexo::coupled_pressure_at_angle(theta_deg, init, m, cfg->cfg.convention()).gauge_bar();
  });
}

pamexo_status pamexo_torque(const pamexo_config* cfg, double p_bar, double theta_deg, double* out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    auto m = cfg->cfg.model();
    double f = pamexo::cylinder_force(pamexo::Pressure::gauge_bar(p_bar), m.cylinder);
    *out = pamexo::exo_torque(f, m.linkage, theta_deg);
  });
}

pamexo_status pamexo_profiles(const pamexo_config* cfg, double p_init_bar, double from, double to, int steps,
                              pamexo_table** out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    auto rows = pamexo::theoretical_profiles(cfg->cfg.model(), p_init_bar, from, to, steps, cfg->cfg.convention());
    pamexo_table t;
    t.header = {"theta_deg", "p_bar", "V_m_m3", "V_c_m3", "V_tot_m3", "L_m_m", "z_m", "F_N", "T_Nm"};
    for (const auto& s : rows) {
      std::vector<double> v{s.theta_deg, s.p_pam_bar,  s.v_pam_m3, s.v_cyl_m3,  s.v_pam_m3 + s.v_cyl_m3,
                            s.pam_length_m, s.piston_z_m, s.force_n, s.torque_nm};
      std::vector<std::string> c;
      for (double x : v) c.push_back(pamexo::format_number(x));
      t.add_row(std::move(c), std::move(v));
    }
    *out = new pamexo_table(std::move(t));
  });
}

pamexo_status pamexo_energy_report_compute(const pamexo_config* cfg, double p_set, double p_standing,
                                           double p_recovered, int legs, pamexo_energy_report* out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    fill_report(pamexo::energy_report(cfg->cfg.pump(), p_set, p_standing, p_recovered, legs), out);
  });
}

pamexo_status pamexo_energy_report_write(const pamexo_energy_report* report, const char* path) {
  return guarded([&] {
    require(report != nullptr, "null report");
    write_text(pamexo::to_key_value(from_c(*report)), path);
  });
}

pamexo_status pamexo_scenario_run(const pamexo_config* cfg, const char* trajectory_csv, pamexo_scenario** out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    const auto& c = cfg->cfg;
    auto model = c.model();
    auto opt = c.scenario_options();
    pamexo::Trajectory traj;
    if (trajectory_csv != nullptr) {
      auto csv = pamexo::read_csv(trajectory_csv);
      auto tc = csv.column("t");
      auto ac = csv.column("theta_deg");
      for (const auto& row : csv.rows) traj.push_back({row[tc], row[ac]});
      try {
        pamexo::validate_trajectory(traj);
      } catch (const pamexo::Error& e) {
        throw pamexo::Error(pamexo::ErrorCode::kParse, std::string(trajectory_csv) + ": " + e.what());
      }
    } else {
      auto motion = pamexo::synthetic_motion_for(model, opt, c.seat_deg(), c.number("scenario.dt"));
      motion.transfer_s = c.number("scenario.transfer_time");
      motion.stand_hold_s = c.number("scenario.stand_hold");
      traj = pamexo::min_jerk_trajectory(motion);
    }
    auto s = std::make_unique<pamexo_scenario>();
    s->result = pamexo::run_scenario(model, opt, traj);
    s->samples = sample_table(s->result.samples);
    s->events = event_table(s->result.events);
    s->cycles = cycle_table(s->result.cycles);
    *out = s.release();
  });
}

void pamexo_scenario_destroy(pamexo_scenario* s) { delete s; }
const pamexo_table* pamexo_scenario_samples(const pamexo_scenario* s) { return s ? &s->samples : nullptr; }
const pamexo_table* pamexo_scenario_events(const pamexo_scenario* s) { return s ? &s->events : nullptr; }
const pamexo_table* pamexo_scenario_cycles(const pamexo_scenario* s) { return s ? &s->cycles : nullptr; }

pamexo_status pamexo_scenario_report(const pamexo_scenario* s, pamexo_energy_report* out) {
  return guarded([&] {
    require(s != nullptr && out != nullptr, "null argument");
    fill_report(s->result.report, out);
  });
}

pamexo_status pamexo_scenario_phases(const pamexo_scenario* s, int* buf, size_t cap, size_t* count) {
  return guarded([&] {
    require(s != nullptr && count != nullptr, "null argument");
    require(cap == 0 || buf != nullptr, "null buffer");
    std::vector<int> phases{1};
    for (const auto& e : s->result.events) phases.push_back(e.phase);
    *count = phases.size();
    for (std::size_t i = 0; i < phases.size() && i < cap; ++i) buf[i] = phases[i];
  });
}

pamexo_status pamexo_fit_pump(const double* t, const double* p, size_t n, pamexo_fit* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    fill_fit(pamexo::fit_pump(series(t, p, n)), out);
  });
}

pamexo_status pamexo_fit_pam(const double* p, const double* eps, size_t n, pamexo_fit* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    fill_fit(pamexo::fit_pam_quartic(series(p, eps, n)), out);
  });
}

pamexo_status pamexo_fit_pump_csv(const char* path, pamexo_fit* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    fill_fit(pamexo::fit_pump(series_from_csv(path)), out);
  });
}

pamexo_status pamexo_fit_pam_csv(const char* path, pamexo_fit* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    fill_fit(pamexo::fit_pam_quartic(series_from_csv(path)), out);
  });
}

pamexo_status pamexo_fit_write(const pamexo_fit* fit, const char* path) {
  return guarded([&] {
    require(fit != nullptr, "null fit");
    pamexo::FitResult f;
    for (std::size_t i = 0; i < fit->n_params && i < 5; ++i) f.params.emplace_back(fit->names[i], fit->params[i]);
    f.r_squared = fit->r_squared;
    f.rms_residual = fit->rms_residual;
    write_text(pamexo::to_key_value(f), path);
  });
}

void pamexo_emg_options_default(pamexo_emg_options* opt) {
  if (opt == nullptr) return;
  *opt = pamexo_emg_options{0.0, 20.0, 400.0, 5.0, 4, 0.0, 101};
}

pamexo_status pamexo_emg_envelope(const double* samples, size_t n, const pamexo_emg_options* opt, double* out) {
  return guarded([&] {
    require(opt != nullptr && out != nullptr && (n == 0 || samples != nullptr), "null argument");
    require(opt->sample_rate_hz > 0.0, "sample rate must be given for raw arrays");
    pamexo::signal::Trace in{opt->sample_rate_hz, std::vector<double>(samples, samples + n)};
    auto env = pamexo::signal::envelope(in, envelope_options(*opt));
    if (opt->mvc_level > 0.0) env = pamexo::signal::mvc_normalize(env, opt->mvc_level);
    std::copy(env.samples.begin(), env.samples.end(), out);
  });
}

pamexo_status pamexo_emg_envelope_csv(const char* path, const pamexo_emg_options* opt, pamexo_table** envelope_out,
                                      pamexo_table** sitting_out, pamexo_table** standing_out) {
  return guarded([&] {
    require(path != nullptr && opt != nullptr && envelope_out != nullptr, "null argument");
    auto csv = pamexo::read_csv(path);
    auto t = csv.column_values(csv.column("t"));
    std::size_t emg_col = csv.header.size() >= 3 ? csv.column("emg") : csv.column("value");
    auto raw = csv.column_values(emg_col);

    double rate = opt->sample_rate_hz;
    if (!(rate > 0.0)) {
      require(t.size() >= 2 && t.back() > t.front(), "cannot derive sample rate from the t column");
      rate = static_cast<double>(t.size() - 1) / (t.back() - t.front());
    }
    pamexo::signal::Trace env = pamexo::signal::envelope({rate, raw}, envelope_options(*opt));
    if (opt->mvc_level > 0.0) env = pamexo::signal::mvc_normalize(env, opt->mvc_level);

    std::unique_ptr<pamexo_table> sit;
    std::unique_ptr<pamexo_table> stand;
    if (sitting_out != nullptr || standing_out != nullptr) {
      pamexo::signal::Trace knee{rate, csv.column_values(csv.column("knee_deg"))};
      pamexo::signal::SegmentOptions so;
      so.grid_points = opt->grid_points;
      auto seg = pamexo::signal::segment_by_transition(env, knee, so);
      sit = std::make_unique<pamexo_table>(
          numeric_table({"phase_pct", "mean", "std"}, {seg.sitting.phase_pct, seg.sitting.mean, seg.sitting.stddev}));
      stand = std::make_unique<pamexo_table>(numeric_table(
          {"phase_pct", "mean", "std"}, {seg.standing.phase_pct, seg.standing.mean, seg.standing.stddev}));
    }
    *envelope_out = new pamexo_table(numeric_table({"t", "envelope"}, {t, env.samples}));
    if (sitting_out != nullptr) *sitting_out = sit.release();
    if (standing_out != nullptr) *standing_out = stand.release();
  });
}

}  // extern "C"
