#include "pamexo/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pamexo/error.hpp"

namespace pamexo {

namespace {

// "auto" marks parameters derived from others at model-build time.
const std::map<std::string, std::string>& default_values() {
  static const std::map<std::string, std::string> d{
      {"pump.name", "small"},
      {"pump.p_max", "auto"},
      {"pump.k", "auto"},

      {"pam.rest_length", "0.100"},
      {"pam.rest_diameter", "0.020"},
      {"pam.c1", "0.1022"},
      {"pam.c2", "-1.3370"},
      {"pam.c3", "5.1426"},
      {"pam.c4", "-0.8131"},
      {"pam.c5", "0.4189"},
      {"pam.max_contraction_mm", "25.0"},
      {"pam.identified_max_bar", "3.32"},
      {"pam.braid_angle_deg", "23.0"},
      {"pam.thread_length", "auto"},
      {"pam.thread_turns", "auto"},
      {"pam.tube_diameter", "0.0025"},
      {"pam.tube_length", "0.3"},

      {"cylinder.bore", "0.025"},
      {"cylinder.stroke", "0.100"},
      {"cylinder.tube_diameter", "0.0025"},
      {"cylinder.tube_length", "0.3"},

      {"linkage.a", "auto"},
      {"linkage.b", "0.32"},
      {"linkage.gamma0_deg", "auto"},
      {"linkage.theta_hi_deg", "107.0"},
      {"linkage.peak_torque", "20.0"},
      {"linkage.peak_pressure", "8.0"},
      {"linkage.ref_pressure", "3.2"},

      {"control.p_set", "3.2"},
      {"control.p_band", "0.05"},
      {"control.theta_standing", "5.0"},
      {"control.theta_sitting", "auto"},
      {"control.omega_trigger", "10.0"},
      {"control.dwell", "0.2"},

      {"scenario.seat_angle", "65.0"},
      {"scenario.legs", "1"},
      {"scenario.repetitions", "10"},
      {"scenario.convention", "absolute"},
      {"scenario.merge_on_torque_entry", "true"},
      {"scenario.dt", "0.01"},
      {"scenario.transfer_time", "2.0"},
      {"scenario.stand_hold", "2.0"},
      {"scenario.pump_autonomy_h", "3.4"},

      {"energy.p_standing", "1.85"},
      {"energy.p_recovered", "2.46"},
      {"energy.legs", "2"},
  };
  return d;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_auto(const std::string& v) { return v == "auto"; }

}  // namespace

Config::Config() : values_(default_values()) {}

void Config::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCode::kInvalidArgument, "unknown configuration key '" + key + "'");
  it->second = trim(value);
}

std::vector<std::string> Config::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

void Config::load_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw Error(ErrorCode::kParse, origin + ":" + std::to_string(lineno) + ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kParse, origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
    try {
      set(key, line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse, origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void Config::load_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kIo, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  load_text(ss.str(), path);
}

const std::string& Config::text(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCode::kInvalidArgument, "unknown configuration key '" + key + "'");
  return it->second;
}

double Config::number(const std::string& key) const {
  const std::string& v = text(key);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw Error(ErrorCode::kInvalidArgument, "configuration key '" + key + "' needs a number, got '" + v + "'");
  }
  return out;
}

PumpModel Config::pump() const {
  const std::string& name = text("pump.name");
  PumpModel p;
  if (name == "small") {
    p = PumpModel::small();
  } else if (name == "large") {
    p = PumpModel::large();
  } else {
    p.label = name;
    if (is_auto(text("pump.p_max")) || is_auto(text("pump.k"))) {
      throw Error(ErrorCode::kInvalidArgument, "custom pump '" + name + "' needs pump.p_max and pump.k");
    }
  }
  if (!is_auto(text("pump.p_max"))) p.p_max_bar = number("pump.p_max");
  if (!is_auto(text("pump.k"))) p.k_s = number("pump.k");
  p.validate();
  return p;
}

ActuatorModel Config::model() const {
  ActuatorModel m;
  m.pump = pump();

  PamModel& pam = m.pam;
  pam.rest_length_m = number("pam.rest_length");
  pam.rest_diameter_m = number("pam.rest_diameter");
  for (int i = 0; i < 5; ++i) pam.contraction_coeffs[static_cast<std::size_t>(i)] = number("pam.c" + std::to_string(i + 1));
  pam.max_contraction_mm = number("pam.max_contraction_mm");
  pam.identified_max_bar = number("pam.identified_max_bar");
  pam.calibrate_braid(number("pam.braid_angle_deg"));
  if (!is_auto(text("pam.thread_length"))) pam.thread_length_m = number("pam.thread_length");
  if (!is_auto(text("pam.thread_turns"))) pam.thread_turns = number("pam.thread_turns");
  pam.tube_area_m2 = circle_area(number("pam.tube_diameter"));
  pam.tube_length_m = number("pam.tube_length");
  pam.validate();

  m.cylinder = CylinderModel::from_bore(number("cylinder.bore"), number("cylinder.stroke"));
  m.cylinder.tube_area_m2 = circle_area(number("cylinder.tube_diameter"));
  m.cylinder.tube_length_m = number("cylinder.tube_length");
  m.cylinder.validate();

  bool explicit_a = !is_auto(text("linkage.a"));
  bool explicit_gamma = !is_auto(text("linkage.gamma0_deg"));
  if (explicit_a && explicit_gamma) {
    m.linkage = LinkageModel(number("linkage.a"), number("linkage.b"), number("linkage.gamma0_deg"),
                             number("linkage.theta_hi_deg"));
  } else if (explicit_a || explicit_gamma) {
    throw Error(ErrorCode::kInvalidArgument, "set both linkage.a and linkage.gamma0_deg, or neither to calibrate");
  } else {
    LinkageCalibration cal;
    cal.b_m = number("linkage.b");
    cal.theta_hi_deg = number("linkage.theta_hi_deg");
    cal.peak_torque_nm = number("linkage.peak_torque");
    cal.peak_pressure_bar = number("linkage.peak_pressure");
    cal.ref_pressure_bar = number("linkage.ref_pressure");
    m.linkage = calibrate_linkage(cal, m.pam, m.cylinder, convention());
  }
  return m;
}

Thresholds Config::thresholds() const {
  Thresholds th = Thresholds::for_seat(seat_deg());
  th.p_set_bar = number("control.p_set");
  th.p_band_bar = number("control.p_band");
  th.theta_standing_deg = number("control.theta_standing");
  if (!is_auto(text("control.theta_sitting"))) th.theta_sitting_deg = number("control.theta_sitting");
  th.omega_trigger_deg_s = number("control.omega_trigger");
  th.dwell_s = number("control.dwell");
  th.validate();
  return th;
}

PressureConvention Config::convention() const {
  const std::string& v = text("scenario.convention");
  if (v == "absolute") return PressureConvention::Absolute;
  if (v == "gauge-naive") return PressureConvention::GaugeNaive;
  throw Error(ErrorCode::kInvalidArgument, "scenario.convention must be 'absolute' or 'gauge-naive', got '" + v + "'");
}

int Config::legs() const {
  double v = number("scenario.legs");
  if (v != 1.0 && v != 2.0) throw Error(ErrorCode::kInvalidArgument, "scenario.legs must be 1 or 2");
  return static_cast<int>(v);
}

ScenarioOptions Config::scenario_options() const {
  ScenarioOptions o;
  o.thresholds = thresholds();
  double reps = number("scenario.repetitions");
  if (reps < 0 || reps != std::floor(reps)) {
    throw Error(ErrorCode::kInvalidArgument, "scenario.repetitions must be a nonnegative integer");
  }
  o.repetitions = static_cast<int>(reps);
  o.legs = legs();
  o.convention = convention();
  const std::string& merge = text("scenario.merge_on_torque_entry");
  if (merge == "true" || merge == "1") {
    o.merge_on_torque_entry = true;
  } else if (merge == "false" || merge == "0") {
    o.merge_on_torque_entry = false;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "scenario.merge_on_torque_entry must be true or false");
  }
  o.pump_autonomy_h = number("scenario.pump_autonomy_h");
  return o;
}

}  // namespace pamexo
