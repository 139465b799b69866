#pragma once

#include <map>
#include <string>
#include <vector>

#include "pamexo/cycle_sim.hpp"

namespace pamexo {

/// Flat `section.key` parameter store. Every key has a default; the defaults
/// reproduce the device constants. File syntax:
///
///     # comment
///     [pump]
///     name = small
///
/// Values set later (file, then command line) override earlier ones.
class Config {
 public:
  Config();

  void set(const std::string& key, const std::string& value);
  void load_file(const std::string& path);
  void load_text(const std::string& text, const std::string& origin = "<text>");

  double number(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  bool has_key(const std::string& key) const { return values_.count(key) != 0; }
  std::vector<std::string> keys() const;

  PumpModel pump() const;
  ActuatorModel model() const;
  Thresholds thresholds() const;
  ScenarioOptions scenario_options() const;
  PressureConvention convention() const;
  double seat_deg() const { return number("scenario.seat_angle"); }
  int legs() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace pamexo
