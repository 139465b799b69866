#include <cmath>
#include <string>

#include "pamexo/config.hpp"
#include "pamexo/csv.hpp"
#include "test_support.hpp"

using namespace pamexo;
using test::error_code_of;

namespace {

std::string message_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("default configuration reproduces the device constants") {
  Config c;
  auto pump = c.pump();
  CHECK(pump.p_max_bar == 3.32);
  CHECK(pump.k_s == 1.8302);
  auto th = c.thresholds();
  CHECK(th.p_set_bar == 3.2);
  CHECK(th.theta_sitting_deg == 60.0);
  CHECK(c.legs() == 1);
  CHECK(c.convention() == PressureConvention::Absolute);
  auto m = c.model();
  auto d = ActuatorModel::defaults();
  CHECK(m.linkage.a() == doctest::Approx(d.linkage.a()).epsilon(1e-12));
  CHECK(m.linkage.gamma0_deg() == doctest::Approx(d.linkage.gamma0_deg()).epsilon(1e-12));
  CHECK(c.scenario_options().repetitions == 10);
}

TEST_CASE("config text with sections and comments") {
  Config c;
  c.load_text("# header\n[pump]\nname = large ; trailing\n\n[control]\np_set=3.0\nscenario.legs = 2\n");
  CHECK(c.pump().p_max_bar == 6.5);
  CHECK(c.number("control.p_set") == 3.0);
  CHECK(c.legs() == 2);
}

TEST_CASE("custom pump needs explicit constants") {
  Config c;
  c.set("pump.name", "bench");
  CHECK(error_code_of([&] { c.pump(); }) == ErrorCode::kInvalidArgument);
  c.set("pump.p_max", "4.0");
  c.set("pump.k", "1.5");
  CHECK(c.pump().label == "bench");
  CHECK(c.pump().k_s == 1.5);
}

TEST_CASE("config errors carry origin and line") {
  Config c;
  CHECK(error_code_of([&] { c.set("pump.colour", "red"); }) == ErrorCode::kInvalidArgument);
  auto msg = message_of([&] { c.load_text("[pump]\nname = small\ncolour = red\n", "bench.ini"); });
  CHECK(msg.find("bench.ini:3") != std::string::npos);
  CHECK(error_code_of([&] { c.load_text("[pump\n"); }) == ErrorCode::kParse);
  CHECK(error_code_of([&] { c.load_text("novalue\n"); }) == ErrorCode::kParse);
  c.set("control.p_set", "abc");
  CHECK(error_code_of([&] { c.thresholds(); }) == ErrorCode::kInvalidArgument);
  CHECK(error_code_of([] { Config().load_file("/nonexistent/x.ini"); }) == ErrorCode::kIo);
}

TEST_CASE("linkage must be calibrated or fully specified") {
  Config c;
  c.set("linkage.a", "0.05");
  CHECK(error_code_of([&] { c.model(); }) == ErrorCode::kInvalidArgument);
  c.set("linkage.gamma0_deg", "160");
  CHECK(c.model().linkage.a() == 0.05);
}

TEST_CASE("config validates enumerations") {
  Config c;
  c.set("scenario.convention", "relative");
  CHECK(error_code_of([&] { c.convention(); }) == ErrorCode::kInvalidArgument);
  Config l;
  l.set("scenario.legs", "3");
  CHECK(error_code_of([&] { l.legs(); }) == ErrorCode::kInvalidArgument);
  Config r;
  r.set("scenario.repetitions", "2.5");
  CHECK(error_code_of([&] { r.scenario_options(); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("CSV parsing") {
  auto t = parse_csv("t,p\n0,1.5\n\n1,2e-1\r\n");
  CHECK(t.header == std::vector<std::string>{"t", "p"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][1] == 0.2);
  CHECK(t.column("p") == 1);
  CHECK(t.column_values(0) == std::vector<double>{0.0, 1.0});
  CHECK(error_code_of([&] { t.column("q"); }) == ErrorCode::kParse);
}

TEST_CASE("CSV errors name the line") {
  CHECK(message_of([] { parse_csv("t,p\n0,1\n1,x\n", "in.csv"); }).find("in.csv:3") != std::string::npos);
  CHECK(message_of([] { parse_csv("t,p\n0,1,2\n", "in.csv"); }).find("in.csv:2") != std::string::npos);
  CHECK(error_code_of([] { parse_csv("t,p\n"); }) == ErrorCode::kParse);
  CHECK(error_code_of([] { read_csv("/nonexistent/file.csv"); }) == ErrorCode::kIo);
}

TEST_CASE("number formatting keeps nine significant digits") {
  CHECK(format_number(3.2) == "3.20000000e+00");
  CHECK(format_number(-0.0001234567891) == "-1.23456789e-04");
  CHECK(std::stod(format_number(1.0 / 3.0)) == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
}
