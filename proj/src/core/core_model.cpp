#include "pamexo/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pamexo/error.hpp"

namespace pamexo {

namespace {

constexpr double kPi = std::numbers::pi;
// Slack for angle/position bounds that are reached through floating-point
// arithmetic (trajectory endpoints, calibrated lengths).
constexpr double kBoundSlack = 1e-9;

[[noreturn]] void domain_error(const std::string& msg) {
  throw Error(ErrorCode::kDomain, msg);
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

// Plain bisection on an increasing function; used by the linkage calibration.
template <class F>
double bisect_increasing(F f, double lo, double hi, double target, const char* what) {
  double flo = f(lo) - target;
  double fhi = f(hi) - target;
  if (flo > 0.0 || fhi < 0.0) {
    throw Error(ErrorCode::kSolver, std::string("calibration bracket failure for ") + what +
                                        ": f(lo)-target=" + fmt_double(flo) +
                                        ", f(hi)-target=" + fmt_double(fhi));
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kUnreachablePressure: return "unreachable pressure";
    case ErrorCode::kSolver: return "solver error";
    case ErrorCode::kIterationLimit: return "iteration limit";
    case ErrorCode::kIllConditioned: return "ill-conditioned fit";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kScenario: return "scenario error";
    case ErrorCode::kSegmentation: return "segmentation error";
    case ErrorCode::kFilterDesign: return "filter design error";
  }
  return "unknown error";
}

// --- pump -----------------------------------------------------------------

PumpModel PumpModel::small() { return {3.32, 1.8302, "small"}; }
PumpModel PumpModel::large() { return {6.5, 2.0713, "large"}; }

void PumpModel::validate() const {
  if (!(p_max_bar > 0.0) || !(k_s > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "pump '" + label + "' needs p_max > 0 and k > 0");
  }
}

double pump_pressure_at(const PumpModel& pump, double t_s) {
  pump.validate();
  if (!(t_s >= 0.0)) domain_error("pump time must be nonnegative, got " + fmt_double(t_s));
  return pump.p_max_bar * -std::expm1(-t_s / pump.k_s);
}

double pump_time_to(const PumpModel& pump, double from_bar, double to_bar) {
  pump.validate();
  if (!(to_bar < pump.p_max_bar)) {
    throw Error(ErrorCode::kUnreachablePressure,
                "target " + fmt_double(to_bar) + " bar is not below the " + pump.label +
                    " pump asymptote " + fmt_double(pump.p_max_bar) + " bar");
  }
  if (!(from_bar >= 0.0) || from_bar > to_bar) {
    domain_error("pump interval needs 0 <= from <= to, got " + fmt_double(from_bar) + " -> " +
                 fmt_double(to_bar));
  }
  return pump.k_s * std::log((pump.p_max_bar - from_bar) / (pump.p_max_bar - to_bar));
}

// --- PAM ------------------------------------------------------------------

void PamModel::calibrate_braid(double braid_angle_deg) {
  double beta = deg_to_rad(braid_angle_deg);
  thread_length_m = rest_length_m / std::cos(beta);
  thread_turns = std::sqrt(thread_length_m * thread_length_m - rest_length_m * rest_length_m) /
                 (kPi * rest_diameter_m);
}

PamModel PamModel::defaults() {
  PamModel pam;
  pam.calibrate_braid(23.0);
  pam.tube_area_m2 = circle_area(0.0025);
  pam.tube_length_m = 0.3;
  return pam;
}

void PamModel::validate() const {
  if (!(rest_length_m > 0.0)) throw Error(ErrorCode::kInvalidArgument, "PAM rest length must be > 0");
  if (!(max_contraction_mm > 0.0 && max_contraction_mm < 1000.0 * rest_length_m)) {
    throw Error(ErrorCode::kInvalidArgument, "PAM max contraction must lie in (0, 1000*L0) mm");
  }
  if (!(thread_length_m > rest_length_m)) {
    throw Error(ErrorCode::kInvalidArgument, "PAM thread length must exceed rest length");
  }
  if (!(thread_turns > 0.0)) throw Error(ErrorCode::kInvalidArgument, "PAM thread turns must be > 0");
  if (tube_area_m2 < 0.0 || tube_length_m < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "PAM tube dimensions must be nonnegative");
  }
}

Contraction pam_contraction(const PamModel& pam, double p_gauge_bar) {
  Contraction out;
  double p = p_gauge_bar;
  // A PAM below atmosphere does not lengthen past its rest state; hold the
  // zero-pressure contraction there.
  if (p < 0.0) {
    p = 0.0;
    out.extrapolated = true;
  }
  if (p > pam.identified_max_bar) out.extrapolated = true;
  const auto& c = pam.contraction_coeffs;
  double eps = (((c[0] * p + c[1]) * p + c[2]) * p + c[3]) * p + c[4];
  out.mm = std::clamp(eps, 0.0, pam.max_contraction_mm);
  return out;
}

double pam_length(const PamModel& pam, double p_gauge_bar) {
  return pam.rest_length_m - pam_contraction(pam, p_gauge_bar).mm / 1000.0;
}

double pam_volume(const PamModel& pam, double length_m) {
  if (!(length_m > 0.0 && length_m < pam.thread_length_m)) {
    domain_error("PAM length " + fmt_double(length_m) + " m outside (0, " +
                 fmt_double(pam.thread_length_m) + ")");
  }
  double lf2 = pam.thread_length_m * pam.thread_length_m;
  double braid = (length_m * lf2 - length_m * length_m * length_m) /
                 (4.0 * kPi * pam.thread_turns * pam.thread_turns);
  return braid + pam.tube_volume();
}

double pam_volume_at(const PamModel& pam, Pressure p) {
  return pam_volume(pam, pam_length(pam, p.gauge_bar()));
}

// --- cylinder and linkage ---------------------------------------------------

CylinderModel CylinderModel::from_bore(double bore_m, double stroke_m) {
  CylinderModel cyl;
  cyl.piston_area_m2 = circle_area(bore_m);
  cyl.stroke_m = stroke_m;
  return cyl;
}

CylinderModel CylinderModel::defaults() {
  CylinderModel cyl = from_bore(0.025, 0.100);
  cyl.tube_area_m2 = circle_area(0.0025);
  cyl.tube_length_m = 0.3;
  return cyl;
}

void CylinderModel::validate() const {
  if (!(piston_area_m2 > 0.0) || !(stroke_m > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "cylinder needs positive piston area and stroke");
  }
  if (tube_area_m2 < 0.0 || tube_length_m < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "cylinder tube dimensions must be nonnegative");
  }
}

double cylinder_volume(const CylinderModel& cyl, double z_m) {
  if (!(z_m >= -kBoundSlack && z_m <= cyl.stroke_m + kBoundSlack)) {
    domain_error("piston position " + fmt_double(z_m) + " m outside [0, " +
                 fmt_double(cyl.stroke_m) + "]");
  }
  z_m = std::clamp(z_m, 0.0, cyl.stroke_m);
  return cyl.piston_area_m2 * z_m + cyl.tube_volume();
}

LinkageModel::LinkageModel(double a_m, double b_m, double gamma0_deg, double theta_hi_deg)
    : a_(a_m), b_(b_m), gamma0_deg_(gamma0_deg), theta_hi_deg_(theta_hi_deg) {
  if (!(a_ > 0.0 && b_ > 0.0)) throw Error(ErrorCode::kInvalidArgument, "linkage pin distances must be > 0");
  if (!(theta_hi_deg_ > 0.0 && theta_hi_deg_ <= kMaxKneeAngleDeg)) {
    throw Error(ErrorCode::kInvalidArgument, "linkage reference angle must lie in (0, 135] deg");
  }
  // l(theta) is strictly decreasing on [0, theta_hi] iff sin(gamma0 - theta) > 0 there.
  if (!(gamma0_deg_ > theta_hi_deg_ && gamma0_deg_ < 180.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "linkage gamma0 must lie in (theta_hi, 180) deg for a monotone cylinder length");
  }
  l_min_ = length(theta_hi_deg_);
  l_max_ = length(0.0);
}

double LinkageModel::length(double theta_deg) const {
  double g = deg_to_rad(gamma0_deg_ - theta_deg);
  return std::sqrt(a_ * a_ + b_ * b_ - 2.0 * a_ * b_ * std::cos(g));
}

double LinkageModel::lever_arm(double theta_deg) const {
  double g = deg_to_rad(gamma0_deg_ - theta_deg);
  return a_ * b_ * std::sin(g) / length(theta_deg);
}

double cylinder_length(const LinkageModel& link, double theta_deg) {
  if (!(theta_deg >= -kBoundSlack && theta_deg <= kMaxKneeAngleDeg + kBoundSlack)) {
    domain_error("knee angle " + fmt_double(theta_deg) + " deg outside [0, 135]");
  }
  return link.length(theta_deg);
}

double piston_position(const LinkageModel& link, const CylinderModel& cyl, double theta_deg) {
  if (!(theta_deg >= -kBoundSlack && theta_deg <= link.theta_hi_deg() + kBoundSlack)) {
    domain_error("knee angle " + fmt_double(theta_deg) + " deg outside the modelled range [0, " +
                 fmt_double(link.theta_hi_deg()) + "]");
  }
  if (theta_deg >= link.theta_hi_deg()) return 0.0;
  if (theta_deg <= 0.0) return cyl.stroke_m;
  double l = link.length(theta_deg);
  return cyl.stroke_m * (l - link.l_min()) / (link.l_max() - link.l_min());
}

namespace {

// Largest lever arm over gamma in [g_lo, g_hi] (radians). The crank's lever
// arm peaks where the cylinder is perpendicular to the thigh arm, cos g = a/b.
double peak_lever_arm(double a, double b, double g_lo, double g_hi) {
  auto r = [&](double g) { return a * b * std::sin(g) / std::sqrt(a * a + b * b - 2 * a * b * std::cos(g)); };
  double best = std::max(r(g_lo), r(g_hi));
  if (a < b) {
    double g_star = std::acos(a / b);
    if (g_star > g_lo && g_star < g_hi) best = std::max(best, r(g_star));
  }
  return best;
}

}  // namespace

// --- gas network ------------------------------------------------------------

double boyle_product(const GasState& s, PressureConvention conv) {
  return boyle_scale(s.p, conv) * s.volume_m3;
}

GasState isothermal_expand(const GasState& s, double new_volume_m3, PressureConvention conv) {
  if (!(s.volume_m3 > 0.0)) domain_error("gas state volume must be > 0");
  if (!(new_volume_m3 > 0.0)) domain_error("expansion target volume must be > 0, got " + fmt_double(new_volume_m3));
  if (new_volume_m3 == s.volume_m3) return s;
  double scaled = boyle_scale(s.p, conv) * (s.volume_m3 / new_volume_m3);
  return {from_boyle_scale(scaled, conv), new_volume_m3};
}

SolveResult solve_boyle(double target, const VolumeOfPressure& volume, PressureConvention conv) {
  auto residual = [&](double s) {
    double v = volume(from_boyle_scale(s, conv));
    if (!(v > 0.0)) {
      throw Error(ErrorCode::kSolver, "joint volume nonpositive at pressure scale " + fmt_double(s));
    }
    return s * v - target;
  };
  if (!(target >= 0.0)) {
    throw Error(ErrorCode::kSolver, "Boyle product must be nonnegative, got " + fmt_double(target));
  }
  if (target == 0.0) return {from_boyle_scale(0.0, conv), 0};

  double lo = 0.0;
  double hi = 1.0;
  int expansions = 0;
  while (residual(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 60) {
      throw Error(ErrorCode::kSolver, "no sign change while bracketing Boyle product " +
                                          fmt_double(target) + " (upper bound " + fmt_double(hi) + ")");
    }
  }
  if (residual(lo) > 0.0) {
    throw Error(ErrorCode::kSolver, "bracket [" + fmt_double(lo) + ", " + fmt_double(hi) +
                                        "] has no sign change; volume law not increasing");
  }

  constexpr int kMaxIterations = 200;
  int it = 0;
  for (; it < kMaxIterations; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval at machine resolution
    if (residual(mid) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (it == kMaxIterations && hi - lo > 1e-6) {
    throw Error(ErrorCode::kIterationLimit, "bisection did not converge: width " + fmt_double(hi - lo));
  }
  // Pick whichever endpoint reproduces the target product more closely.
  double s = std::abs(residual(lo)) <= std::abs(residual(hi)) ? lo : hi;
  return {from_boyle_scale(s, conv), it};
}

Pressure merge_isothermal(const GasState& a, const GasState& b, const VolumeOfPressure& joint_volume,
                          PressureConvention conv) {
  if (!(a.volume_m3 > 0.0 && b.volume_m3 > 0.0)) domain_error("merged gas states need positive volumes");
  if (a.p.absolute_bar() < 0.0 || b.p.absolute_bar() < 0.0) domain_error("absolute pressure must be >= 0");
  double target = boyle_product(a, conv) + boyle_product(b, conv);
  return solve_boyle(target, joint_volume, conv).p;
}

ActuatorModel ActuatorModel::defaults() {
  ActuatorModel m;
  m.pump = PumpModel::small();
  m.pam = PamModel::defaults();
  m.cylinder = CylinderModel::defaults();
  m.linkage = calibrate_linkage(LinkageCalibration{}, m.pam, m.cylinder);
  return m;
}

double connected_volume(const ActuatorModel& m, double theta_deg, Pressure p) {
  return cylinder_volume(m.cylinder, piston_position(m.linkage, m.cylinder, theta_deg)) +
         pam_volume_at(m.pam, p);
}

Pressure coupled_pressure_at_angle(double theta_deg, const GasState& init, const ActuatorModel& m,
                                   PressureConvention conv) {
  double vc = cylinder_volume(m.cylinder, piston_position(m.linkage, m.cylinder, theta_deg));
  auto volume = [&](Pressure p) { return vc + pam_volume_at(m.pam, p); };
  try {
    return solve_boyle(boyle_product(init, conv), volume, conv).p;
  } catch (const Error& e) {
    throw Error(e.code(), std::string(e.what()) + " (theta = " + fmt_double(theta_deg) + " deg)");
  }
}

double cylinder_force(Pressure p, const CylinderModel& cyl) {
  return p.gauge_pa() * cyl.piston_area_m2;
}

double exo_torque(double force_n, const LinkageModel& link, double theta_deg) {
  return force_n * link.lever_arm(theta_deg);
}

LinkageModel calibrate_linkage(const LinkageCalibration& t, const PamModel& pam, const CylinderModel& cyl,
                               PressureConvention conv) {
  pam.validate();
  cyl.validate();
  double r_peak = t.peak_torque_nm / (t.peak_pressure_bar * kPascalPerBar * cyl.piston_area_m2);

  auto solve_a = [&](double gamma0_deg) {
    double g_hi = deg_to_rad(gamma0_deg);
    double g_lo = deg_to_rad(gamma0_deg - t.theta_hi_deg);
    return bisect_increasing([&](double a) { return peak_lever_arm(a, t.b_m, g_lo, g_hi); },
                             1e-6, 0.999 * t.b_m, r_peak, "pin distance a");
  };

  // Torque drop over a small extension step from theta_hi; grows with gamma0.
  constexpr double kStepDeg = 1e-3;
  ActuatorModel m;
  m.pam = pam;
  m.cylinder = cyl;
  auto p_ref = Pressure::gauge_bar(t.ref_pressure_bar);
  auto torque_drop = [&](double gamma0_deg) {
    m.linkage = LinkageModel(solve_a(gamma0_deg), t.b_m, gamma0_deg, t.theta_hi_deg);
    GasState init{p_ref, connected_volume(m, t.theta_hi_deg, p_ref)};
    auto torque = [&](double theta) {
      auto p = coupled_pressure_at_angle(theta, init, m, conv);
      return exo_torque(cylinder_force(p, cyl), m.linkage, theta);
    };
    return torque(t.theta_hi_deg) - torque(t.theta_hi_deg - kStepDeg);
  };
  double gamma0 = bisect_increasing(torque_drop, t.theta_hi_deg + 1e-3, 180.0 - 1e-3, 0.0, "gamma0");
  return LinkageModel(solve_a(gamma0), t.b_m, gamma0, t.theta_hi_deg);
}

}  // namespace pamexo
