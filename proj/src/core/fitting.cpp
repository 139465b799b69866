#include "pamexo/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pamexo/error.hpp"

namespace pamexo {

namespace {

constexpr double kPumpKMin = 0.1;
constexpr double kPumpKMax = 20.0;
constexpr int kPumpGridPoints = 400;
constexpr double kGoldenTol = 1e-9;

struct PumpTrial {
  double k;
  double p_max;
  double ss;
};

PumpTrial evaluate_pump(const SampleSeries& d, double k) {
  double gy = 0.0;
  double gg = 0.0;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    double g = -std::expm1(-d.x[i] / k);
    gy += g * d.y[i];
    gg += g * g;
  }
  double p_max = gg > 0.0 ? gy / gg : 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    double r = d.y[i] - p_max * -std::expm1(-d.x[i] / k);
    ss += r * r;
  }
  return {k, p_max, ss};
}

}  // namespace

void SampleSeries::validate(std::size_t min_points) const {
  if (x.size() != y.size()) throw Error(ErrorCode::kInvalidArgument, "sample series x and y lengths differ");
  if (x.size() < min_points) {
    throw Error(ErrorCode::kInvalidArgument, "sample series needs at least " + std::to_string(min_points) +
                                                 " points, got " + std::to_string(x.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw Error(ErrorCode::kInvalidArgument, "sample " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(x[i] > x[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "abscissae must be strictly increasing (sample " +
                                                   std::to_string(i) + ")");
    }
  }
}

double FitResult::param(const std::string& name) const {
  for (const auto& [n, v] : params) {
    if (n == name) return v;
  }
  throw Error(ErrorCode::kInvalidArgument, "fit has no parameter '" + name + "'");
}

double r_squared(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size() || y.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "R^2 needs two equal-length series of at least 2 values");
  }
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_tot = 0.0;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_tot += (y[i] - mean) * (y[i] - mean);
    ss_res += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
  }
  if (!(ss_tot > 0.0)) throw Error(ErrorCode::kDomain, "R^2 undefined for constant observations");
  return 1.0 - ss_res / ss_tot;
}

double rms(std::span<const double> y, std::span<const double> y_hat) {
  double ss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) ss += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
  return std::sqrt(ss / static_cast<double>(y.size()));
}

FitResult fit_pump(const SampleSeries& d) {
  d.validate(6);
  double y_min = *std::min_element(d.y.begin(), d.y.end());
  double y_max = *std::max_element(d.y.begin(), d.y.end());
  if (!(y_max > y_min)) throw Error(ErrorCode::kIllConditioned, "pump data are constant; no charge curve to fit");

  std::vector<PumpTrial> grid;
  grid.reserve(kPumpGridPoints);
  const double ratio = std::log(kPumpKMax / kPumpKMin);
  for (int i = 0; i < kPumpGridPoints; ++i) {
    grid.push_back(evaluate_pump(d, kPumpKMin * std::exp(ratio * i / (kPumpGridPoints - 1))));
  }
  auto best = std::min_element(grid.begin(), grid.end(),
                               [](const PumpTrial& a, const PumpTrial& b) { return a.ss < b.ss; });
  if (best == grid.begin() || best == grid.end() - 1) {
    throw Error(ErrorCode::kIllConditioned,
                "pump fit optimum sits on the search boundary (k = " + std::to_string(best->k) +
                    " s); data show no usable curvature");
  }

  // Golden-section search on the bracketing grid cell pair.
  constexpr double kInvPhi = 0.6180339887498949;
  double a = (best - 1)->k;
  double b = (best + 1)->k;
  double c = b - kInvPhi * (b - a);
  double e = a + kInvPhi * (b - a);
  double fc = evaluate_pump(d, c).ss;
  double fe = evaluate_pump(d, e).ss;
  while (b - a > kGoldenTol * 0.5 * (a + b)) {
    if (fc < fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - kInvPhi * (b - a);
      fc = evaluate_pump(d, c).ss;
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + kInvPhi * (b - a);
      fe = evaluate_pump(d, e).ss;
    }
  }
  PumpTrial fit = evaluate_pump(d, 0.5 * (a + b));

  std::vector<double> y_hat(d.x.size());
  for (std::size_t i = 0; i < d.x.size(); ++i) y_hat[i] = fit.p_max * -std::expm1(-d.x[i] / fit.k);
  FitResult out;
  out.params = {{"p_max", fit.p_max}, {"k", fit.k}};
  out.r_squared = r_squared(d.y, y_hat);
  out.rms_residual = rms(d.y, y_hat);
  return out;
}

FitResult fit_pam_quartic(const SampleSeries& d) {
  d.validate(10);
  const auto n = static_cast<Eigen::Index>(d.x.size());
  Eigen::MatrixXd basis(n, 5);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double p = d.x[static_cast<std::size_t>(i)];
    basis(i, 4) = 1.0;
    for (int j = 3; j >= 0; --j) basis(i, j) = basis(i, j + 1) * p;
    y(i) = d.y[static_cast<std::size_t>(i)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
  qr.setThreshold(1e-12);
  if (qr.rank() < 5) {
    throw Error(ErrorCode::kIllConditioned,
                "quartic design matrix is rank deficient (rank " + std::to_string(qr.rank()) + ")");
  }
  Eigen::VectorXd coeffs = qr.solve(y);
  Eigen::VectorXd fitted = basis * coeffs;
  std::vector<double> y_hat(fitted.data(), fitted.data() + n);

  FitResult out;
  for (int j = 0; j < 5; ++j) out.params.emplace_back("c" + std::to_string(j + 1), coeffs(j));
  out.r_squared = r_squared(d.y, y_hat);
  out.rms_residual = rms(d.y, y_hat);
  return out;
}

std::string to_key_value(const FitResult& fit) {
  std::string out;
  char buf[128];
  for (const auto& [name, v] : fit.params) {
    std::snprintf(buf, sizeof buf, "%s=%.8e\n", name.c_str(), v);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "r_squared=%.8e\nrms_residual=%.8e\n", fit.r_squared, fit.rms_residual);
  out += buf;
  return out;
}

}  // namespace pamexo
