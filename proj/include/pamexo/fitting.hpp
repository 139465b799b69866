#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pamexo {

struct SampleSeries {
  std::vector<double> x;
  std::vector<double> y;

  /// Equal lengths, at least `min_points`, finite values, x strictly increasing.
  void validate(std::size_t min_points) const;
};

struct FitResult {
  std::vector<std::pair<std::string, double>> params;
  double r_squared = 0.0;
  double rms_residual = 0.0;

  double param(const std::string& name) const;
};

/// Least squares for p(t) = p_max (1 - exp(-t/k)). The amplitude has a closed
/// form for fixed k, so only k is searched: a log grid over [0.1, 20] s, then
/// golden-section refinement.
FitResult fit_pump(const SampleSeries& data);

/// Ordinary least squares on the monomials p^4..p^0 via column-pivoted
/// Householder QR. Parameters are named c1..c5, c1 multiplying p^4.
FitResult fit_pam_quartic(const SampleSeries& data);

double r_squared(std::span<const double> y, std::span<const double> y_hat);
double rms(std::span<const double> y, std::span<const double> y_hat);

std::string to_key_value(const FitResult& fit);

}  // namespace pamexo
