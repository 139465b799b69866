#include <cmath>
#include <random>

#include "pamexo/fitting.hpp"
#include "test_support.hpp"

using namespace pamexo;
using test::error_code_of;

namespace {

SampleSeries pump_samples(double p_max, double k, double noise_frac, unsigned seed, int n = 60, double t_end = 15.0) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_frac * p_max);
  SampleSeries s;
  for (int i = 1; i <= n; ++i) {
    double t = t_end * i / n;
    s.x.push_back(t);
    s.y.push_back(p_max * (1.0 - std::exp(-t / k)) + noise(rng));
  }
  return s;
}

double pump_sse(const SampleSeries& s, double p_max, double k) {
  double ss = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    double r = s.y[i] - p_max * (1.0 - std::exp(-s.x[i] / k));
    ss += r * r;
  }
  return ss;
}

const double kCoeffs[5] = {0.1022, -1.3370, 5.1426, -0.8131, 0.4189};

double quartic(const double* c, double p) { return (((c[0] * p + c[1]) * p + c[2]) * p + c[3]) * p + c[4]; }

SampleSeries quartic_samples(int n = 34) {
  SampleSeries s;
  for (int i = 0; i < n; ++i) {
    double p = 3.32 * i / (n - 1);
    s.x.push_back(p);
    s.y.push_back(quartic(kCoeffs, p));
  }
  return s;
}

}  // namespace

TEST_CASE("pump fit recovers parameters under 1% noise") {
  for (auto [p_max, k] : {std::pair{3.32, 1.8302}, std::pair{6.5, 2.0713}}) {
    auto fit = fit_pump(pump_samples(p_max, k, 0.01, 42));
    CHECK(std::abs(fit.param("p_max") / p_max - 1.0) < 0.02);
    CHECK(std::abs(fit.param("k") / k - 1.0) < 0.02);
    CHECK(fit.r_squared > 0.99);
  }
}

TEST_CASE("pump fit is exact on noiseless data") {
  auto fit = fit_pump(pump_samples(3.32, 1.8302, 0.0, 1));
  CHECK(fit.param("p_max") == doctest::Approx(3.32).epsilon(1e-7));
  CHECK(fit.param("k") == doctest::Approx(1.8302).epsilon(1e-7));
  CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("pump fit is a local least-squares optimum") {
  auto s = pump_samples(3.32, 1.8302, 0.01, 7);
  auto fit = fit_pump(s);
  double best = pump_sse(s, fit.param("p_max"), fit.param("k"));
  for (double dp : {-1e-3, 0.0, 1e-3}) {
    for (double dk : {-1e-3, 0.0, 1e-3}) {
      if (dp == 0.0 && dk == 0.0) continue;
      CHECK(pump_sse(s, fit.param("p_max") * (1 + dp), fit.param("k") * (1 + dk)) >= best);
    }
  }
}

TEST_CASE("pump fit scale equivariance") {
  auto s = pump_samples(3.32, 1.8302, 0.01, 3);
  auto base = fit_pump(s);
  auto scaled_y = s;
  for (double& y : scaled_y.y) y *= 2.5;
  auto fy = fit_pump(scaled_y);
  CHECK(fy.param("p_max") == doctest::Approx(2.5 * base.param("p_max")).epsilon(1e-6));
  CHECK(fy.param("k") == doctest::Approx(base.param("k")).epsilon(1e-6));
  auto scaled_t = s;
  for (double& x : scaled_t.x) x *= 1.5;
  auto ft = fit_pump(scaled_t);
  CHECK(ft.param("k") == doctest::Approx(1.5 * base.param("k")).epsilon(1e-6));
  CHECK(ft.param("p_max") == doctest::Approx(base.param("p_max")).epsilon(1e-6));
}

TEST_CASE("pump fit rejects degenerate input") {
  SampleSeries flat;
  for (int i = 1; i <= 10; ++i) {
    flat.x.push_back(i);
    flat.y.push_back(1.0);
  }
  CHECK(error_code_of([&] { fit_pump(flat); }) == ErrorCode::kIllConditioned);
  // A straight line has no curvature inside the searched time constants.
  SampleSeries line;
  for (int i = 1; i <= 10; ++i) {
    line.x.push_back(0.001 * i);
    line.y.push_back(0.001 * i);
  }
  CHECK(error_code_of([&] { fit_pump(line); }) == ErrorCode::kIllConditioned);
  CHECK(error_code_of([] { fit_pump(SampleSeries{{1, 2, 3}, {1, 2, 3}}); }) == ErrorCode::kInvalidArgument);
  CHECK(error_code_of([] { fit_pump(SampleSeries{{1, 2, 2, 3, 4, 5}, {1, 2, 3, 4, 5, 6}}); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("quartic fit recovers the identified coefficients") {
  auto fit = fit_pam_quartic(quartic_samples());
  for (int j = 0; j < 5; ++j) {
    CHECK(std::abs(fit.param("c" + std::to_string(j + 1)) - kCoeffs[j]) <= 1e-8);
  }
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fit.rms_residual < 1e-10);
}

TEST_CASE("quartic residuals are orthogonal to the monomials") {
  std::mt19937 rng(5);
  std::normal_distribution<double> noise(0.0, 0.05);
  auto s = quartic_samples(40);
  for (double& y : s.y) y += noise(rng);
  auto fit = fit_pam_quartic(s);
  double c[5];
  for (int j = 0; j < 5; ++j) c[j] = fit.param("c" + std::to_string(j + 1));
  for (int power = 0; power <= 4; ++power) {
    double dot = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double basis = std::pow(s.x[i], power);
      dot += basis * (s.y[i] - quartic(c, s.x[i]));
      scale += std::abs(basis * s.y[i]);
    }
    CHECK(std::abs(dot) <= 1e-10 * scale);
  }
}

TEST_CASE("quartic fit is linear in the observations") {
  auto s = quartic_samples();
  auto twice = s;
  for (double& y : twice.y) y *= 2.0;
  auto a = fit_pam_quartic(s);
  auto b = fit_pam_quartic(twice);
  for (int j = 1; j <= 5; ++j) {
    auto name = "c" + std::to_string(j);
    CHECK(b.param(name) == doctest::Approx(2.0 * a.param(name)).epsilon(1e-9));
  }
}

TEST_CASE("quartic fit flags a rank-deficient design") {
  SampleSeries tight;
  for (int i = 0; i < 10; ++i) {
    tight.x.push_back(1e-5 * i);
    tight.y.push_back(i);
  }
  CHECK(error_code_of([&] { fit_pam_quartic(tight); }) == ErrorCode::kIllConditioned);
  auto few = quartic_samples(9);
  CHECK(error_code_of([&] { fit_pam_quartic(few); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("goodness-of-fit helpers") {
  std::vector<double> y{1, 2, 3, 4};
  CHECK(r_squared(y, y) == 1.0);
  std::vector<double> mean(4, 2.5);
  CHECK(r_squared(y, mean) == doctest::Approx(0.0));
  CHECK(rms(y, mean) == doctest::Approx(std::sqrt(1.25)));
  std::vector<double> flat(4, 1.0);
  CHECK(error_code_of([&] { r_squared(flat, flat); }) == ErrorCode::kDomain);
  FitResult f;
  f.params = {{"k", 1.0}};
  CHECK(error_code_of([&] { f.param("nope"); }) == ErrorCode::kInvalidArgument);
  CHECK(to_key_value(f).find("k=1.00000000e+00") != std::string::npos);
}
