#include "pamexo/signal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "pamexo/error.hpp"

namespace pamexo::signal {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

[[noreturn]] void design_error(const std::string& msg) { throw Error(ErrorCode::kFilterDesign, msg); }

cplx bilinear(cplx s, double fs) { return (2.0 * fs + s) / (2.0 * fs - s); }

double prewarp(double f_hz, double fs) { return 2.0 * fs * std::tan(kPi * f_hz / fs); }

// Poles of the unit-cutoff analog Butterworth prototype in the upper half plane.
std::vector<cplx> prototype_upper_poles(int order) {
  std::vector<cplx> poles;
  for (int k = 0; k < order / 2; ++k) {
    double angle = kPi * (2.0 * k + order + 1) / (2.0 * order);
    poles.push_back(std::polar(1.0, angle));
  }
  return poles;
}

cplx section_response(const Biquad& s, cplx z_inv) {
  return (s.b0 + s.b1 * z_inv + s.b2 * z_inv * z_inv) / (1.0 + s.a1 * z_inv + s.a2 * z_inv * z_inv);
}

Biquad from_pole(cplx zp, double b0, double b1, double b2) {
  return {b0, b1, b2, -2.0 * zp.real(), std::norm(zp)};
}

}  // namespace

void Trace::validate() const {
  if (!(sample_rate_hz > 0.0)) throw Error(ErrorCode::kInvalidArgument, "trace sample rate must be > 0");
  for (double v : samples) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "trace contains non-finite samples");
  }
}

void FilterSpec::validate(double fs) const {
  if (!(fs > 0.0)) design_error("sample rate must be > 0");
  if (order < 2 || order % 2 != 0) design_error("Butterworth order must be even and >= 2");
  double nyquist = 0.5 * fs;
  if (kind == FilterKind::Lowpass) {
    if (!(low_hz > 0.0 && low_hz < nyquist)) {
      design_error("low-pass cutoff " + std::to_string(low_hz) + " Hz must lie in (0, Nyquist=" +
                   std::to_string(nyquist) + " Hz)");
    }
  } else {
    if (!(low_hz > 0.0 && low_hz < high_hz)) design_error("band-pass edges must satisfy 0 < low < high");
    if (!(high_hz < nyquist)) {
      design_error("band-pass upper edge " + std::to_string(high_hz) + " Hz must be below Nyquist=" +
                   std::to_string(nyquist) + " Hz");
    }
  }
}

std::vector<Biquad> design_butterworth(const FilterSpec& spec, double fs) {
  spec.validate(fs);
  std::vector<Biquad> sos;
  cplx z_ref_inv;
  if (spec.kind == FilterKind::Lowpass) {
    double wc = prewarp(spec.low_hz, fs);
    for (cplx p : prototype_upper_poles(spec.order)) {
      sos.push_back(from_pole(bilinear(p * wc, fs), 1.0, 2.0, 1.0));  // zeros at z = -1
    }
    z_ref_inv = 1.0;  // DC
  } else {
    double w1 = prewarp(spec.low_hz, fs);
    double w2 = prewarp(spec.high_hz, fs);
    double w0 = std::sqrt(w1 * w2);
    double bw = w2 - w1;
    for (cplx p : prototype_upper_poles(spec.order)) {
      // s^2 - p*bw*s + w0^2 = 0 for each prototype pole.
      cplx pb = p * bw;
      cplx disc = std::sqrt(pb * pb - 4.0 * w0 * w0);
      for (cplx s : {0.5 * (pb + disc), 0.5 * (pb - disc)}) {
        cplx zp = bilinear(s, fs);
        if (zp.imag() < 0.0) zp = std::conj(zp);
        sos.push_back(from_pole(zp, 1.0, 0.0, -1.0));  // zeros at z = +1 and z = -1
      }
    }
    // Unity gain at the digital image of the analog centre frequency.
    double f0 = std::atan(w0 / (2.0 * fs)) * fs / kPi;
    z_ref_inv = std::polar(1.0, -2.0 * kPi * f0 / fs);
  }
  cplx h = 1.0;
  for (const auto& s : sos) h *= section_response(s, z_ref_inv);
  double g = 1.0 / std::abs(h);
  sos.front().b0 *= g;
  sos.front().b1 *= g;
  sos.front().b2 *= g;
  return sos;
}

namespace {

// With `settled`, each section starts in the steady state for a constant
// input equal to the first sample, so a step at the boundary does not ring.
std::vector<double> run_cascade(std::span<const Biquad> sos, std::span<const double> x, bool settled) {
  std::vector<double> y(x.begin(), x.end());
  for (const Biquad& s : sos) {
    double z1 = 0.0;
    double z2 = 0.0;
    if (settled && !y.empty()) {
      double in = y.front();
      double out = in * (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
      z2 = s.b2 * in - s.a2 * out;
      z1 = s.b1 * in - s.a1 * out + z2;
    }
    for (double& v : y) {
      double in = v;
      double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

}  // namespace

std::vector<double> sosfilt(std::span<const Biquad> sos, std::span<const double> x) {
  return run_cascade(sos, x, false);
}

std::size_t settling_length(std::span<const Biquad> sos) {
  double r_max = 0.0;
  for (const Biquad& s : sos) r_max = std::max(r_max, std::sqrt(std::max(s.a2, 0.0)));
  if (r_max <= 0.0) return 1;
  return static_cast<std::size_t>(std::ceil(std::log(1e-3) / std::log(r_max)));
}

std::vector<double> filtfilt(std::span<const Biquad> sos, std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  std::size_t pad = std::min(3 * settling_length(sos), n - 1);

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  std::vector<double> fwd = run_cascade(sos, ext, true);
  std::reverse(fwd.begin(), fwd.end());
  std::vector<double> back = run_cascade(sos, fwd, true);
  std::reverse(back.begin(), back.end());
  return {back.begin() + static_cast<std::ptrdiff_t>(pad), back.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

Trace butterworth(const FilterSpec& spec, const Trace& in) {
  in.validate();
  auto sos = design_butterworth(spec, in.sample_rate_hz);
  return {in.sample_rate_hz, filtfilt(sos, in.samples)};
}

Trace envelope(const Trace& in, const EnvelopeOptions& opt) {
  in.validate();
  if (in.samples.empty()) throw Error(ErrorCode::kInvalidArgument, "envelope needs a non-empty trace");
  Trace band = butterworth(FilterSpec::bandpass(opt.band_low_hz, opt.band_high_hz, opt.order), in);
  for (double& v : band.samples) v = std::abs(v);
  return butterworth(FilterSpec::lowpass(opt.lowpass_hz, opt.order), band);
}

Trace mvc_normalize(const Trace& env, double mvc_level) {
  if (!(mvc_level > 0.0)) throw Error(ErrorCode::kDomain, "MVC level must be > 0");
  Trace out = env;
  for (double& v : out.samples) v = 100.0 * v / mvc_level;
  return out;
}

std::vector<TransitionSpan> detect_transitions(std::span<const double> knee, const SegmentOptions& opt) {
  if (!(opt.low_fraction >= 0.0 && opt.low_fraction < opt.high_fraction && opt.high_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "segmentation fractions must satisfy 0 <= low < high <= 1");
  }
  std::vector<TransitionSpan> spans;
  if (knee.size() < 2) return spans;
  auto [mn, mx] = std::minmax_element(knee.begin(), knee.end());
  double range = *mx - *mn;
  if (!(range > 0.0)) return spans;
  double lo = *mn + opt.low_fraction * range;
  double hi = *mn + opt.high_fraction * range;

  enum class Region { Unknown, Standing, Sitting } region = Region::Unknown;
  std::size_t last_low = 0;
  std::size_t last_high = 0;
  for (std::size_t i = 0; i < knee.size(); ++i) {
    double v = knee[i];
    if (v <= lo) {
      if (region == Region::Sitting) spans.push_back({last_high, i, false});
      region = Region::Standing;
      last_low = i;
    } else if (v >= hi) {
      if (region == Region::Standing) spans.push_back({last_low, i, true});
      region = Region::Sitting;
      last_high = i;
    }
  }
  return spans;
}

namespace {

SegmentedCycle average_cycles(std::span<const double> env, const std::vector<TransitionSpan>& spans, bool sitting,
                              int grid_points) {
  SegmentedCycle out;
  const auto g = static_cast<std::size_t>(grid_points);
  out.phase_pct.resize(g);
  for (std::size_t k = 0; k < g; ++k) out.phase_pct[k] = 100.0 * static_cast<double>(k) / static_cast<double>(g - 1);

  std::vector<std::vector<double>> rows;
  for (const auto& s : spans) {
    if (s.sitting != sitting) continue;
    std::vector<double> row(g);
    double len = static_cast<double>(s.end - s.begin);
    for (std::size_t k = 0; k < g; ++k) {
      double pos = static_cast<double>(s.begin) + len * out.phase_pct[k] / 100.0;
      auto i0 = static_cast<std::size_t>(std::floor(pos));
      i0 = std::min(i0, s.end);
      std::size_t i1 = std::min(i0 + 1, s.end);
      double frac = pos - static_cast<double>(i0);
      row[k] = env[i0] + (env[i1] - env[i0]) * frac;
    }
    rows.push_back(std::move(row));
  }
  out.count = static_cast<int>(rows.size());
  out.mean.assign(g, 0.0);
  out.stddev.assign(g, 0.0);
  if (rows.empty()) return out;
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < g; ++k) out.mean[k] += r[k];
  }
  for (double& m : out.mean) m /= static_cast<double>(rows.size());
  if (rows.size() > 1) {
    for (const auto& r : rows) {
      for (std::size_t k = 0; k < g; ++k) out.stddev[k] += (r[k] - out.mean[k]) * (r[k] - out.mean[k]);
    }
    for (double& s : out.stddev) s = std::sqrt(s / static_cast<double>(rows.size() - 1));
  }
  return out;
}

}  // namespace

Segmentation segment_by_transition(const Trace& env, const Trace& knee, const SegmentOptions& opt) {
  env.validate();
  knee.validate();
  if (env.sample_rate_hz != knee.sample_rate_hz || env.samples.size() != knee.samples.size()) {
    throw Error(ErrorCode::kInvalidArgument, "envelope and knee traces must share rate and length");
  }
  if (opt.grid_points < 2) throw Error(ErrorCode::kInvalidArgument, "phase grid needs at least 2 points");
  auto spans = detect_transitions(knee.samples, opt);
  Segmentation seg;
  seg.sitting = average_cycles(env.samples, spans, true, opt.grid_points);
  seg.standing = average_cycles(env.samples, spans, false, opt.grid_points);
  if (seg.sitting.count == 0 || seg.standing.count == 0) {
    throw Error(ErrorCode::kSegmentation,
                std::string("no complete ") + (seg.sitting.count == 0 ? "stand-to-sit" : "sit-to-stand") +
                    " transition found in the knee-angle trace");
  }
  return seg;
}

}  // namespace pamexo::signal
