#pragma once

#include <span>
#include <vector>

namespace pamexo::signal {

struct Trace {
  double sample_rate_hz = 0.0;
  std::vector<double> samples;

  void validate() const;
};

enum class FilterKind { Lowpass, Bandpass };

struct FilterSpec {
  FilterKind kind = FilterKind::Lowpass;
  int order = 4;
  double low_hz = 0.0;   // lowpass: cutoff
  double high_hz = 0.0;  // bandpass: upper edge

  static FilterSpec lowpass(double cutoff_hz, int order = 4) { return {FilterKind::Lowpass, order, cutoff_hz, 0.0}; }
  static FilterSpec bandpass(double low_hz, double high_hz, int order = 4) {
    return {FilterKind::Bandpass, order, low_hz, high_hz};
  }
  /// Throws kFilterDesign when an edge reaches Nyquist or the order is odd.
  void validate(double sample_rate_hz) const;
};

/// Second-order section, a0 normalised to 1.
struct Biquad {
  double b0, b1, b2, a1, a2;
};

/// Digital Butterworth by bilinear transform with pre-warped edges. A
/// bandpass of order N has N sections (2N poles).
std::vector<Biquad> design_butterworth(const FilterSpec& spec, double sample_rate_hz);

/// Single forward pass through the cascade, zero initial state.
std::vector<double> sosfilt(std::span<const Biquad> sos, std::span<const double> x);

/// Samples for the slowest pole to decay to 1e-3.
std::size_t settling_length(std::span<const Biquad> sos);

/// Forward-backward application with odd-reflection padding of three
/// settling lengths (clipped to the signal length). Each pass starts from the
/// steady state of its first sample.
std::vector<double> filtfilt(std::span<const Biquad> sos, std::span<const double> x);

Trace butterworth(const FilterSpec& spec, const Trace& in);

struct EnvelopeOptions {
  double band_low_hz = 20.0;
  double band_high_hz = 400.0;
  double lowpass_hz = 5.0;
  int order = 4;
};

/// Band-pass, full-wave rectify, low-pass.
Trace envelope(const Trace& in, const EnvelopeOptions& opt = {});

/// Percent of the maximum-voluntary-contraction level.
Trace mvc_normalize(const Trace& env, double mvc_level);

struct SegmentOptions {
  /// Standing / sitting thresholds as fractions of the knee-angle excursion.
  double low_fraction = 0.10;
  double high_fraction = 0.90;
  int grid_points = 101;
};

struct SegmentedCycle {
  std::vector<double> phase_pct;
  std::vector<double> mean;
  std::vector<double> stddev;
  int count = 0;
};

struct Segmentation {
  SegmentedCycle sitting;   // stand-to-sit, 0 % standing -> 100 % seated
  SegmentedCycle standing;  // sit-to-stand, 0 % seated -> 100 % standing
};

/// Index intervals [begin, end] of the detected transitions.
struct TransitionSpan {
  std::size_t begin;
  std::size_t end;
  bool sitting;
};

std::vector<TransitionSpan> detect_transitions(std::span<const double> knee_deg, const SegmentOptions& opt = {});

Segmentation segment_by_transition(const Trace& env, const Trace& knee_deg, const SegmentOptions& opt = {});

}  // namespace pamexo::signal
