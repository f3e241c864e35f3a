#pragma once

#include <array>
#include <span>
#include <vector>

namespace vda::dsp {

// One biquad, b0..b2 / 1 a1 a2.
struct Biquad {
  std::array<double, 3> b;
  std::array<double, 2> a;
};

using Sos = std::vector<Biquad>;

enum class BandType { kLowpass, kHighpass, kBandpass };

// Digital Butterworth design via the bilinear transform. `order` is the
// prototype order and must be even; band-pass designs have 2*order poles.
Sos butterworth(int order, BandType type, double lo_hz, double hi_hz, int sample_rate);

// Sections for a band [lo, hi]: low-pass if lo <= 0, high-pass if hi >= Nyquist.
// Returns an empty cascade when the band covers the whole spectrum.
Sos butterworth_band(int order, double lo_hz, double hi_hz, int sample_rate);

std::vector<double> sos_filter(const Sos& sos, std::span<const double> x);

// Odd-extension padding length used by sos_filtfilt.
std::size_t filtfilt_padlen(const Sos& sos);

// Zero-phase forward-backward filtering with steady-state initial conditions.
// Throws if x is not longer than filtfilt_padlen(sos).
std::vector<double> sos_filtfilt(const Sos& sos, std::span<const double> x);

// |H(e^{i 2 pi f / fs})|
double sos_gain(const Sos& sos, double freq_hz, int sample_rate);

}  // namespace vda::dsp
