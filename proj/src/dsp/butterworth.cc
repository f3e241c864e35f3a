#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "vda/dsp/filter.h"

namespace vda::dsp {
namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// Frequency response of the cascade at normalized angle w.
cd response(const Sos& sos, double w) {
  const cd z1 = std::polar(1.0, -w);
  const cd z2 = z1 * z1;
  cd h = 1.0;
  for (const auto& s : sos) h *= (s.b[0] + s.b[1] * z1 + s.b[2] * z2) / (1.0 + s.a[0] * z1 + s.a[1] * z2);
  return h;
}

}  // namespace

Sos butterworth(int order, BandType type, double lo_hz, double hi_hz, int sample_rate) {
  if (order < 2 || order % 2 != 0) throw std::invalid_argument("butterworth: order must be even and >= 2");
  const double nyq = sample_rate / 2.0;
  const double fs2 = 2.0 * sample_rate;
  auto warp = [&](double f) {
    if (!(f > 0.0 && f < nyq))
      throw std::invalid_argument("butterworth: cutoff " + std::to_string(f) + " Hz outside (0, Nyquist)");
    return fs2 * std::tan(kPi * f / sample_rate);
  };

  std::vector<cd> proto;
  for (int k = 0; k < order; ++k) proto.push_back(std::polar(1.0, kPi * (2.0 * k + order + 1) / (2.0 * order)));

  std::vector<cd> poles;
  std::array<double, 3> section_b{};
  double ref_w = 0.0;
  switch (type) {
    case BandType::kLowpass: {
      const double wc = warp(hi_hz);
      for (const cd& p : proto) poles.push_back(p * wc);
      section_b = {1.0, 2.0, 1.0};
      ref_w = 0.0;
      break;
    }
    case BandType::kHighpass: {
      const double wc = warp(lo_hz);
      for (const cd& p : proto) poles.push_back(wc / p);
      section_b = {1.0, -2.0, 1.0};
      ref_w = kPi;
      break;
    }
    case BandType::kBandpass: {
      if (!(lo_hz < hi_hz)) throw std::invalid_argument("butterworth: band-pass needs lo < hi");
      const double wl = warp(lo_hz), wh = warp(hi_hz);
      const double bw = wh - wl, w0 = std::sqrt(wl * wh);
      for (const cd& p : proto) {
        const cd a = p * bw / 2.0;
        const cd d = std::sqrt(a * a - w0 * w0);
        poles.push_back(a + d);
        poles.push_back(a - d);
      }
      section_b = {1.0, 0.0, -1.0};
      ref_w = 2.0 * std::atan(w0 / fs2);
      break;
    }
  }

  // Bilinear map, then group conjugate pairs into sections.
  std::vector<cd> zp;
  for (const cd& p : poles) zp.push_back((fs2 + p) / (fs2 - p));
  std::vector<cd> upper;
  for (const cd& z : zp)
    if (z.imag() > 0.0) upper.push_back(z);
  if (upper.size() * 2 != zp.size()) throw std::logic_error("butterworth: unpaired real pole");
  std::sort(upper.begin(), upper.end(), [](const cd& x, const cd& y) { return std::abs(x) < std::abs(y); });

  Sos sos;
  for (const cd& z : upper) sos.push_back({section_b, {-2.0 * z.real(), std::norm(z)}});
  const double g = std::abs(response(sos, ref_w));
  for (double& c : sos[0].b) c /= g;
  return sos;
}

Sos butterworth_band(int order, double lo_hz, double hi_hz, int sample_rate) {
  const double nyq = sample_rate / 2.0;
  const bool low_open = lo_hz <= 0.0, high_open = hi_hz >= nyq;
  if (low_open && high_open) return {};
  if (low_open) return butterworth(order, BandType::kLowpass, 0.0, hi_hz, sample_rate);
  if (high_open) return butterworth(order, BandType::kHighpass, lo_hz, 0.0, sample_rate);
  return butterworth(order, BandType::kBandpass, lo_hz, hi_hz, sample_rate);
}

double sos_gain(const Sos& sos, double freq_hz, int sample_rate) {
  return std::abs(response(sos, 2.0 * kPi * freq_hz / sample_rate));
}

}  // namespace vda::dsp
