#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vda/dsp/decompose.h"
#include "vda/dsp/fft.h"

namespace vda::dsp {
namespace {

constexpr double kPi = std::numbers::pi;

double meyer_beta(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * x * x * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x);
}

}  // namespace

std::vector<std::vector<double>> ewt_filter_bank(std::span<const double> w, std::size_t n, double gamma) {
  const std::size_t nb = n / 2 + 1;
  const std::size_t segments = w.size() + 1;
  // Transition widths gamma*w_k must not overlap between neighbours or past pi.
  double g = gamma;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double next = k + 1 < w.size() ? w[k + 1] : kPi;
    g = std::min(g, (next - w[k]) / (next + w[k]));
  }
  std::vector<std::vector<double>> bank(segments, std::vector<double>(nb, 0.0));
  for (std::size_t b = 0; b < nb; ++b) {
    const double om = 2.0 * kPi * static_cast<double>(b) / static_cast<double>(n);
    for (std::size_t s = 0; s < segments; ++s) {
      double v = 1.0;
      if (s > 0) {  // rising edge around w[s-1]
        const double lo = w[s - 1];
        if (om <= (1.0 - g) * lo) v = 0.0;
        else if (om < (1.0 + g) * lo) v = std::sin(0.5 * kPi * meyer_beta((om - (1.0 - g) * lo) / (2.0 * g * lo)));
      }
      if (s + 1 < segments) {  // falling edge around w[s]
        const double hi = w[s];
        if (om >= (1.0 + g) * hi) v = 0.0;
        else if (om > (1.0 - g) * hi) v *= std::cos(0.5 * kPi * meyer_beta((om - (1.0 - g) * hi) / (2.0 * g * hi)));
      }
      bank[s][b] = v;
    }
  }
  return bank;
}

ComponentSet ewt_decompose(const Signal& s, const DecompositionConfig& cfg) {
  if (cfg.method != Method::kEWT) throw std::invalid_argument("ewt_decompose: config method is not EWT");
  validate(s);
  validate(cfg, s.sample_rate);
  const std::size_t n = s.size();
  if (n < 2) throw std::invalid_argument("ewt_decompose: signal needs at least 2 samples");
  const std::size_t C = static_cast<std::size_t>(cfg.C);
  const Spectrum X = real_fft(s.samples);
  const std::vector<double> mag = magnitude(X);

  // The C largest maxima define C-1 midpoint boundaries; relax the
  // prominence before giving up on an adaptive segmentation.
  const BinRange whole{0, mag.size()};
  std::vector<std::size_t> peaks;
  for (double prom = cfg.peak_prominence; prom > 1e-6 && peaks.size() < C; prom *= 0.5)
    peaks = detect_spectral_peaks(mag, std::span<const BinRange>(&whole, 1), prom);

  std::vector<double> bounds;
  if (peaks.size() >= C) {
    std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return mag[a] > mag[b]; });
    peaks.resize(C);
    std::sort(peaks.begin(), peaks.end());
    for (std::size_t k = 0; k + 1 < C; ++k)
      bounds.push_back(kPi * static_cast<double>(peaks[k] + peaks[k + 1]) / static_cast<double>(n));
  } else {
    for (std::size_t k = 1; k < C; ++k) bounds.push_back(kPi * static_cast<double>(k) / static_cast<double>(C));
  }

  const auto bank = ewt_filter_bank(bounds, n, cfg.ewt_gamma);
  ComponentSet cs;
  cs.original = s;
  const double to_hz = s.sample_rate / (2.0 * kPi);
  for (std::size_t c = 0; c < C; ++c) {
    Spectrum Y = X;
    for (std::size_t b = 0; b < Y.size(); ++b) Y[b] *= bank[c][b] * bank[c][b];
    cs.components.push_back({real_ifft(Y, n), s.sample_rate});
    cs.bands.push_back({c == 0 ? 0.0 : bounds[c - 1] * to_hz, c + 1 < C ? bounds[c] * to_hz : s.sample_rate / 2.0});
  }
  return cs;
}

}  // namespace vda::dsp
