#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vda/dsp/decompose.h"
#include "vda/dsp/fft.h"
#include "vda/dsp/filter.h"

namespace vda::dsp {
namespace {

constexpr int kFdOrder = 4;
// Peaks below this fraction of the global spectral maximum are treated as
// noise, whatever their prominence inside a quiet interval.
constexpr double kGlobalFloor = 1e-2;

std::vector<std::pair<double, double>> widest_fixed_bands(const std::vector<double>& edges, int C) {
  std::vector<std::pair<double, double>> bands;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) bands.push_back({edges[k], edges[k + 1]});
  std::stable_sort(bands.begin(), bands.end(), [](const auto& a, const auto& b) {
    return a.second - a.first > b.second - b.first;
  });
  bands.resize(static_cast<std::size_t>(C));
  std::sort(bands.begin(), bands.end());
  return bands;
}

}  // namespace

ComponentSet fd_decompose(const Signal& s, const DecompositionConfig& cfg) {
  if (cfg.method != Method::kFD) throw std::invalid_argument("fd_decompose: config method is not FD");
  validate(s);
  validate(cfg, s.sample_rate);
  const std::size_t warmup = filtfilt_padlen(Sos(kFdOrder)) + 1;
  if (s.size() < warmup)
    throw std::invalid_argument("fd_decompose: signal of " + std::to_string(s.size()) +
                                " samples is shorter than the filter warm-up of " + std::to_string(warmup));

  const std::size_t n = s.size();
  const double nyq = s.sample_rate / 2.0;
  std::vector<double> windowed = hann_window(n);
  for (std::size_t i = 0; i < n; ++i) windowed[i] *= s.samples[i];
  const std::vector<double> mag = magnitude(real_fft(windowed));
  const double hz_per_bin = static_cast<double>(s.sample_rate) / static_cast<double>(n);

  std::vector<BinRange> intervals;
  for (std::size_t k = 0; k + 1 < cfg.fd_band_edges.size(); ++k)
    intervals.push_back({static_cast<std::size_t>(std::ceil(cfg.fd_band_edges[k] / hz_per_bin)),
                         static_cast<std::size_t>(std::ceil(cfg.fd_band_edges[k + 1] / hz_per_bin))});
  const double global_max = *std::max_element(mag.begin(), mag.end());
  std::vector<double> peaks_hz;
  for (std::size_t b : detect_spectral_peaks(mag, intervals, cfg.peak_prominence))
    if (mag[b] >= kGlobalFloor * global_max) peaks_hz.push_back(static_cast<double>(b) * hz_per_bin);

  ComponentSet cs;
  cs.original = s;
  if (peaks_hz.size() < static_cast<std::size_t>(cfg.C)) {
    cs.bands = widest_fixed_bands(cfg.fd_band_edges, cfg.C);
  } else {
    const auto groups = merge_peaks(peaks_hz, cfg.C, cfg.merge_strategy);
    double lo = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const double hi = g + 1 < groups.size() ? 0.5 * (groups[g].back() + groups[g + 1].front()) : nyq;
      cs.bands.push_back({lo, hi});
      lo = hi;
    }
  }
  for (const auto& [lo, hi] : cs.bands) {
    const Sos sos = butterworth_band(kFdOrder, lo, hi, s.sample_rate);
    cs.components.push_back({sos_filtfilt(sos, s.samples), s.sample_rate});
  }
  return cs;
}

ComponentSet decompose(const Signal& s, const DecompositionConfig& cfg) {
  return cfg.method == Method::kFD ? fd_decompose(s, cfg) : ewt_decompose(s, cfg);
}

}  // namespace vda::dsp
