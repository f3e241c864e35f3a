#include <algorithm>
#include <stdexcept>

#include "vda/dsp/decompose.h"

namespace vda::dsp {

std::vector<std::size_t> detect_spectral_peaks(std::span<const double> mag,
                                               std::span<const BinRange> intervals,
                                               double prominence) {
  if (!(prominence > 0.0 && prominence < 1.0))
    throw std::invalid_argument("detect_spectral_peaks: prominence must lie in (0, 1)");
  std::vector<std::size_t> peaks;
  const std::size_t n = mag.size();
  for (const auto& [first, last_raw] : intervals) {
    const std::size_t last = std::min(last_raw, n);
    if (first >= last) continue;
    const double top = *std::max_element(mag.begin() + first, mag.begin() + last);
    if (!(top > 0.0)) continue;
    const double thr = prominence * top;
    for (std::size_t i = std::max<std::size_t>(first, 1); i < last && i + 1 < n; ++i)
      if (mag[i] > mag[i - 1] && mag[i] >= mag[i + 1] && mag[i] > thr) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end());
  peaks.erase(std::unique(peaks.begin(), peaks.end()), peaks.end());
  return peaks;
}

std::vector<std::vector<double>> merge_peaks(std::vector<double> peaks_hz, int C, MergeStrategy strategy) {
  std::sort(peaks_hz.begin(), peaks_hz.end());
  std::vector<std::vector<double>> groups;
  for (double f : peaks_hz) groups.push_back({f});
  while (groups.size() > static_cast<std::size_t>(std::max(C, 1))) {
    std::size_t at = groups.size() - 2;
    if (strategy == MergeStrategy::kNearestNeighbor) {
      // Smallest gap between adjacent groups; strict < keeps the lowest pair on ties.
      double best = groups[1].front() - groups[0].back();
      at = 0;
      for (std::size_t k = 1; k + 1 < groups.size(); ++k) {
        const double gap = groups[k + 1].front() - groups[k].back();
        if (gap < best) {
          best = gap;
          at = k;
        }
      }
    }
    groups[at].insert(groups[at].end(), groups[at + 1].begin(), groups[at + 1].end());
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(at + 1));
  }
  return groups;
}

}  // namespace vda::dsp
