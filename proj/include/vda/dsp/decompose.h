#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "vda/dsp/signal.h"

namespace vda::dsp {

using BinRange = std::pair<std::size_t, std::size_t>;  // half-open [first, last)

// Local maxima inside each interval whose magnitude exceeds
// prominence * (interval max). Array endpoints never qualify; empty
// intervals are skipped. Result is sorted by bin.
std::vector<std::size_t> detect_spectral_peaks(std::span<const double> magnitude,
                                               std::span<const BinRange> intervals,
                                               double prominence);

ComponentSet fd_decompose(const Signal& s, const DecompositionConfig& cfg);
ComponentSet ewt_decompose(const Signal& s, const DecompositionConfig& cfg);
ComponentSet decompose(const Signal& s, const DecompositionConfig& cfg);

// Peak frequencies (Hz) grouped down to at most C groups by the given strategy.
// Groups are returned low to high; each holds its member frequencies.
std::vector<std::vector<double>> merge_peaks(std::vector<double> peaks_hz, int C,
                                             MergeStrategy strategy);

// Meyer-type EWT filter bank on [0, pi] sampled at n/2+1 rfft bins.
// boundaries are in radians, strictly increasing inside (0, pi).
std::vector<std::vector<double>> ewt_filter_bank(std::span<const double> boundaries,
                                                 std::size_t n, double gamma);

}  // namespace vda::dsp
