#pragma once

#include <cstddef>
#include <vector>

#include "vda/dsp/signal.h"

namespace vda::dsp {

inline constexpr double kMelFloor = 1e-10;

struct MelFrames {
  std::size_t rows = 0;  // sub-windows
  std::size_t M = 0;
  std::vector<double> data;  // rows x M, row-major
  double frame_length_ms = 25.0;
  double hop_ms = 10.0;

  double at(std::size_t r, std::size_t m) const { return data[r * M + m]; }
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Center frequencies (Hz) of the M triangular filters.
std::vector<double> mel_centers(std::size_t M, int sample_rate);

// Log-Mel energies of Hann-windowed 25 ms sub-windows every 10 ms.
MelFrames mel_features(const Signal& frame, std::size_t M = 80);

// Number of sub-window rows mel_features produces for n samples.
std::size_t mel_rows(std::size_t n, int sample_rate);

}  // namespace vda::dsp
