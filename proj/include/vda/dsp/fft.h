#pragma once

#include <complex>
#include <span>
#include <vector>

namespace vda::dsp {

using Spectrum = std::vector<std::complex<double>>;

// Unnormalized forward transform of a real sequence; returns n/2+1 bins.
Spectrum real_fft(std::span<const double> x);

// Inverse of real_fft for a length-n sequence (includes the 1/n factor).
std::vector<double> real_ifft(std::span<const std::complex<double>> spectrum, std::size_t n);

std::vector<double> magnitude(const Spectrum& s);

// Frequency in Hz of bin k for an n-point transform.
inline double bin_frequency(std::size_t k, std::size_t n, int sample_rate) {
  return static_cast<double>(k) * sample_rate / static_cast<double>(n);
}

std::vector<double> hann_window(std::size_t n);

}  // namespace vda::dsp
