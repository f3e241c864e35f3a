#include "vda/dsp/mel.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "vda/dsp/fft.h"
#include "vda/dsp/framing.h"
#include "vda/kernels.h"

namespace vda::dsp {
namespace {

constexpr double kWinMs = 25.0;
constexpr double kHopMs = 10.0;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

struct Bank {
  std::size_t nfft = 0;
  std::vector<double> weights;  // M x (nfft/2+1)
  std::vector<double> window;
};

const Bank& bank_for(std::size_t M, int sample_rate) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, int>, Bank> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({M, sample_rate});
  if (it != cache.end()) return it->second;

  Bank b;
  const std::size_t win = frame_length_samples(kWinMs, sample_rate);
  b.nfft = next_pow2(win);
  b.window = hann_window(win);
  const std::size_t nb = b.nfft / 2 + 1;
  const double top = hz_to_mel(sample_rate / 2.0);
  std::vector<double> pts(M + 2);
  for (std::size_t i = 0; i < M + 2; ++i) pts[i] = mel_to_hz(top * static_cast<double>(i) / static_cast<double>(M + 1));
  b.weights.assign(M * nb, 0.0);
  for (std::size_t m = 0; m < M; ++m) {
    const double lo = pts[m], c = pts[m + 1], hi = pts[m + 2];
    for (std::size_t k = 0; k < nb; ++k) {
      const double f = bin_frequency(k, b.nfft, sample_rate);
      double w = 0.0;
      if (f > lo && f <= c) w = (f - lo) / (c - lo);
      else if (f > c && f < hi) w = (hi - f) / (hi - c);
      b.weights[m * nb + k] = w;
    }
  }
  return cache.emplace(std::make_pair(M, sample_rate), std::move(b)).first->second;
}

}  // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> mel_centers(std::size_t M, int sample_rate) {
  const double top = hz_to_mel(sample_rate / 2.0);
  std::vector<double> c(M);
  for (std::size_t m = 0; m < M; ++m) c[m] = mel_to_hz(top * static_cast<double>(m + 1) / static_cast<double>(M + 1));
  return c;
}

std::size_t mel_rows(std::size_t n, int sample_rate) {
  const std::size_t win = frame_length_samples(kWinMs, sample_rate);
  const std::size_t hop = frame_length_samples(kHopMs, sample_rate);
  return n <= win ? 1 : 1 + (n - win) / hop;
}

MelFrames mel_features(const Signal& frame, std::size_t M) {
  if (M < 1) throw std::invalid_argument("mel_features: M must be >= 1");
  if (frame.sample_rate <= 0) throw std::invalid_argument("mel_features: sample rate must be positive");
  const Bank& bank = bank_for(M, frame.sample_rate);
  const std::size_t win = bank.window.size();
  const std::size_t hop = frame_length_samples(kHopMs, frame.sample_rate);
  const std::size_t nb = bank.nfft / 2 + 1;

  MelFrames out;
  out.M = M;
  out.rows = mel_rows(frame.size(), frame.sample_rate);
  out.frame_length_ms = kWinMs;
  out.hop_ms = kHopMs;
  out.data.assign(out.rows * M, 0.0);
  std::vector<double> buf(bank.nfft), power(nb);
  for (std::size_t r = 0; r < out.rows; ++r) {
    std::fill(buf.begin(), buf.end(), 0.0);
    const std::size_t start = r * hop;
    for (std::size_t i = 0; i < win && start + i < frame.size(); ++i) buf[i] = frame.samples[start + i] * bank.window[i];
    const Spectrum X = real_fft(buf);
    for (std::size_t k = 0; k < nb; ++k) power[k] = std::norm(X[k]);
    for (std::size_t m = 0; m < M; ++m) {
      const double e = kernels::dot(&bank.weights[m * nb], power.data(), nb);
      out.data[r * M + m] = std::log(std::max(e, kMelFloor));
    }
  }
  return out;
}

}  // namespace vda::dsp
