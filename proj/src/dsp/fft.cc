#include "vda/dsp/fft.h"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace vda::dsp {
namespace {

// FFTW planning is not thread-safe; plans are created once per size under a
// lock and executed through the new-array interface on fftw_malloc buffers,
// which share the alignment the plans were made with.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

std::mutex g_plan_mutex;
std::map<std::size_t, PlanPair> g_plans;

template <typename T>
struct FftwDeleter {
  void operator()(T* p) const { fftw_free(p); }
};
template <typename T>
using FftwBuf = std::unique_ptr<T, FftwDeleter<T>>;

template <typename T>
FftwBuf<T> alloc(std::size_t n) {
  T* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (!p) throw std::bad_alloc();
  return FftwBuf<T>(p);
}

const PlanPair& plans_for(std::size_t n) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto it = g_plans.find(n);
  if (it != g_plans.end()) return it->second;
  auto in = alloc<double>(n);
  auto out = alloc<fftw_complex>(n / 2 + 1);
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
  p.backward = fftw_plan_dft_c2r_1d(static_cast<int>(n), out.get(), in.get(), FFTW_ESTIMATE);
  if (!p.forward || !p.backward) throw std::runtime_error("FFTW plan creation failed");
  return g_plans.emplace(n, p).first->second;
}

}  // namespace

Spectrum real_fft(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("real_fft: empty input");
  const std::size_t n = x.size();
  const PlanPair& p = plans_for(n);
  auto in = alloc<double>(n);
  auto out = alloc<fftw_complex>(n / 2 + 1);
  std::memcpy(in.get(), x.data(), n * sizeof(double));
  fftw_execute_dft_r2c(p.forward, in.get(), out.get());
  Spectrum s(n / 2 + 1);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = {out.get()[k][0], out.get()[k][1]};
  return s;
}

std::vector<double> real_ifft(std::span<const std::complex<double>> spectrum, std::size_t n) {
  if (n == 0 || spectrum.empty()) throw std::invalid_argument("real_ifft: empty input");
  if (spectrum.size() != n / 2 + 1)
    throw std::invalid_argument("real_ifft: spectrum length does not match n/2+1");
  const PlanPair& p = plans_for(n);
  auto in = alloc<fftw_complex>(n / 2 + 1);
  auto out = alloc<double>(n);
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    in.get()[k][0] = spectrum[k].real();
    in.get()[k][1] = spectrum[k].imag();
  }
  fftw_execute_dft_c2r(p.backward, in.get(), out.get());
  std::vector<double> x(out.get(), out.get() + n);
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : x) v *= scale;
  return x;
}

std::vector<double> magnitude(const Spectrum& s) {
  std::vector<double> m(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) m[k] = std::abs(s[k]);
  return m;
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  // Periodic form, as used for spectral analysis frames.
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  return w;
}

}  // namespace vda::dsp
