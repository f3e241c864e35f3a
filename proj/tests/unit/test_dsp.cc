#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "vda/dsp/correlation.h"
#include "vda/dsp/decompose.h"
#include "vda/dsp/fft.h"
#include "vda/dsp/filter.h"
#include "vda/dsp/framing.h"
#include "vda/dsp/mel.h"
#include "vda/dsp/wav.h"

using namespace vda::dsp;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kRate = 16000;

Signal tones(std::initializer_list<double> freqs, std::size_t n, int rate = kRate) {
  Signal s{std::vector<double>(n, 0.0), rate};
  for (std::size_t i = 0; i < n; ++i)
    for (double f : freqs) s.samples[i] += std::sin(2.0 * kPi * f * static_cast<double>(i) / rate);
  return s;
}

Signal noise(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Signal s{std::vector<double>(n), kRate};
  for (auto& v : s.samples) v = nd(rng);
  return s;
}

double energy(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

// Fraction of x's spectral energy within [lo, hi] Hz.
double band_fraction(const std::vector<double>& x, double lo, double hi, int rate = kRate) {
  const auto X = real_fft(x);
  double in = 0.0, all = 0.0;
  for (std::size_t k = 0; k < X.size(); ++k) {
    const double p = std::norm(X[k]);
    const double f = bin_frequency(k, x.size(), rate);
    all += p;
    if (f >= lo && f <= hi) in += p;
  }
  return all > 0.0 ? in / all : 0.0;
}

// Power at the bin of frequency f, summed over +-2 bins to absorb leakage.
double tone_power(const std::vector<double>& x, double f, int rate = kRate) {
  const auto X = real_fft(x);
  const auto k = static_cast<long>(std::lround(f * static_cast<double>(x.size()) / rate));
  double p = 0.0;
  for (long j = k - 2; j <= k + 2; ++j)
    if (j >= 0 && j < static_cast<long>(X.size())) p += std::norm(X[static_cast<std::size_t>(j)]);
  return p;
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

DecompositionConfig fd_cfg(int C) {
  DecompositionConfig c;
  c.method = Method::kFD;
  c.C = C;
  return c;
}

DecompositionConfig ewt_cfg(int C) {
  DecompositionConfig c;
  c.method = Method::kEWT;
  c.C = C;
  return c;
}

}  // namespace

TEST_CASE("real_fft of a constant concentrates at DC") {
  const std::vector<double> x(64, 2.5);
  const auto X = real_fft(x);
  CHECK(std::abs(X[0] - std::complex<double>(160.0, 0.0)) < 1e-12);
  for (std::size_t k = 1; k < X.size(); ++k) CHECK(std::abs(X[k]) < 1e-12);
}

TEST_CASE("real_fft of a bin-centred cosine is nonzero only at that bin") {
  const std::size_t n = 128, k0 = 9;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::cos(2.0 * kPi * k0 * i / n);
  const auto X = real_fft(x);
  for (std::size_t k = 0; k < X.size(); ++k) {
    if (k == k0) CHECK(std::abs(X[k]) == doctest::Approx(n / 2.0).epsilon(1e-12));
    else CHECK(std::abs(X[k]) < 1e-10);
  }
}

TEST_CASE("real_fft round trip") {
  for (std::size_t n : {2u, 7u, 64u, 1000u, 3200u}) {
    const Signal s = noise(n, n);
    const auto back = real_ifft(real_fft(s.samples), n);
    CHECK(rel_l2(back, s.samples) <= 1e-10);
  }
  CHECK_THROWS_AS(real_fft(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(real_ifft(real_fft(std::vector<double>(8, 1.0)), 10), std::invalid_argument);
}

TEST_CASE("spectral peaks") {
  const std::size_t n = 16000;
  SUBCASE("two tones, one peak per interval") {
    const auto mag = magnitude(real_fft(tones({200.0, 2000.0}, n).samples));
    const std::vector<BinRange> iv{{0, 1000}, {1000, 8000}};
    const auto p = detect_spectral_peaks(mag, iv, 0.5);
    REQUIRE(p.size() == 2);
    CHECK(p[0] == 200);
    CHECK(p[1] == 2000);
  }
  SUBCASE("flat spectrum has no peaks") {
    const std::vector<double> mag(500, 1.0);
    const std::vector<BinRange> iv{{0, 250}, {250, 500}};
    CHECK(detect_spectral_peaks(mag, iv, 0.1).empty());
  }
  SUBCASE("single tone, single peak") {
    const auto mag = magnitude(real_fft(tones({1234.0}, n).samples));
    const std::vector<BinRange> iv{{0, mag.size()}};
    const auto p = detect_spectral_peaks(mag, iv, 0.3);
    REQUIRE(p.size() == 1);
    CHECK(p[0] == 1234);
  }
  SUBCASE("empty intervals are skipped") {
    const std::vector<double> mag{0, 1, 0};
    const std::vector<BinRange> iv{{2, 2}, {5, 9}, {0, 3}};
    CHECK(detect_spectral_peaks(mag, iv, 0.5) == std::vector<std::size_t>{1});
  }
  CHECK_THROWS_AS(detect_spectral_peaks(std::vector<double>(4), std::vector<BinRange>{}, 1.5),
                  std::invalid_argument);
}

TEST_CASE("peak merging") {
  SUBCASE("nearest neighbour clusters") {
    const auto g = merge_peaks({700, 730, 760, 1090, 1120, 2440}, 3, MergeStrategy::kNearestNeighbor);
    REQUIRE(g.size() == 3);
    CHECK(g[0] == std::vector<double>{700, 730, 760});
    CHECK(g[1] == std::vector<double>{1090, 1120});
    CHECK(g[2] == std::vector<double>{2440});
  }
  SUBCASE("equidistant peak joins its lower neighbour") {
    const auto g = merge_peaks({100, 200, 300}, 2, MergeStrategy::kNearestNeighbor);
    REQUIRE(g.size() == 2);
    CHECK(g[0] == std::vector<double>{100, 200});
  }
  SUBCASE("high-frequency strategy keeps the low peaks intact") {
    const auto g = merge_peaks({100, 110, 3000, 5000}, 3, MergeStrategy::kHighFrequency);
    REQUIRE(g.size() == 3);
    CHECK(g[0] == std::vector<double>{100});
    CHECK(g[1] == std::vector<double>{110});
    CHECK(g[2] == std::vector<double>{3000, 5000});
  }
}

TEST_CASE("Butterworth magnitude responses") {
  // Reference magnitudes from an independent bilinear-transform design
  // (scipy.signal.butter, sos form) at the listed frequencies.
  const double f[] = {100.0, 250.0, 707.1067811865476, 1000.0, 2000.0, 4000.0};
  struct Case {
    double lo, hi;
    double want[6];
  };
  const Case cases[] = {
      {500, 1000, {1.11156635e-04, 6.80302408e-03, 1.0, 7.07106781e-01, 5.61077148e-03, 1.10069924e-04}},
      {0, 1100, {1.0, 0.99999684, 0.98673211, 0.82864404, 0.07848056, 0.00231739}},
      {1100, 8000, {6.41714525e-05, 2.51346787e-03, 1.62356856e-01, 5.59775903e-01, 9.96915644e-01, 9.99997315e-01}},
      {250, 500, {2.24602452e-03, 7.07106781e-01, 4.85864704e-02, 6.39149087e-03, 2.26182120e-04, 6.05461759e-06}},
  };
  for (const auto& c : cases) {
    const Sos sos = butterworth_band(4, c.lo, c.hi, kRate);
    for (int i = 0; i < 6; ++i) CHECK(sos_gain(sos, f[i], kRate) == doctest::Approx(c.want[i]).epsilon(1e-6));
  }
  CHECK(butterworth_band(4, 0, 8000, kRate).empty());
  CHECK_THROWS_AS(butterworth(3, BandType::kLowpass, 0, 1000, kRate), std::invalid_argument);
  CHECK_THROWS_AS(butterworth(4, BandType::kBandpass, 900, 800, kRate), std::invalid_argument);
}

TEST_CASE("zero-phase filtering matches a reference implementation") {
  // scipy.signal.sosfiltfilt with odd padding of length 27.
  std::vector<double> x(400);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = std::sin(2 * kPi * 300 * i / 16000.0) + 0.1 * std::cos(2 * kPi * 3000 * i / 16000.0);
  const auto y = sos_filtfilt(butterworth(4, BandType::kBandpass, 200, 600, kRate), x);
  const std::size_t idx[] = {0, 1, 50, 199, 398, 399};
  const double want[] = {0.06399828, 0.1664204, -0.36799978, -0.98198572, -0.01654768, -0.05900883};
  for (int i = 0; i < 6; ++i) CHECK(y[idx[i]] == doctest::Approx(want[i]).epsilon(1e-6));
  CHECK_THROWS_AS(sos_filtfilt(butterworth(4, BandType::kBandpass, 200, 600, kRate), std::vector<double>(27)),
                  std::invalid_argument);
}

TEST_CASE("FD separates a two-tone signal") {
  const Signal s = tones({200.0, 2000.0}, 3200);
  const ComponentSet cs = fd_decompose(s, fd_cfg(2));
  REQUIRE(cs.C() == 2);
  CHECK(cs.components[0].size() == s.size());
  const double p200 = tone_power(s.samples, 200.0), p2k = tone_power(s.samples, 2000.0);
  CHECK(tone_power(cs.components[0].samples, 200.0) / p200 >= 0.9);
  CHECK(tone_power(cs.components[1].samples, 2000.0) / p2k >= 0.9);
  CHECK(band_fraction(cs.components[0].samples, 0, cs.bands[0].second) >= 0.9);
  CHECK(band_fraction(cs.components[1].samples, cs.bands[1].first, 8000) >= 0.9);
  CHECK(cs.bands[0].second == doctest::Approx(1100.0));
}

TEST_CASE("FD band purity on octave-separated tones") {
  const Signal s = tones({300.0, 900.0, 3000.0}, 4000);
  const ComponentSet cs = fd_decompose(s, fd_cfg(3));
  REQUIRE(cs.C() == 3);
  const double f[] = {300.0, 900.0, 3000.0};
  for (int t = 0; t < 3; ++t) {
    const double total = tone_power(s.samples, f[t]);
    int owners = 0;
    for (int c = 0; c < 3; ++c)
      if (tone_power(cs.components[c].samples, f[t]) / total >= 0.9) ++owners;
    CHECK(owners == 1);
  }
}

TEST_CASE("FD edge cases") {
  SUBCASE("silence yields zero components") {
    const ComponentSet cs = fd_decompose(Signal{std::vector<double>(1600, 0.0), kRate}, fd_cfg(3));
    REQUIRE(cs.C() == 3);
    for (const auto& c : cs.components) CHECK(energy(c.samples) == 0.0);
  }
  SUBCASE("too few peaks falls back to the widest fixed bands") {
    const ComponentSet cs = fd_decompose(tones({440.0}, 3200), fd_cfg(3));
    REQUIRE(cs.bands.size() == 3);
    CHECK(cs.bands[0] == std::pair<double, double>{1000, 2000});
    CHECK(cs.bands[1] == std::pair<double, double>{2000, 4000});
    CHECK(cs.bands[2] == std::pair<double, double>{4000, 8000});
  }
  SUBCASE("signal shorter than the warm-up is rejected") {
    CHECK_THROWS_AS(fd_decompose(tones({440.0}, 20), fd_cfg(2)), std::invalid_argument);
  }
  SUBCASE("config validation") {
    auto c = fd_cfg(1);
    CHECK_THROWS_AS(fd_decompose(tones({440.0}, 3200), c), std::invalid_argument);
    c = fd_cfg(3);
    c.fd_band_edges = {0, 500, 400, 8000};
    CHECK_THROWS_AS(fd_decompose(tones({440.0}, 3200), c), std::invalid_argument);
    CHECK_THROWS_AS(fd_decompose(tones({440.0}, 3200), ewt_cfg(2)), std::invalid_argument);
  }
  SUBCASE("deterministic") {
    const Signal s = noise(5, 3200);
    CHECK(fd_decompose(s, fd_cfg(3)).components[1].samples == fd_decompose(s, fd_cfg(3)).components[1].samples);
  }
}

TEST_CASE("EWT filter bank is a partition of unity") {
  const std::vector<double> w{0.3, 0.9, 2.0};
  const auto bank = ewt_filter_bank(w, 1024, 0.1);
  REQUIRE(bank.size() == 4);
  for (std::size_t b = 0; b < bank[0].size(); ++b) {
    double s = 0.0;
    for (const auto& f : bank) s += f[b] * f[b];
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("EWT reconstructs random signals") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Signal s = noise(seed, 512 + 37 * (seed % 11));
    const ComponentSet cs = ewt_decompose(s, ewt_cfg(2 + static_cast<int>(seed % 4)));
    std::vector<double> sum(s.size(), 0.0);
    for (const auto& c : cs.components)
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += c.samples[i];
    CHECK(rel_l2(sum, s.samples) <= 1e-6);
  }
}

TEST_CASE("EWT separates two tones") {
  const Signal s = tones({200.0, 2000.0}, 3200);
  const ComponentSet cs = ewt_decompose(s, ewt_cfg(2));
  REQUIRE(cs.C() == 2);
  CHECK(tone_power(cs.components[0].samples, 200.0) / tone_power(s.samples, 200.0) > 0.99);
  CHECK(tone_power(cs.components[1].samples, 2000.0) / tone_power(s.samples, 2000.0) > 0.99);
  CHECK(band_fraction(cs.components[0].samples, 0, cs.bands[0].second) > 0.99);
  CHECK(band_fraction(cs.components[1].samples, cs.bands[1].first, 8000) > 0.99);
  const auto r = component_correlation_matrix(cs);
  CHECK(std::abs(r.at(1, 2)) <= 0.05);
}

TEST_CASE("EWT falls back to equal-width segments without maxima") {
  const ComponentSet cs = ewt_decompose(Signal{std::vector<double>(256, 1.0), kRate}, ewt_cfg(4));
  REQUIRE(cs.bands.size() == 4);
  CHECK(cs.bands[1].first == doctest::Approx(2000.0));
  CHECK(cs.bands[2].first == doctest::Approx(4000.0));
  CHECK(cs.bands[3].first == doctest::Approx(6000.0));
}

TEST_CASE("framing") {
  SUBCASE("4 s in 200 ms frames") {
    const auto f = frame_sequence(noise(1, 64000), 200, 200);
    REQUIRE(f.size() == 20);
    for (const auto& x : f) CHECK(x.size() == 3200);
  }
  SUBCASE("short signal gives one zero-padded frame") {
    const Signal s = noise(2, 1000);
    const auto f = frame_sequence(s, 200, 200);
    REQUIRE(f.size() == 1);
    CHECK(f[0].size() == 3200);
    CHECK(f[0].samples[999] == s.samples[999]);
    CHECK(f[0].samples[1000] == 0.0);
  }
  SUBCASE("frame equal to the signal") {
    const Signal s = noise(3, 3200);
    const auto f = frame_sequence(s, 200, 200);
    REQUIRE(f.size() == 1);
    CHECK(f[0].samples == s.samples);
  }
  SUBCASE("partial last frame") {
    const auto f = frame_sequence(noise(4, 3300), 200, 200);
    REQUIRE(f.size() == 2);
    CHECK(f[1].samples[100] == 0.0);
  }
  CHECK_THROWS_AS(frame_sequence(noise(1, 10), 0, 200), std::invalid_argument);
  CHECK_THROWS_AS(frame_sequence(noise(1, 10), -5, 200), std::invalid_argument);
}

TEST_CASE("Mel features") {
  SUBCASE("1 kHz tone peaks at the nearest filter centre") {
    const auto mf = mel_features(tones({1000.0}, 3200), 80);
    CHECK(mf.rows == 18);
    CHECK(mf.M == 80);
    const auto centers = mel_centers(80, kRate);
    std::size_t nearest = 0;
    for (std::size_t m = 1; m < 80; ++m)
      if (std::abs(centers[m] - 1000.0) < std::abs(centers[nearest] - 1000.0)) nearest = m;
    for (std::size_t r = 0; r < mf.rows; ++r) {
      std::size_t arg = 0;
      for (std::size_t m = 1; m < 80; ++m)
        if (mf.at(r, m) > mf.at(r, arg)) arg = m;
      CHECK(arg == nearest);
    }
  }
  SUBCASE("silence hits the floor") {
    const auto mf = mel_features(Signal{std::vector<double>(3200, 0.0), kRate}, 80);
    for (double v : mf.data) CHECK(v == std::log(kMelFloor));
  }
  SUBCASE("doubling amplitude adds log 4") {
    Signal s = noise(9, 3200);
    const auto a = mel_features(s, 40);
    for (double& v : s.samples) v *= 2.0;
    const auto b = mel_features(s, 40);
    for (std::size_t i = 0; i < a.data.size(); ++i) {
      if (a.data[i] <= std::log(kMelFloor) + 1.0) continue;
      CHECK(b.data[i] - a.data[i] == doctest::Approx(std::log(4.0)).epsilon(1e-9));
    }
  }
  SUBCASE("framing then Mel equals Mel of the frame") {
    const Signal s = noise(10, 16000);
    const auto frames = frame_sequence(s, 200, 200);
    Signal third{std::vector<double>(s.samples.begin() + 6400, s.samples.begin() + 9600), kRate};
    CHECK(mel_features(frames[2], 80).data == mel_features(third, 80).data);
  }
  SUBCASE("no non-finite entries") {
    Signal s = noise(11, 3200);
    s.samples[100] = 1e6;
    for (double v : mel_features(s, 80).data) CHECK(std::isfinite(v));
  }
  CHECK(hz_to_mel(mel_to_hz(1234.5)) == doctest::Approx(1234.5));
  CHECK_THROWS_AS(mel_features(noise(1, 400), 0), std::invalid_argument);
}

TEST_CASE("component correlation matrix") {
  SUBCASE("identical components") {
    ComponentSet cs;
    cs.original = noise(1, 500);
    cs.components = {cs.original, cs.original};
    const auto r = component_correlation_matrix(cs);
    REQUIRE(r.n == 3);
    CHECK(r.at(0, 1) == doctest::Approx(1.0));
    CHECK(r.at(1, 2) == doctest::Approx(1.0));
    CHECK_FALSE(r.zero_variance);
  }
  SUBCASE("orthogonal Fourier modes") {
    ComponentSet cs;
    const std::size_t n = 1000;
    cs.original = Signal{std::vector<double>(n), kRate};
    Signal a{std::vector<double>(n), kRate}, b{std::vector<double>(n), kRate};
    for (std::size_t i = 0; i < n; ++i) {
      a.samples[i] = std::cos(2 * kPi * 5 * i / n);
      b.samples[i] = std::cos(2 * kPi * 17 * i / n);
      cs.original.samples[i] = a.samples[i] + 0.5 * b.samples[i];
    }
    cs.components = {a, b};
    const auto r = component_correlation_matrix(cs);
    CHECK(std::abs(r.at(1, 2)) <= 1e-6);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(r.at(i, i) == 1.0);
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK(r.at(i, j) == r.at(j, i));
        CHECK(std::abs(r.at(i, j)) <= 1.0);
      }
    }
  }
  SUBCASE("zero-variance component is flagged") {
    ComponentSet cs;
    cs.original = noise(2, 200);
    cs.components = {Signal{std::vector<double>(200, 0.3), kRate}, cs.original};
    const auto r = component_correlation_matrix(cs);
    CHECK(r.zero_variance);
    CHECK(r.at(0, 1) == 0.0);
    CHECK(r.at(1, 1) == 1.0);
  }
}

TEST_CASE("WAV round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "vda_test_dsp_wav";
  std::filesystem::create_directories(dir);
  Signal s = noise(3, 800);
  for (double& v : s.samples) v *= 0.2;
  write_wav((dir / "mono.wav").string(), s);
  const Signal back = read_wav((dir / "mono.wav").string());
  REQUIRE(back.size() == s.size());
  CHECK(back.sample_rate == kRate);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(back.samples[i] - s.samples[i]) <= 0.5 / 32767 + 1e-12);

  const ComponentSet cs = fd_decompose(tones({200.0, 2000.0}, 1600), fd_cfg(2));
  write_component_wav((dir / "comp.wav").string(), cs);
  const auto ch = read_wav_channels((dir / "comp.wav").string());
  REQUIRE(ch.size() == 3);
  CHECK(std::abs(ch[0].samples[10] - std::clamp(cs.original.samples[10], -1.0, 1.0)) <= 1.0 / 32767);
  CHECK(std::abs(ch[2].samples[10] - cs.components[1].samples[10]) <= 1.0 / 32767);
  CHECK_THROWS(read_wav((dir / "comp.wav").string()));
  CHECK_THROWS(read_wav((dir / "missing.wav").string()));
  std::filesystem::remove_all(dir);
}
