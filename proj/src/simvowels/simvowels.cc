#include "vda/simvowels/simvowels.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "vda/dsp/framing.h"
#include "vda/dsp/wav.h"

namespace vda::sim {
namespace {

namespace fs = std::filesystem;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kVoicingDepth = 0.5;
constexpr double kNoiseDb = -40.0;
constexpr double kPeak = 0.9;

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

const char* kHeader = "path,split,speaker_id,sec0,sec1,sec2,sec3";

}  // namespace

const std::array<VowelSpec, kNumVowels>& vowel_table() {
  static const std::array<VowelSpec, kNumVowels> table = [] {
    const double bw[3] = {60, 90, 120}, amp[3] = {1.0, 0.6, 0.3};
    const std::pair<const char*, std::array<double, 3>> f[kNumVowels] = {
        {"a", {730, 1090, 2440}}, {"e", {530, 1840, 2480}}, {"I", {390, 1990, 2550}},
        {"aw", {570, 840, 2410}}, {"u", {300, 870, 2240}}};
    std::array<VowelSpec, kNumVowels> t;
    for (int v = 0; v < kNumVowels; ++v) {
      t[v].name = f[v].first;
      for (int k = 0; k < 3; ++k) t[v].formants[k] = {f[v].second[k], bw[k], amp[k]};
    }
    return t;
  }();
  return table;
}

int vowel_code(const std::string& name) {
  const auto& t = vowel_table();
  for (int v = 0; v < kNumVowels; ++v)
    if (t[v].name == name) return v;
  throw std::invalid_argument("unknown vowel '" + name + "'");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over the combined words.
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ull + index + 0x632BE59BD9B4E019ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<SpeakerSpec> build_speaker_bank(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("build_speaker_bank: n must be >= 1");
  std::mt19937_64 rng(derive_seed(seed, 0x5bea));
  std::vector<SpeakerSpec> bank(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    bank[i].id = i;
    bank[i].vocal_tract_factor = 0.8 + 0.4 * unit_uniform(rng);
    bank[i].f0 = 85.0 + 170.0 * unit_uniform(rng);
  }
  return bank;
}

dsp::Signal synth_vowel_segment(const SpeakerSpec& speaker, const VowelSpec& vowel, double duration_s,
                                std::uint64_t seed, int sample_rate) {
  if (!(duration_s >= 0.1 - 1e-12)) throw std::invalid_argument("synth_vowel_segment: duration must be >= 0.1 s");
  const double nyq = sample_rate / 2.0;
  for (const auto& f : vowel.formants)
    if (f.center_hz * speaker.vocal_tract_factor >= nyq)
      throw std::invalid_argument("synth_vowel_segment: scaled formant " +
                                  std::to_string(f.center_hz * speaker.vocal_tract_factor) + " Hz exceeds Nyquist");
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  std::mt19937_64 rng(seed);
  std::array<double, 3> carrier_phase{}, mod_phase{};
  for (int k = 0; k < 3; ++k) {
    carrier_phase[k] = kTwoPi * unit_uniform(rng);
    mod_phase[k] = kTwoPi * unit_uniform(rng);
  }
  const double voice_phase = kTwoPi * unit_uniform(rng);

  dsp::Signal s{std::vector<double>(n, 0.0), sample_rate};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    double v = 0.0;
    for (int k = 0; k < 3; ++k) {
      const Formant& f = vowel.formants[k];
      const double fc = f.center_hz * speaker.vocal_tract_factor;
      v += f.amplitude * std::cos(kTwoPi * fc * t + carrier_phase[k]) *
           (1.0 + std::cos(kTwoPi * 0.5 * f.bandwidth_hz * t + mod_phase[k]));
    }
    s.samples[i] = v * (1.0 + kVoicingDepth * std::cos(kTwoPi * speaker.f0 * t + voice_phase));
  }
  double power = 0.0;
  for (double v : s.samples) power += v * v;
  const double sigma = std::sqrt(power / static_cast<double>(n) * std::pow(10.0, kNoiseDb / 10.0));
  std::normal_distribution<double> nd(0.0, sigma);
  double peak = 0.0;
  for (double& v : s.samples) {
    v += nd(rng);
    peak = std::max(peak, std::abs(v));
  }
  if (peak > 0.0)
    for (double& v : s.samples) v *= kPeak / peak;
  return s;
}

std::array<int, kSegmentsPerUtterance> draw_vowels(std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, 0));
  std::array<int, kSegmentsPerUtterance> v{};
  for (int& x : v) x = static_cast<int>(rng() % kNumVowels);
  return v;
}

UtteranceRecord generate_utterance(const SpeakerSpec& speaker, std::uint64_t seed, double frame_ms) {
  UtteranceRecord u;
  u.speaker_id = speaker.id;
  u.signal.sample_rate = kSampleRate;
  u.vowels = draw_vowels(seed);
  for (int sec = 0; sec < kSegmentsPerUtterance; ++sec) {
    const auto seg = synth_vowel_segment(speaker, vowel_table()[u.vowels[sec]], 1.0,
                                         derive_seed(seed, static_cast<std::uint64_t>(sec) + 1));
    u.signal.samples.insert(u.signal.samples.end(), seg.samples.begin(), seg.samples.end());
  }
  const std::size_t flen = dsp::frame_length_samples(frame_ms, kSampleRate);
  const std::size_t frames = dsp::frame_sequence(u.signal, frame_ms, frame_ms).size();
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t sec = std::min<std::size_t>(f * flen / kSampleRate, kSegmentsPerUtterance - 1);
    u.frame_labels.push_back(u.vowels[sec]);
  }
  return u;
}

std::array<int, 3> split_sizes(const DatasetConfig& cfg) {
  const int n = cfg.n_utterances;
  int train = cfg.n_train >= 0 ? cfg.n_train : static_cast<int>(std::lround(n * 4000.0 / 4800.0));
  int dev = cfg.n_dev >= 0 ? cfg.n_dev : static_cast<int>(std::lround(n * 500.0 / 4800.0));
  if (train + dev > n) throw std::invalid_argument("split sizes exceed the number of utterances");
  return {train, dev, n - train - dev};
}

std::vector<const ManifestRow*> Manifest::split(const std::string& name) const {
  std::vector<const ManifestRow*> out;
  for (const auto& r : rows)
    if (r.split == name) out.push_back(&r);
  return out;
}

std::string Manifest::resolve(const ManifestRow& row) const {
  const fs::path p(row.path);
  return p.is_absolute() ? p.string() : (fs::path(root) / p).string();
}

void write_manifest(const std::string& path, const Manifest& m) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write manifest '" + tmp + "'");
    f << kHeader << '\n';
    const auto& t = vowel_table();
    for (const auto& r : m.rows) {
      f << r.path << ',' << r.split << ',' << r.speaker_id;
      for (int v : r.vowels) f << ',' << t[v].name;
      f << '\n';
    }
    if (!f) throw std::runtime_error("write failed for manifest '" + tmp + "'");
  }
  fs::rename(tmp, path);
}

Manifest read_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open manifest '" + path + "'");
  Manifest m;
  m.root = fs::path(path).parent_path().string();
  std::string line;
  if (!std::getline(f, line) || line != kHeader)
    throw std::runtime_error("manifest '" + path + "' lacks the expected header '" + kHeader + "'");
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7)
      throw std::runtime_error("manifest '" + path + "' line " + std::to_string(lineno) + ": expected 7 fields");
    ManifestRow r;
    r.path = cells[0];
    r.split = cells[1];
    r.speaker_id = std::stoi(cells[2]);
    for (int k = 0; k < kSegmentsPerUtterance; ++k) r.vowels[k] = vowel_code(cells[3 + k]);
    m.rows.push_back(std::move(r));
  }
  return m;
}

Manifest generate_dataset(const std::string& out_dir, const DatasetConfig& cfg) {
  if (cfg.n_utterances < 0) throw std::invalid_argument("n_utterances must be non-negative");
  if (cfg.n_speakers < 1) throw std::invalid_argument("n_speakers must be >= 1");
  if (cfg.n_utterances % cfg.n_speakers != 0)
    throw std::invalid_argument("n_utterances (" + std::to_string(cfg.n_utterances) +
                                ") must be divisible by n_speakers (" + std::to_string(cfg.n_speakers) + ")");
  const auto sizes = split_sizes(cfg);
  const fs::path root(out_dir), wav_dir = root / "wav";
  std::vector<fs::path> created;
  const bool root_existed = fs::exists(root);
  try {
    fs::create_directories(wav_dir);
    const auto bank = build_speaker_bank(cfg.n_speakers, cfg.seed);
    Manifest m;
    m.root = root.string();
    for (int i = 0; i < cfg.n_utterances; ++i) {
      const auto& spk = bank[static_cast<std::size_t>(i % cfg.n_speakers)];
      const auto u = generate_utterance(spk, derive_seed(cfg.seed, static_cast<std::uint64_t>(i) + 1));
      char name[32];
      std::snprintf(name, sizeof name, "utt_%05d.wav", i);
      const fs::path rel = fs::path("wav") / name;
      const fs::path tmp = root / (rel.string() + ".tmp");
      created.push_back(tmp);
      dsp::write_wav(tmp.string(), u.signal);
      fs::rename(tmp, root / rel);
      created.back() = root / rel;
      ManifestRow r;
      r.path = rel.generic_string();
      r.split = i < sizes[0] ? "train" : (i < sizes[0] + sizes[1] ? "dev" : "test");
      r.speaker_id = spk.id;
      r.vowels = u.vowels;
      m.rows.push_back(std::move(r));
    }
    created.push_back(root / "manifest.csv.tmp");
    write_manifest((root / "manifest.csv").string(), m);
    return m;
  } catch (...) {
    std::error_code ec;
    for (const auto& p : created) fs::remove(p, ec);
    fs::remove(root / "manifest.csv", ec);
    if (fs::is_empty(wav_dir, ec)) fs::remove(wav_dir, ec);
    if (!root_existed) fs::remove_all(root, ec);
    throw;
  }
}

}  // namespace vda::sim
