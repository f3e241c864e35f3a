#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vda/dsp/signal.h"

namespace vda::sim {

inline constexpr int kSampleRate = 16000;
inline constexpr int kNumVowels = 5;
inline constexpr int kSegmentsPerUtterance = 4;

struct Formant {
  double center_hz;
  double bandwidth_hz;
  double amplitude;
};

struct VowelSpec {
  std::string name;
  std::array<Formant, 3> formants;
};

// /a/, /e/, /I/, /aw/, /u/ in that order; the index is the vowel code.
const std::array<VowelSpec, kNumVowels>& vowel_table();
int vowel_code(const std::string& name);

struct SpeakerSpec {
  int id = 0;
  double vocal_tract_factor = 1.0;
  double f0 = 120.0;
};

std::vector<SpeakerSpec> build_speaker_bank(int n, std::uint64_t seed);

// Three AM formant carriers at factor-scaled centres (modulation bandwidth
// equal to the formant bandwidth) under a voicing envelope at f0, plus white
// noise 40 dB below the signal, peak-normalized to 0.9.
dsp::Signal synth_vowel_segment(const SpeakerSpec& speaker, const VowelSpec& vowel, double duration_s,
                                std::uint64_t seed, int sample_rate = kSampleRate);

struct UtteranceRecord {
  dsp::Signal signal;
  int speaker_id = 0;
  std::array<int, kSegmentsPerUtterance> vowels{};
  std::vector<int> frame_labels;
};

// Per-second vowel codes, i.i.d. uniform over the five vowels.
std::array<int, kSegmentsPerUtterance> draw_vowels(std::uint64_t seed);

UtteranceRecord generate_utterance(const SpeakerSpec& speaker, std::uint64_t seed, double frame_ms = 200.0);

// Mixes a global seed with an index into an independent stream seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct DatasetConfig {
  int n_utterances = 4800;
  int n_speakers = 60;
  std::uint64_t seed = 7;
  // Negative sizes mean "proportional to 4000/500/300".
  int n_train = -1;
  int n_dev = -1;
};

struct ManifestRow {
  std::string path;  // relative to the manifest's directory
  std::string split;
  int speaker_id = 0;
  std::array<int, kSegmentsPerUtterance> vowels{};
};

struct Manifest {
  std::string root;  // directory holding manifest.csv
  std::vector<ManifestRow> rows;

  std::vector<const ManifestRow*> split(const std::string& name) const;
  std::string resolve(const ManifestRow& row) const;
};

// Utterance i belongs to speaker i mod n_speakers; the first n_train rows form
// the train split, the next n_dev the dev split, the rest the test split.
// Writes <out_dir>/wav/*.wav and <out_dir>/manifest.csv; on failure every file
// created by this call is removed before the exception propagates.
Manifest generate_dataset(const std::string& out_dir, const DatasetConfig& cfg);

std::array<int, 3> split_sizes(const DatasetConfig& cfg);

void write_manifest(const std::string& path, const Manifest& m);
Manifest read_manifest(const std::string& path);

}  // namespace vda::sim
