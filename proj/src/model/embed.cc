#include "vda/model/embed.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vda/dsp/wav.h"
#include "vda/model/features.h"
#include "vda/model/trainer.h"

namespace vda::model {

std::size_t FactorTable::index(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  std::string avail;
  for (const auto& n : names) avail += (avail.empty() ? "" : ", ") + n;
  throw std::out_of_range("unknown factor '" + name + "' (available: " + avail + ")");
}

namespace {

// mu [1, V, K, z] reordered to [K, V, z].
ad::Tensor frames_by_view(const ad::Tensor& mu) {
  const std::size_t V = mu.dim(1), K = mu.dim(2), Z = mu.dim(3);
  ad::Tensor out({K, V, Z});
  for (std::size_t v = 0; v < V; ++v)
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t j = 0; j < Z; ++j) out.data[(k * V + v) * Z + j] = mu.data[(v * K + k) * Z + j];
  return out;
}

void append_rows(EmbeddingTable& tab, const ad::Tensor& rows) {
  tab.dim = rows.dim(1);
  tab.values.insert(tab.values.end(), rows.data.begin(), rows.data.end());
}

ad::Tensor project(ad::Tape& tape, const DecVAE& model, const ad::Tensor& kvz, bool aggregate) {
  const std::size_t N = kvz.dim(0), W = kvz.dim(1) * kvz.dim(2);
  if (!aggregate) return ad::Tensor({N, W}, kvz.data);
  return model.aggregate(tape, tape.constant(kvz), false).value();
}

}  // namespace

Embeddings embed_dataset(const DecVAE& model, const TrainingConfig& t, const dsp::DecompositionConfig& dcfg,
                         const sim::Manifest& manifest, const std::string& split, bool aggregate) {
  const auto& enc = model.config();
  std::vector<const sim::ManifestRow*> rows;
  if (split.empty())
    for (const auto& r : manifest.rows) rows.push_back(&r);
  else
    rows = manifest.split(split);

  Embeddings out;
  out.frames.factors.names = {"vowel", "speaker"};
  out.frames.factors.codes.assign(2, {});
  if (enc.dual) {
    out.sequences.emplace();
    out.sequences->factors.names = {"speaker"};
    out.sequences->factors.codes.assign(1, {});
  }
  const bool decompose = uses_decomposition(t);
  for (std::size_t u = 0; u < rows.size(); ++u) {
    const sim::ManifestRow& row = *rows[u];
    const dsp::Signal s = standardize(dsp::read_wav(manifest.resolve(row)));
    const ViewFeatures f = utterance_features(s, dcfg, t.frame_ms, enc.n_mels, decompose);
    std::vector<std::size_t> all(f.frames);
    for (std::size_t k = 0; k < f.frames; ++k) all[k] = k;
    const BatchViews b = gather_batch({&f}, {all});

    ad::Tape tape;
    const Latents z = model.encode(tape, b.x, 1, f.frames, Branch::kZ, t.logvar_clamp, false);
    append_rows(out.frames, project(tape, model, frames_by_view(z.mu.value()), aggregate));
    const double seg = s.duration_s() / static_cast<double>(sim::kSegmentsPerUtterance);
    for (std::size_t k = 0; k < f.frames; ++k) {
      const double start = static_cast<double>(k) * t.frame_ms / 1000.0;
      const auto sec = std::min<std::size_t>(sim::kSegmentsPerUtterance - 1,
                                             static_cast<std::size_t>(std::floor(start / seg + 1e-9)));
      out.frames.utterance.push_back(static_cast<int>(u));
      out.frames.frame.push_back(static_cast<int>(k));
      out.frames.factors.codes[0].push_back(row.vowels[sec]);
      out.frames.factors.codes[1].push_back(row.speaker_id);
    }
    if (enc.dual) {
      const Latents sl = model.encode(tape, b.x, 1, f.frames, Branch::kS, t.logvar_clamp, false);
      ad::Tensor m = frames_by_view(sl.mu.value());
      if (aggregate && enc.aggregation.kind == AggKind::kLearnedProjection)
        append_rows(*out.sequences, project(tape, model, m, false));
      else
        append_rows(*out.sequences, project(tape, model, m, aggregate));
      out.sequences->utterance.push_back(static_cast<int>(u));
      out.sequences->frame.push_back(-1);
      out.sequences->factors.codes[0].push_back(row.speaker_id);
    }
  }
  return out;
}

Embeddings embed_dataset(const Checkpoint& ck, const sim::Manifest& manifest, const std::string& split,
                         bool aggregate) {
  return embed_dataset(ck.model, ck.training, ck.decomposition, manifest, split, aggregate);
}

void write_embedding_csv(const std::string& path, const EmbeddingTable& tab) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + tmp + "'");
    for (std::size_t j = 0; j < tab.dim; ++j) f << 'z' << j << ',';
    f << "utterance,frame";
    for (const auto& n : tab.factors.names) f << ',' << n;
    f << '\n';
    char buf[32];
    for (std::size_t i = 0; i < tab.rows(); ++i) {
      for (std::size_t j = 0; j < tab.dim; ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", tab.values[i * tab.dim + j]);
        f << buf << ',';
      }
      f << tab.utterance[i] << ',' << tab.frame[i];
      for (const auto& c : tab.factors.codes) f << ',' << c[i];
      f << '\n';
    }
    if (!f) throw std::runtime_error("failed writing '" + tmp + "'");
  }
  std::filesystem::rename(tmp, p);
}

EmbeddingTable read_embedding_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open embedding table '" + path + "'");
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("embedding table '" + path + "' is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  EmbeddingTable tab;
  std::size_t col = 0;
  while (col < header.size() && header[col] == "z" + std::to_string(col)) ++col;
  tab.dim = col;
  if (col + 2 > header.size() || header[col] != "utterance" || header[col + 1] != "frame")
    throw std::runtime_error("embedding table '" + path + "' lacks z/utterance/frame columns");
  tab.factors.names.assign(header.begin() + static_cast<std::ptrdiff_t>(col + 2), header.end());
  tab.factors.codes.assign(tab.factors.names.size(), {});
  std::size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    try {
      while (std::getline(ss, cell, ',')) {
        if (c < tab.dim) tab.values.push_back(std::stod(cell));
        else if (c == tab.dim) tab.utterance.push_back(std::stoi(cell));
        else if (c == tab.dim + 1) tab.frame.push_back(std::stoi(cell));
        else if (c < header.size()) tab.factors.codes[c - tab.dim - 2].push_back(std::stoi(cell));
        ++c;
      }
    } catch (const std::logic_error&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed number");
    }
    if (c != header.size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                               " cells");
  }
  return tab;
}

}  // namespace vda::model
