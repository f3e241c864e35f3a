#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "vda/model/checkpoint.h"
#include "vda/simvowels/simvowels.h"

namespace vda::model {

// Named categorical factors with integer codes, one column per factor.
struct FactorTable {
  std::vector<std::string> names;
  std::vector<std::vector<int>> codes;  // codes[factor][row]

  std::size_t rows() const { return codes.empty() ? 0 : codes[0].size(); }
  // Throws std::out_of_range listing the available names.
  std::size_t index(const std::string& name) const;
  const std::vector<int>& column(const std::string& name) const { return codes[index(name)]; }
};

// Row-major latent rows with the utterance/frame they came from and aligned
// factor labels. Sequence rows use frame -1.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::vector<double> values;
  std::vector<int> utterance;
  std::vector<int> frame;
  FactorTable factors;

  std::size_t rows() const { return utterance.size(); }
  const double* row(std::size_t i) const { return values.data() + i * dim; }
};

struct Embeddings {
  EmbeddingTable frames;
  std::optional<EmbeddingTable> sequences;
};

// Posterior means of every frame of every utterance in `split` ("" for all
// rows), aggregated per the encoder config, or all subspaces concatenated
// when `aggregate` is false. Frame factors are vowel and speaker; sequence
// rows (dual models only) carry speaker.
Embeddings embed_dataset(const Checkpoint& ck, const sim::Manifest& manifest, const std::string& split,
                         bool aggregate = true);

// Same, from an in-memory model.
Embeddings embed_dataset(const DecVAE& model, const TrainingConfig& t, const dsp::DecompositionConfig& dcfg,
                         const sim::Manifest& manifest, const std::string& split, bool aggregate = true);

// Header z0..z{D-1},utterance,frame,<factor names>; written atomically.
void write_embedding_csv(const std::string& path, const EmbeddingTable& table);
EmbeddingTable read_embedding_csv(const std::string& path);

}  // namespace vda::model
