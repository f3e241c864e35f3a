#include "vda/model/checkpoint.h"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace vda::model {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint payload assumes a little-endian host");

}  // namespace

void save_checkpoint(const std::string& path, const DecVAE& model, const TrainingConfig& t,
                     const dsp::DecompositionConfig& dcfg, std::uint64_t seed, int epoch) {
  nlohmann::json h;
  h["format"] = "vda-checkpoint-1";
  h["encoder"] = to_json(model.config());
  h["training"] = to_json(t);
  h["decomposition"] = to_json(dcfg);
  h["seed"] = seed;
  h["epoch"] = epoch;
  nlohmann::json entries = nlohmann::json::array();
  std::vector<float> payload;
  const ParamStore& p = model.params();
  for (std::size_t i = 0; i < p.size(); ++i) {
    entries.push_back({{"name", p.name(i)}, {"shape", p.at(i).shape}, {"offset", payload.size() * sizeof(float)}});
    for (double v : p.at(i).data) payload.push_back(static_cast<float>(v));
  }
  h["params"] = entries;
  h["payload_bytes"] = payload.size() * sizeof(float);

  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write checkpoint '" + tmp + "'");
    f << h.dump() << '\n';
    f.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size() * sizeof(float)));
    if (!f) throw std::runtime_error("failed writing checkpoint '" + tmp + "'");
  }
  std::filesystem::rename(tmp, target);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("checkpoint '" + path + "' has no header");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("checkpoint '" + path + "' header is not JSON: " + e.what());
  }
  if (h.value("format", "") != "vda-checkpoint-1") throw std::runtime_error("checkpoint '" + path + "' has unknown format");
  const std::size_t bytes = h.at("payload_bytes").get<std::size_t>();
  std::vector<float> payload(bytes / sizeof(float));
  f.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(f.gcount()) != bytes) throw std::runtime_error("checkpoint '" + path + "' is truncated");

  const std::uint64_t seed = h.at("seed").get<std::uint64_t>();
  Checkpoint ck{DecVAE(encoder_from_json(h.at("encoder")), seed), training_from_json(h.at("training")),
                decomposition_from_json(h.at("decomposition")), seed, h.at("epoch").get<int>()};
  ParamStore& p = ck.model.params();
  const auto& entries = h.at("params");
  if (entries.size() != p.size()) throw std::runtime_error("checkpoint '" + path + "' parameter count mismatch");
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& e = entries[i];
    ad::Tensor& t = p.at(i);
    if (e.at("name").get<std::string>() != p.name(i) || e.at("shape").get<ad::Shape>() != t.shape)
      throw std::runtime_error("checkpoint '" + path + "' parameter '" + e.at("name").get<std::string>() +
                               "' does not match the encoder config");
    const std::size_t off = e.at("offset").get<std::size_t>() / sizeof(float);
    if (off + t.numel() > payload.size()) throw std::runtime_error("checkpoint '" + path + "' offset out of range");
    for (std::size_t k = 0; k < t.numel(); ++k) t.data[k] = payload[off + k];
  }
  return ck;
}

void copy_parameters(const DecVAE& from, DecVAE& to) {
  const ParamStore& a = from.params();
  ParamStore& b = to.params();
  if (a.size() != b.size()) throw std::invalid_argument("copy_parameters: parameter lists differ");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.name(i) != b.name(i) || a.at(i).shape != b.at(i).shape)
      throw std::invalid_argument("copy_parameters: parameter '" + a.name(i) + "' differs");
    b.at(i).data = a.at(i).data;
  }
}

}  // namespace vda::model
