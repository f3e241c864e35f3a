#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "vda/dsp/signal.h"
#include "vda/model/config.h"
#include "vda/simvowels/simvowels.h"

namespace vda::cli {

// Bad input from the user (missing file, unknown key, invalid value): exit 1.
class UserError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sectioned key-value settings. Defaults are filled first, then the config
// file, then command-line overrides; the result is what gets persisted.
class RunConfig {
 public:
  RunConfig();

  // Merges an INI file; unknown sections or keys are rejected.
  void load_file(const std::string& path);
  // "section.key" = value; the key must exist.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;

  std::uint64_t seed() const;
  std::string out() const { return get("run.out"); }

  sim::DatasetConfig dataset() const;
  model::EncoderConfig encoder() const;
  model::TrainingConfig training() const;
  dsp::DecompositionConfig decomposition() const;

  std::string to_ini() const;
  // FNV-1a of the resolved settings with file locations blanked, as 16 hex
  // digits, so relocated reruns hash alike.
  std::string hash() const;
  // Writes <dir>/<name>.resolved.ini atomically.
  void persist(const std::string& dir, const std::string& name) const;

 private:
  boost::property_tree::ptree tree_;
};

// Temp file + rename in the destination directory.
void write_file_atomic(const std::string& path, const std::string& contents);

// "64x3x1,64x3x2" <-> conv layers (channels x kernel x stride).
std::vector<model::ConvLayer> parse_conv_layers(const std::string& s);
std::string format_conv_layers(const std::vector<model::ConvLayer>& layers);

}  // namespace vda::cli
