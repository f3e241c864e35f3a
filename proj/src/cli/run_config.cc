#include "vda/cli/run_config.h"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

namespace vda::cli {

namespace pt = boost::property_tree;

namespace {

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void require_known(const pt::ptree& defaults, const std::string& key) {
  if (!defaults.get_child_optional(pt::ptree::path_type(key, '.')))
    throw UserError("unknown config key '" + key + "'");
}

}  // namespace

RunConfig::RunConfig() {
  const model::EncoderConfig e;
  const model::TrainingConfig t;
  const dsp::DecompositionConfig d;
  const sim::DatasetConfig s;
  auto& r = tree_;
  r.put("run.seed", "7");
  r.put("run.out", "out");

  r.put("data.manifest", "data/manifest.csv");
  r.put("data.n", std::to_string(s.n_utterances));
  r.put("data.speakers", std::to_string(s.n_speakers));
  r.put("data.n_train", std::to_string(s.n_train));
  r.put("data.n_dev", std::to_string(s.n_dev));

  r.put("encoder.conv_layers", format_conv_layers(e.conv_layers));
  r.put("encoder.n_mels", std::to_string(e.n_mels));
  r.put("encoder.v", std::to_string(e.v));
  r.put("encoder.d", std::to_string(e.d));
  r.put("encoder.z_dim", std::to_string(e.z_dim));
  r.put("encoder.C", std::to_string(e.C));
  r.put("encoder.aggregation", model::aggregation_name(e.aggregation));
  r.put("encoder.dual", e.dual ? "true" : "false");

  r.put("training.objective", "delbo");
  r.put("training.beta", num(t.beta));
  r.put("training.beta_S", num(t.beta_S));
  r.put("training.w_pos", "");
  r.put("training.w_neg", "");
  r.put("training.l_ssl", num(t.l_ssl));
  r.put("training.epsilon", num(t.epsilon));
  r.put("training.batch_seconds", num(t.batch_seconds));
  r.put("training.lr_Z", num(t.lr_Z));
  r.put("training.lr_S", num(t.lr_S));
  r.put("training.warmup_epochs", std::to_string(t.warmup_epochs));
  r.put("training.t_max", std::to_string(t.t_max));
  r.put("training.tau_warmup", std::to_string(t.tau_warmup));
  r.put("training.tau_delta", num(t.tau_delta));
  r.put("training.tau_patience", std::to_string(t.tau_patience));
  r.put("training.d_min_s", num(t.d_min_s));
  r.put("training.d_max_s", num(t.d_max_s));
  r.put("training.frame_ms", num(t.frame_ms));
  r.put("training.logvar_clamp", num(t.logvar_clamp));
  r.put("training.dev_mask_seed", std::to_string(t.dev_mask_seed));

  r.put("decomposition.method", dsp::method_name(d.method));
  r.put("decomposition.fd_band_edges", join(d.fd_band_edges));
  r.put("decomposition.merge_strategy", dsp::merge_strategy_name(d.merge_strategy));
  r.put("decomposition.peak_prominence", num(d.peak_prominence));
  r.put("decomposition.ewt_gamma", num(d.ewt_gamma));
  r.put("decomposition.input", "");

  r.put("embed.checkpoint", "out/checkpoint.bin");
  r.put("embed.split", "test");
  r.put("embed.all_subspaces", "false");

  r.put("eval.embeddings", "out/frames.csv");
  r.put("eval.metrics", "");
  r.put("eval.task", "");
  r.put("eval.classifier", "logistic");
  r.put("eval.factors", "");
  r.put("eval.folds", "5");
  r.put("eval.seeds", "5");
  r.put("eval.bins", "30");
  r.put("eval.dci_lambda", "0.01");

  r.put("traverse.fix", "speaker");
  r.put("traverse.vary", "vowel");
  r.put("traverse.value", "");

  r.put("plot.embeddings", "");
  r.put("plot.factor", "vowel");
  r.put("plot.log", "");
}

void RunConfig::load_file(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw UserError("config file '" + path + "' not found");
  pt::ptree file;
  try {
    pt::read_ini(path, file);
  } catch (const pt::ini_parser_error& e) {
    throw UserError(std::string("cannot parse config: ") + e.what());
  }
  for (const auto& [section, body] : file) {
    if (body.empty()) throw UserError("config key '" + section + "' must live inside a [section]");
    for (const auto& [key, value] : body) set(section + "." + key, value.data());
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  require_known(tree_, key);
  tree_.put(pt::ptree::path_type(key, '.'), value);
}

std::string RunConfig::get(const std::string& key) const {
  require_known(tree_, key);
  return tree_.get<std::string>(pt::ptree::path_type(key, '.'));
}

double RunConfig::get_double(const std::string& key) const {
  const std::string s = get(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw UserError("config key '" + key + "' expects a number, got '" + s + "'");
}

long long RunConfig::get_int(const std::string& key) const {
  const std::string s = get(key);
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw UserError("config key '" + key + "' expects an integer, got '" + s + "'");
  return v;
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string s = get(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw UserError("config key '" + key + "' expects true/false, got '" + s + "'");
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UserError("config key '" + key + "' has a non-numeric entry '" + item + "'");
    }
  }
  return out;
}

std::uint64_t RunConfig::seed() const {
  const long long s = get_int("run.seed");
  if (s < 0) throw UserError("run.seed must be non-negative");
  return static_cast<std::uint64_t>(s);
}

sim::DatasetConfig RunConfig::dataset() const {
  sim::DatasetConfig c;
  c.n_utterances = static_cast<int>(get_int("data.n"));
  c.n_speakers = static_cast<int>(get_int("data.speakers"));
  c.n_train = static_cast<int>(get_int("data.n_train"));
  c.n_dev = static_cast<int>(get_int("data.n_dev"));
  c.seed = seed();
  return c;
}

model::EncoderConfig RunConfig::encoder() const {
  model::EncoderConfig e;
  e.conv_layers = parse_conv_layers(get("encoder.conv_layers"));
  e.n_mels = static_cast<std::size_t>(get_int("encoder.n_mels"));
  e.v = static_cast<std::size_t>(get_int("encoder.v"));
  e.d = static_cast<std::size_t>(get_int("encoder.d"));
  e.z_dim = static_cast<std::size_t>(get_int("encoder.z_dim"));
  e.C = static_cast<int>(get_int("encoder.C"));
  try {
    e.aggregation = model::parse_aggregation(get("encoder.aggregation"));
  } catch (const std::invalid_argument& ex) {
    throw UserError(ex.what());
  }
  e.dual = get_bool("encoder.dual");
  return e;
}

model::TrainingConfig RunConfig::training() const {
  model::TrainingConfig t;
  const std::string obj = get("training.objective");
  if (obj == "delbo") t.objective = model::Objective::kDelbo;
  else if (obj == "prior_only") t.objective = model::Objective::kPriorOnly;
  else throw UserError("training.objective must be delbo or prior_only, got '" + obj + "'");
  t.beta = get_double("training.beta");
  t.beta_S = get_double("training.beta_S");
  t.w_pos = get_list("training.w_pos");
  t.w_neg = get_list("training.w_neg");
  t.l_ssl = get_double("training.l_ssl");
  t.epsilon = get_double("training.epsilon");
  t.batch_seconds = get_double("training.batch_seconds");
  t.lr_Z = get_double("training.lr_Z");
  t.lr_S = get_double("training.lr_S");
  t.warmup_epochs = static_cast<int>(get_int("training.warmup_epochs"));
  t.t_max = static_cast<int>(get_int("training.t_max"));
  t.tau_warmup = static_cast<int>(get_int("training.tau_warmup"));
  t.tau_delta = get_double("training.tau_delta");
  t.tau_patience = static_cast<int>(get_int("training.tau_patience"));
  t.d_min_s = get_double("training.d_min_s");
  t.d_max_s = get_double("training.d_max_s");
  t.frame_ms = get_double("training.frame_ms");
  t.logvar_clamp = get_double("training.logvar_clamp");
  t.dev_mask_seed = static_cast<std::uint64_t>(get_int("training.dev_mask_seed"));
  t.seed = seed();
  return t;
}

dsp::DecompositionConfig RunConfig::decomposition() const {
  dsp::DecompositionConfig d;
  try {
    d.method = dsp::parse_method(get("decomposition.method"));
    d.merge_strategy = dsp::parse_merge_strategy(get("decomposition.merge_strategy"));
  } catch (const std::invalid_argument& ex) {
    throw UserError(ex.what());
  }
  d.C = static_cast<int>(get_int("encoder.C"));
  d.fd_band_edges = get_list("decomposition.fd_band_edges");
  d.peak_prominence = get_double("decomposition.peak_prominence");
  d.ewt_gamma = get_double("decomposition.ewt_gamma");
  return d;
}

std::string RunConfig::hash() const {
  pt::ptree copy = tree_;
  for (const char* k : {"run.out", "data.manifest", "decomposition.input", "embed.checkpoint", "eval.embeddings",
                        "plot.embeddings", "plot.log"})
    copy.put(pt::ptree::path_type(k, '.'), "");
  std::ostringstream os;
  pt::write_ini(os, copy);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunConfig::to_ini() const {
  std::ostringstream os;
  pt::write_ini(os, tree_);
  return os.str();
}

void RunConfig::persist(const std::string& dir, const std::string& name) const {
  write_file_atomic((std::filesystem::path(dir) / (name + ".resolved.ini")).string(), to_ini());
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + tmp + "'");
    f << contents;
    if (!f.flush()) throw std::runtime_error("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, p);
}

std::vector<model::ConvLayer> parse_conv_layers(const std::string& s) {
  std::vector<model::ConvLayer> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    model::ConvLayer l;
    char x1 = 0, x2 = 0;
    std::istringstream is(item);
    if (!(is >> l.channels >> x1 >> l.kernel >> x2 >> l.stride) || x1 != 'x' || x2 != 'x' || !is.eof())
      throw UserError("conv layer '" + item + "' must look like 64x3x1 (channels x kernel x stride)");
    out.push_back(l);
  }
  if (out.empty()) throw UserError("encoder.conv_layers is empty");
  return out;
}

std::string format_conv_layers(const std::vector<model::ConvLayer>& layers) {
  std::string s;
  for (std::size_t i = 0; i < layers.size(); ++i)
    s += (i ? "," : "") + std::to_string(layers[i].channels) + "x" + std::to_string(layers[i].kernel) + "x" +
         std::to_string(layers[i].stride);
  return s;
}

}  // namespace vda::cli
