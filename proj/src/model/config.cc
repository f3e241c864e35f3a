#include "vda/model/config.h"

#include <regex>
#include <stdexcept>

namespace vda::model {

using nlohmann::json;

std::string aggregation_name(const Aggregation& a) {
  switch (a.kind) {
    case AggKind::kSingleSubspace: return "single_subspace(" + std::to_string(a.index) + ")";
    case AggKind::kConcatComponents: return "concat_components";
    case AggKind::kConcatAll: return "concat_all";
    case AggKind::kLearnedProjection: return "learned_projection(" + std::to_string(a.proj_dim) + ")";
  }
  return "?";
}

Aggregation parse_aggregation(const std::string& s) {
  Aggregation a;
  std::smatch m;
  if (s == "concat_all") {
    a.kind = AggKind::kConcatAll;
  } else if (s == "concat_components") {
    a.kind = AggKind::kConcatComponents;
  } else if (std::regex_match(s, m, std::regex(R"(single_subspace\((\d+)\))"))) {
    a.kind = AggKind::kSingleSubspace;
    a.index = std::stoi(m[1]);
  } else if (s == "learned_projection") {
    a.kind = AggKind::kLearnedProjection;
  } else if (std::regex_match(s, m, std::regex(R"(learned_projection\((\d+)\))"))) {
    a.kind = AggKind::kLearnedProjection;
    a.proj_dim = std::stoul(m[1]);
  } else {
    throw std::invalid_argument("unknown aggregation '" + s +
                                "' (expected concat_all, concat_components, single_subspace(i) or learned_projection[(k)])");
  }
  return a;
}

std::size_t EncoderConfig::aggregated_dim() const {
  switch (aggregation.kind) {
    case AggKind::kSingleSubspace: return z_dim;
    case AggKind::kConcatComponents: return z_dim * static_cast<std::size_t>(C);
    case AggKind::kConcatAll: return z_dim * views();
    case AggKind::kLearnedProjection: return aggregation.proj_dim;
  }
  return 0;
}

void validate(const EncoderConfig& c) {
  if (c.C < 2) throw std::invalid_argument("encoder: C must be >= 2");
  if (c.conv_layers.empty()) throw std::invalid_argument("encoder: at least one conv layer is required");
  for (const auto& l : c.conv_layers)
    if (l.channels == 0 || l.kernel == 0 || l.stride == 0)
      throw std::invalid_argument("encoder: conv layer fields must be positive");
  if (c.n_mels == 0 || c.v == 0 || c.d == 0 || c.z_dim == 0)
    throw std::invalid_argument("encoder: n_mels, v, d and z_dim must be positive");
  if (c.aggregation.kind == AggKind::kSingleSubspace &&
      (c.aggregation.index < 0 || c.aggregation.index > c.C))
    throw std::invalid_argument("single_subspace index " + std::to_string(c.aggregation.index) +
                                " out of range [0, " + std::to_string(c.C) + "]");
  if (c.aggregation.kind == AggKind::kLearnedProjection &&
      (c.aggregation.proj_dim == 0 || c.aggregation.proj_hidden == 0))
    throw std::invalid_argument("learned_projection sizes must be positive");
}

void validate(const TrainingConfig& t, const EncoderConfig& e) {
  if (!(t.l_ssl > 0.0 && t.l_ssl <= 1.0)) throw std::invalid_argument("l_ssl must lie in (0, 1]");
  if (t.beta < 0.0 || t.beta_S < 0.0) throw std::invalid_argument("beta must be non-negative");
  if (!(t.epsilon > 0.0 && t.epsilon < 0.5)) throw std::invalid_argument("epsilon must lie in (0, 0.5)");
  if (!t.w_pos.empty() && t.w_pos.size() != static_cast<std::size_t>(e.C))
    throw std::invalid_argument("w_pos needs C entries");
  const std::size_t pairs = static_cast<std::size_t>(e.C * (e.C - 1) / 2);
  if (!t.w_neg.empty() && t.w_neg.size() != pairs) throw std::invalid_argument("w_neg needs C(C-1)/2 entries");
  for (double w : t.w_pos)
    if (w < 0.0) throw std::invalid_argument("w_pos entries must be non-negative");
  for (double w : t.w_neg)
    if (w < 0.0) throw std::invalid_argument("w_neg entries must be non-negative");
  if (!(t.lr_Z > 0.0 && t.lr_S > 0.0)) throw std::invalid_argument("learning rates must be positive");
  if (t.t_max < 0 || t.warmup_epochs < 0 || t.tau_warmup < 0 || t.tau_patience < 1)
    throw std::invalid_argument("epoch counts must be non-negative and patience >= 1");
  if (!(t.frame_ms > 0.0)) throw std::invalid_argument("frame_ms must be positive");
  if (!(t.batch_seconds > 0.0)) throw std::invalid_argument("batch_seconds must be positive");
  if (!(t.d_min_s >= 0.0 && t.d_max_s >= t.d_min_s && t.d_max_s > 0.0))
    throw std::invalid_argument("need 0 <= d_min <= d_max");
  if (!(t.logvar_clamp > 0.0)) throw std::invalid_argument("logvar_clamp must be positive");
}

json to_json(const EncoderConfig& c) {
  json layers = json::array();
  for (const auto& l : c.conv_layers) layers.push_back({l.channels, l.kernel, l.stride});
  return {{"conv_layers", layers},
          {"n_mels", c.n_mels},
          {"v", c.v},
          {"d", c.d},
          {"z_dim", c.z_dim},
          {"C", c.C},
          {"aggregation", aggregation_name(c.aggregation)},
          {"proj_hidden", c.aggregation.proj_hidden},
          {"dual", c.dual}};
}

EncoderConfig encoder_from_json(const json& j) {
  EncoderConfig c;
  c.conv_layers.clear();
  for (const auto& l : j.at("conv_layers")) c.conv_layers.push_back({l.at(0), l.at(1), l.at(2)});
  c.n_mels = j.at("n_mels");
  c.v = j.at("v");
  c.d = j.at("d");
  c.z_dim = j.at("z_dim");
  c.C = j.at("C");
  c.aggregation = parse_aggregation(j.at("aggregation"));
  c.aggregation.proj_hidden = j.value("proj_hidden", c.aggregation.proj_hidden);
  c.dual = j.at("dual");
  return c;
}

json to_json(const TrainingConfig& c) {
  return {{"objective", c.objective == Objective::kDelbo ? "delbo" : "prior_only"},
          {"beta", c.beta},
          {"beta_S", c.beta_S},
          {"w_pos", c.w_pos},
          {"w_neg", c.w_neg},
          {"l_ssl", c.l_ssl},
          {"epsilon", c.epsilon},
          {"batch_seconds", c.batch_seconds},
          {"lr_Z", c.lr_Z},
          {"lr_S", c.lr_S},
          {"warmup_epochs", c.warmup_epochs},
          {"t_max", c.t_max},
          {"tau_warmup", c.tau_warmup},
          {"tau_delta", c.tau_delta},
          {"tau_patience", c.tau_patience},
          {"d_min_s", c.d_min_s},
          {"d_max_s", c.d_max_s},
          {"frame_ms", c.frame_ms},
          {"logvar_clamp", c.logvar_clamp},
          {"seed", c.seed},
          {"dev_mask_seed", c.dev_mask_seed}};
}

TrainingConfig training_from_json(const json& j) {
  TrainingConfig c;
  const std::string obj = j.at("objective");
  if (obj == "delbo") c.objective = Objective::kDelbo;
  else if (obj == "prior_only") c.objective = Objective::kPriorOnly;
  else throw std::invalid_argument("unknown objective '" + obj + "'");
  c.beta = j.at("beta");
  c.beta_S = j.at("beta_S");
  c.w_pos = j.at("w_pos").get<std::vector<double>>();
  c.w_neg = j.at("w_neg").get<std::vector<double>>();
  c.l_ssl = j.at("l_ssl");
  c.epsilon = j.at("epsilon");
  c.batch_seconds = j.at("batch_seconds");
  c.lr_Z = j.at("lr_Z");
  c.lr_S = j.at("lr_S");
  c.warmup_epochs = j.at("warmup_epochs");
  c.t_max = j.at("t_max");
  c.tau_warmup = j.at("tau_warmup");
  c.tau_delta = j.at("tau_delta");
  c.tau_patience = j.at("tau_patience");
  c.d_min_s = j.at("d_min_s");
  c.d_max_s = j.at("d_max_s");
  c.frame_ms = j.at("frame_ms");
  c.logvar_clamp = j.at("logvar_clamp");
  c.seed = j.at("seed");
  c.dev_mask_seed = j.at("dev_mask_seed");
  return c;
}

json to_json(const dsp::DecompositionConfig& c) {
  return {{"method", dsp::method_name(c.method)},
          {"C", c.C},
          {"fd_band_edges", c.fd_band_edges},
          {"merge_strategy", dsp::merge_strategy_name(c.merge_strategy)},
          {"peak_prominence", c.peak_prominence},
          {"ewt_gamma", c.ewt_gamma}};
}

dsp::DecompositionConfig decomposition_from_json(const json& j) {
  dsp::DecompositionConfig c;
  c.method = dsp::parse_method(j.at("method"));
  c.C = j.at("C");
  c.fd_band_edges = j.at("fd_band_edges").get<std::vector<double>>();
  c.merge_strategy = dsp::parse_merge_strategy(j.at("merge_strategy"));
  c.peak_prominence = j.at("peak_prominence");
  c.ewt_gamma = j.at("ewt_gamma");
  return c;
}

}  // namespace vda::model
