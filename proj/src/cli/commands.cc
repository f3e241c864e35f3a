#include "vda/cli/commands.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <boost/property_tree/ptree.hpp>

#include "CLI11.hpp"
#include "vda/cli/pca.h"
#include "vda/cli/svg.h"
#include "vda/dsp/decompose.h"
#include "vda/dsp/wav.h"
#include "vda/metrics/dci.h"
#include "vda/metrics/gcn.h"
#include "vda/metrics/irs.h"
#include "vda/metrics/mi.h"
#include "vda/metrics/modexp.h"
#include "vda/metrics/task_eval.h"
#include "vda/metrics/traversal.h"
#include "vda/model/checkpoint.h"
#include "vda/model/embed.h"
#include "vda/model/trainer.h"

namespace vda::cli {

namespace fs = std::filesystem;

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name) { return (fs::path(cfg.out()) / name).string(); }

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw UserError(what + " path is not set");
  if (!fs::is_regular_file(path)) throw UserError(what + " '" + path + "' not found");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<std::uint64_t> seed_list(const RunConfig& cfg) {
  const long long n = cfg.get_int("eval.seeds");
  if (n < 1) throw UserError("eval.seeds must be at least 1");
  std::vector<std::uint64_t> out;
  for (long long i = 0; i < n; ++i) out.push_back(static_cast<std::uint64_t>(i));
  return out;
}

// Keeps the named factors (all when empty), in the requested order.
metrics::FactorTable pick_factors(const metrics::FactorTable& all, const std::vector<std::string>& names) {
  if (names.empty()) return all;
  metrics::FactorTable out;
  for (const auto& n : names) {
    out.names.push_back(n);
    out.codes.push_back(all.column(n));
  }
  return out;
}

std::string available(const metrics::FactorTable& ft) {
  std::string s;
  for (const auto& n : ft.names) s += (s.empty() ? "" : ", ") + n;
  return s;
}

const std::vector<int>& factor_or_throw(const metrics::FactorTable& ft, const std::string& name) {
  for (std::size_t i = 0; i < ft.names.size(); ++i)
    if (ft.names[i] == name) return ft.codes[i];
  throw UserError("unknown factor column '" + name + "'; available: " + available(ft));
}

}  // namespace

void cmd_gen_data(const RunConfig& cfg, std::ostream& log) {
  const sim::DatasetConfig dc = cfg.dataset();
  const sim::Manifest m = sim::generate_dataset(cfg.out(), dc);
  cfg.persist(cfg.out(), "gen-data");
  log << "wrote " << m.rows.size() << " utterances to " << cfg.out() << "\n";
}

void cmd_decompose(const RunConfig& cfg, std::ostream& log) {
  const std::string input = cfg.get("decomposition.input");
  require_file(input, "input WAV");
  const dsp::Signal s = dsp::read_wav(input);
  const dsp::DecompositionConfig dc = cfg.decomposition();
  dsp::validate(dc, s.sample_rate);
  const dsp::ComponentSet cs = dsp::decompose(s, dc);
  dsp::write_component_wav(out_path(cfg, "components.wav"), cs);
  nlohmann::json bands = nlohmann::json::array();
  for (const auto& [lo, hi] : cs.bands) bands.push_back({{"lo_hz", lo}, {"hi_hz", hi}});
  const nlohmann::json j = {{"method", dsp::method_name(dc.method)}, {"C", cs.C()}, {"bands", bands}};
  write_file_atomic(out_path(cfg, "bands.json"), j.dump(2) + "\n");
  cfg.persist(cfg.out(), "decompose");
  log << "decomposed " << input << " into " << cs.C() << " components\n";
}

void cmd_train(const RunConfig& cfg, std::ostream& log) {
  const std::string manifest_path = cfg.get("data.manifest");
  require_file(manifest_path, "manifest");
  const model::EncoderConfig enc = cfg.encoder();
  const model::TrainingConfig t = cfg.training();
  const dsp::DecompositionConfig dc = cfg.decomposition();
  model::validate(enc);
  model::validate(t, enc);
  const sim::Manifest m = sim::read_manifest(manifest_path);
  fs::create_directories(cfg.out());
  cfg.persist(cfg.out(), "train");
  model::TrainOptions opt;
  opt.checkpoint_path = out_path(cfg, "checkpoint.bin");
  opt.log_path = out_path(cfg, "train_log.csv");
  opt.on_epoch = [&log](const model::EpochLog& e) {
    log << "epoch " << e.epoch << " loss " << e.loss_total << " dev " << e.dev_total << "\n";
  };
  const model::TrainResult r = model::train_decvae(m, enc, t, dc, opt);
  log << "best epoch " << r.best_epoch << " dev " << r.best_dev << (r.early_stopped ? " (early stop)" : "") << "\n";
}

void cmd_embed(const RunConfig& cfg, std::ostream& log) {
  const std::string ck_path = cfg.get("embed.checkpoint");
  const std::string manifest_path = cfg.get("data.manifest");
  require_file(ck_path, "checkpoint");
  require_file(manifest_path, "manifest");
  const model::Checkpoint ck = model::load_checkpoint(ck_path);
  const sim::Manifest m = sim::read_manifest(manifest_path);
  const model::Embeddings e =
      model::embed_dataset(ck, m, cfg.get("embed.split"), !cfg.get_bool("embed.all_subspaces"));
  model::write_embedding_csv(out_path(cfg, "frames.csv"), e.frames);
  if (e.sequences) model::write_embedding_csv(out_path(cfg, "sequences.csv"), *e.sequences);
  cfg.persist(cfg.out(), "embed");
  log << "embedded " << e.frames.rows() << " frames" << (e.sequences ? " and sequences" : "") << "\n";
}

nlohmann::json cmd_eval(const RunConfig& cfg, std::ostream& log) {
  const std::string path = cfg.get("eval.embeddings");
  require_file(path, "embeddings");
  const model::EmbeddingTable table = model::read_embedding_csv(path);
  const metrics::Matrix z = metrics::embedding_matrix(table);
  const auto wanted = split_list(cfg.get("eval.factors"));
  for (const auto& w : wanted) factor_or_throw(table.factors, w);
  const metrics::FactorTable factors = pick_factors(table.factors, wanted);
  const auto seeds = seed_list(cfg);
  const int folds = static_cast<int>(cfg.get_int("eval.folds"));
  const int bins = static_cast<int>(cfg.get_int("eval.bins"));

  nlohmann::json report = {{"config_hash", cfg.hash()}, {"seeds", seeds},       {"rows", z.rows},
                           {"dims", z.cols},            {"factors", factors.names}};
  const auto metric_names = split_list(cfg.get("eval.metrics"));
  const std::string task = cfg.get("eval.task");
  if (metric_names.empty() && task.empty()) throw UserError("nothing to evaluate: set --metrics and/or --task");
  for (const auto& name : metric_names) {
    if (name == "mi") {
      const metrics::MiResult r = metrics::mi_matrix(z, bins);
      std::vector<std::size_t> flagged;
      for (std::size_t d = 0; d < r.constant.size(); ++d)
        if (r.constant[d]) flagged.push_back(d);
      report["mi"] = {{"mean_offdiag", r.mean_offdiag}, {"bins", bins}, {"constant_dims", flagged}};
    } else if (name == "gcn") {
      const metrics::GcnResult r = metrics::gcn_score(z);
      report["gcn"] = {{"gcn", r.gcn}, {"tc", r.tc}, {"mean_abs_offdiag", r.mean_abs_offdiag},
                       {"ridge_added", r.ridge_added}};
    } else if (name == "dci") {
      metrics::DciConfig dc;
      dc.folds = folds;
      dc.seeds = seeds;
      dc.lambda = cfg.get_double("eval.dci_lambda");
      report["dci"] = metrics::to_json(metrics::dci_scores(z, factors, dc));
    } else if (name == "modexp") {
      metrics::ModExpConfig mc;
      mc.folds = folds;
      mc.seeds = seeds;
      mc.bins = bins;
      report["modexp"] = metrics::to_json(metrics::modularity_explicitness(z, factors, mc));
    } else if (name == "irs") {
      metrics::IrsConfig ic;
      ic.folds = folds;
      ic.seeds = seeds;
      ic.bins = bins;
      report["irs"] = metrics::to_json(metrics::irs_score(z, factors, ic));
    } else {
      throw UserError("unknown metric '" + name + "' (dci, mi, gcn, modexp, irs)");
    }
    log << "computed " << name << "\n";
  }
  if (!task.empty()) {
    const auto& labels = factor_or_throw(table.factors, task);
    metrics::TaskConfig tc;
    tc.folds = folds;
    tc.seeds = seeds;
    const auto clf = metrics::parse_classifier(cfg.get("eval.classifier"));
    nlohmann::json j = metrics::to_json(metrics::task_eval_cv(z, labels, clf, tc));
    j["factor"] = task;
    report["task"] = j;
    log << "task " << task << " accuracy " << j["accuracy"]["mean"].get<double>() << "\n";
  }
  write_file_atomic(out_path(cfg, "eval.json"), report.dump(2) + "\n");
  cfg.persist(cfg.out(), "eval");
  return report;
}

void cmd_traverse(const RunConfig& cfg, std::ostream& log) {
  const std::string ck_path = cfg.get("embed.checkpoint");
  const std::string manifest_path = cfg.get("data.manifest");
  require_file(ck_path, "checkpoint");
  require_file(manifest_path, "manifest");
  const model::Checkpoint ck = model::load_checkpoint(ck_path);
  const sim::Manifest m = sim::read_manifest(manifest_path);
  const model::Embeddings e = model::embed_dataset(ck, m, cfg.get("embed.split"), false);
  const std::string fix = cfg.get("traverse.fix"), vary = cfg.get("traverse.vary");
  const auto& fixed = factor_or_throw(e.frames.factors, fix);
  factor_or_throw(e.frames.factors, vary);
  if (fixed.empty()) throw UserError("no frames in split '" + cfg.get("embed.split") + "'");
  int value = *std::min_element(fixed.begin(), fixed.end());
  if (!cfg.get("traverse.value").empty()) value = static_cast<int>(cfg.get_int("traverse.value"));

  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < fixed.size(); ++r)
    if (fixed[r] == value) rows.push_back(r);
  if (rows.empty()) throw UserError("no frames with " + fix + " = " + std::to_string(value));
  const metrics::Matrix z = metrics::select_rows(metrics::embedding_matrix(e.frames), rows);
  metrics::FactorTable probe;
  probe.names = e.frames.factors.names;
  for (const auto& c : e.frames.factors.codes) probe.codes.push_back(metrics::select(c, rows));
  const auto res = metrics::latent_traversal_response(z, ck.model.config().views(), probe, fix, vary);
  metrics::write_traversal_csv(out_path(cfg, "traversal.csv"), res);
  cfg.persist(cfg.out(), "traverse");
  log << "traversal over " << rows.size() << " frames with " << fix << " = " << value << "\n";
}

void cmd_plot(const RunConfig& cfg, std::ostream& log) {
  const std::string emb = cfg.get("plot.embeddings"), log_csv = cfg.get("plot.log");
  if (emb.empty() && log_csv.empty()) throw UserError("plot needs --embeddings and/or --log");
  if (!emb.empty()) {
    require_file(emb, "embeddings");
    const model::EmbeddingTable table = model::read_embedding_csv(emb);
    const std::string factor = cfg.get("plot.factor");
    const auto& labels = factor_or_throw(table.factors, factor);
    const metrics::Matrix xy = pca_project(metrics::embedding_matrix(table), 2);
    write_file_atomic(out_path(cfg, "pca_" + factor + ".svg"),
                      scatter_svg(xy, labels, "PCA of " + fs::path(emb).filename().string(), factor));
    log << "plotted " << table.rows() << " points by " << factor << "\n";
  }
  if (!log_csv.empty()) {
    require_file(log_csv, "training log");
    std::ifstream f(log_csv);
    std::string line;
    std::getline(f, line);
    std::vector<std::string> cols;
    {
      std::stringstream ss(line);
      std::string c;
      while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    std::map<std::string, std::size_t> at;
    for (std::size_t i = 0; i < cols.size(); ++i) at[cols[i]] = i;
    const std::vector<std::string> series = {"loss_total", "loss_recon", "loss_ortho", "loss_prior"};
    for (const auto& s : series)
      if (!at.count(s) || !at.count("epoch")) throw UserError("training log '" + log_csv + "' lacks column " + s);
    std::vector<double> x;
    std::vector<Curve> curves;
    for (const auto& s : series) curves.push_back({s, {}});
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string c;
      while (std::getline(ss, c, ',')) cells.push_back(c);
      if (cells.size() != cols.size()) throw UserError("training log row has " + std::to_string(cells.size()) + " cells");
      x.push_back(std::stod(cells[at["epoch"]]));
      for (std::size_t k = 0; k < series.size(); ++k) curves[k].y.push_back(std::stod(cells[at[series[k]]]));
    }
    write_file_atomic(out_path(cfg, "loss_curves.svg"), line_plot_svg(x, curves, "Training losses", "epoch"));
    log << "plotted " << x.size() << " epochs\n";
  }
  cfg.persist(cfg.out(), "plot");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"vda: decomposition-based VAE toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string config_path;
  std::vector<std::string> overrides;
  std::map<std::string, std::string> flags;  // config key -> value from a command flag

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "INI config file");
    sub->add_option_function<std::string>("--seed", [&](const std::string& v) { flags["run.seed"] = v; }, "global seed");
    sub->add_option_function<std::string>("--out", [&](const std::string& v) { flags["run.out"] = v; }, "output directory");
    sub->add_option("--set", overrides, "section.key=value override (repeatable)");
  };
  auto flag = [&](CLI::App* sub, const std::string& name, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(name, [&flags, key](const std::string& v) { flags[key] = v; }, help);
  };

  auto* gen = app.add_subcommand("gen-data", "generate a SimVowels dataset");
  add_common(gen);
  flag(gen, "--n", "data.n", "number of utterances");
  flag(gen, "--speakers", "data.speakers", "number of speakers");
  flag(gen, "--n-train", "data.n_train", "train split size");
  flag(gen, "--n-dev", "data.n_dev", "dev split size");

  auto* dec = app.add_subcommand("decompose", "split one WAV into components");
  add_common(dec);
  flag(dec, "--input", "decomposition.input", "input WAV");
  flag(dec, "--method", "decomposition.method", "fd or ewt");
  flag(dec, "--C", "encoder.C", "number of components");

  auto* train = app.add_subcommand("train", "train a model");
  add_common(train);
  flag(train, "--manifest", "data.manifest", "dataset manifest.csv");
  flag(train, "--beta", "training.beta", "prior weight");
  flag(train, "--epochs", "training.t_max", "maximum epochs");
  flag(train, "--objective", "training.objective", "delbo or prior_only");
  flag(train, "--aggregation", "encoder.aggregation", "latent aggregation");
  flag(train, "--dual", "encoder.dual", "add the sequence branch (true/false)");

  auto* embed = app.add_subcommand("embed", "write posterior-mean embeddings");
  add_common(embed);
  flag(embed, "--checkpoint", "embed.checkpoint", "checkpoint file");
  flag(embed, "--manifest", "data.manifest", "dataset manifest.csv");
  flag(embed, "--split", "embed.split", "train, dev, test or empty for all");
  flag(embed, "--all-subspaces", "embed.all_subspaces", "skip aggregation (true/false)");

  auto* eval = app.add_subcommand("eval", "disentanglement metrics and downstream tasks");
  add_common(eval);
  flag(eval, "--embeddings", "eval.embeddings", "embedding CSV");
  flag(eval, "--metrics", "eval.metrics", "comma list of dci, mi, gcn, modexp, irs");
  flag(eval, "--task", "eval.task", "factor to classify");
  flag(eval, "--classifier", "eval.classifier", "logistic, random_forest or svm");
  flag(eval, "--factors", "eval.factors", "comma list of factor columns (default all)");
  flag(eval, "--seeds", "eval.seeds", "number of cross-validation seeds");

  auto* trav = app.add_subcommand("traverse", "latent response to one factor with another fixed");
  add_common(trav);
  flag(trav, "--checkpoint", "embed.checkpoint", "checkpoint file");
  flag(trav, "--manifest", "data.manifest", "dataset manifest.csv");
  flag(trav, "--split", "embed.split", "probe split");
  flag(trav, "--fix", "traverse.fix", "factor held constant");
  flag(trav, "--vary", "traverse.vary", "factor whose values are compared");
  flag(trav, "--value", "traverse.value", "value of the fixed factor (default smallest)");

  auto* plot = app.add_subcommand("plot", "SVG plots");
  add_common(plot);
  flag(plot, "--embeddings", "plot.embeddings", "embedding CSV for a PCA scatter");
  flag(plot, "--factor", "plot.factor", "factor column used for colours");
  flag(plot, "--log", "plot.log", "training log CSV for loss curves");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? 0 : 1;
  }

  try {
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& [k, v] : flags) cfg.set(k, v);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw UserError("--set expects section.key=value, got '" + o + "'");
      cfg.set(o.substr(0, eq), o.substr(eq + 1));
    }
    if (gen->parsed()) cmd_gen_data(cfg, out);
    else if (dec->parsed()) cmd_decompose(cfg, out);
    else if (train->parsed()) cmd_train(cfg, out);
    else if (embed->parsed()) cmd_embed(cfg, out);
    else if (eval->parsed()) cmd_eval(cfg, out);
    else if (trav->parsed()) cmd_traverse(cfg, out);
    else if (plot->parsed()) cmd_plot(cfg, out);
    return 0;
  } catch (const UserError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace vda::cli
