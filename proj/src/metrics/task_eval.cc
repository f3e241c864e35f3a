#include "vda/metrics/task_eval.h"

#include <stdexcept>

#include "vda/metrics/cv.h"
#include "vda/metrics/forest.h"
#include "vda/metrics/logistic.h"
#include "vda/metrics/svm.h"

namespace vda::metrics {

std::string classifier_name(Classifier c) {
  switch (c) {
    case Classifier::kLogistic: return "logistic";
    case Classifier::kRandomForest: return "random_forest";
    case Classifier::kSvm: return "svm";
  }
  return "?";
}

Classifier parse_classifier(const std::string& s) {
  if (s == "logistic") return Classifier::kLogistic;
  if (s == "random_forest") return Classifier::kRandomForest;
  if (s == "svm") return Classifier::kSvm;
  throw std::invalid_argument("unknown classifier '" + s + "' (logistic, random_forest, svm)");
}

std::vector<double> default_grid(Classifier c) {
  switch (c) {
    case Classifier::kLogistic: return {1e-4, 1e-3, 1e-2, 1e-1};
    case Classifier::kSvm: return {0.01, 0.1, 1.0, 10.0};
    case Classifier::kRandomForest: return {4, 8, 16};
  }
  return {};
}

namespace {

std::vector<int> fit_predict(Classifier c, double param, const Matrix& xtr, const std::vector<int>& ytr,
                             const Matrix& xte, std::size_t k, std::uint64_t seed) {
  switch (c) {
    case Classifier::kLogistic: {
      Logistic m;
      m.fit(xtr, ytr, k, {Penalty::kL2, param, 500, 1e-6});
      return m.predict(xte);
    }
    case Classifier::kSvm: {
      LinearSvm m;
      m.fit(xtr, ytr, k, {param, 200, 1e-4, seed});
      return m.predict(xte);
    }
    case Classifier::kRandomForest: {
      RandomForest m;
      ForestConfig fc;
      fc.max_depth = static_cast<std::size_t>(param);
      fc.seed = seed;
      m.fit(xtr, ytr, k, fc);
      return m.predict(xte);
    }
  }
  throw std::logic_error("fit_predict: unknown classifier");
}

}  // namespace

TaskReport task_eval_cv(const Matrix& z, const std::vector<int>& labels, Classifier c, const TaskConfig& cfg) {
  if (labels.size() != z.rows) throw std::invalid_argument("task_eval_cv: label count differs from rows");
  const LabelCodes lc = encode_labels(labels);
  if (lc.k() < 2) throw std::invalid_argument("task_eval_cv: need at least two classes");
  const auto grid = cfg.grid.empty() ? default_grid(c) : cfg.grid;
  TaskReport rep;
  rep.classifier = classifier_name(c);
  rep.rows = z.rows;
  rep.classes = lc.k();
  std::vector<double> acc, f1w, f1m;
  for (std::uint64_t seed : cfg.seeds) {
    const auto outer = stratified_folds(lc.y, static_cast<std::size_t>(cfg.folds), seed);
    for (std::size_t k = 0; k < outer.size(); ++k) {
      const auto tr = train_rows(outer, k, z.rows);
      const Matrix xtr = select_rows(z, tr), xte = select_rows(z, outer[k]);
      const auto ytr = select(lc.y, tr), yte = select(lc.y, outer[k]);
      const std::uint64_t run_seed = seed * 1000003ULL + k;
      double best = grid.front(), best_acc = -1.0;
      if (grid.size() > 1) {
        const auto inner = stratified_folds(ytr, static_cast<std::size_t>(cfg.inner_folds), run_seed);
        for (double g : grid) {
          double a = 0.0;
          for (std::size_t i = 0; i < inner.size(); ++i) {
            const auto itr = train_rows(inner, i, xtr.rows);
            a += accuracy(select(ytr, inner[i]),
                          fit_predict(c, g, select_rows(xtr, itr), select(ytr, itr), select_rows(xtr, inner[i]),
                                      lc.k(), run_seed));
          }
          if (a > best_acc) {
            best_acc = a;
            best = g;
          }
        }
      }
      const auto pred = fit_predict(c, best, xtr, ytr, xte, lc.k(), run_seed);
      acc.push_back(accuracy(yte, pred));
      f1w.push_back(f1_weighted(yte, pred, lc.k()));
      f1m.push_back(f1_macro(yte, pred, lc.k()));
      rep.chosen.push_back(best);
    }
  }
  rep.accuracy = ci95(acc);
  rep.f1_weighted = ci95(f1w);
  rep.f1_macro = ci95(f1m);
  return rep;
}

nlohmann::json to_json(const TaskReport& r) {
  return {{"classifier", r.classifier},    {"accuracy", to_json(r.accuracy)},
          {"f1_weighted", to_json(r.f1_weighted)}, {"f1_macro", to_json(r.f1_macro)},
          {"rows", r.rows},                {"classes", r.classes},
          {"chosen_params", r.chosen}};
}

}  // namespace vda::metrics
