#include "vda/metrics/dci.h"

#include <cmath>
#include <stdexcept>

#include "vda/metrics/cv.h"
#include "vda/metrics/logistic.h"

namespace vda::metrics {

namespace {

// 1 - normalized entropy of a non-negative vector; base = number of entries.
double one_minus_entropy(const std::vector<double>& p) {
  if (p.size() < 2) return 1.0;
  double s = 0.0;
  for (double v : p) s += v;
  if (!(s > 0.0)) return 0.0;
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v / s * std::log(v / s);
  return 1.0 - h / std::log(static_cast<double>(p.size()));
}

}  // namespace

double dci_disentanglement(const Matrix& r) {
  double total = 0.0;
  for (double v : r.data) total += v;
  if (!(total > 0.0)) return 0.0;
  double d = 0.0;
  for (std::size_t i = 0; i < r.rows; ++i) {
    std::vector<double> row(r.row(i), r.row(i) + r.cols);
    double rs = 0.0;
    for (double v : row) rs += v;
    if (rs > 0.0) d += rs / total * one_minus_entropy(row);
  }
  return d;
}

double dci_completeness(const Matrix& r) {
  if (r.cols == 0) return 0.0;
  double c = 0.0;
  for (std::size_t f = 0; f < r.cols; ++f) c += one_minus_entropy(r.column(f));
  return c / static_cast<double>(r.cols);
}

DciReport dci_scores(const Matrix& z, const FactorTable& factors, const DciConfig& cfg) {
  if (factors.rows() != z.rows) throw std::invalid_argument("dci_scores: factor rows differ from embedding rows");
  DciReport rep;
  std::vector<LabelCodes> codes;
  for (std::size_t f = 0; f < factors.names.size(); ++f) {
    LabelCodes lc = encode_labels(factors.codes[f]);
    if (lc.k() < 2) {
      rep.excluded.push_back(factors.names[f]);
      continue;
    }
    rep.factors.push_back(factors.names[f]);
    codes.push_back(std::move(lc));
  }
  if (codes.empty()) throw std::invalid_argument("dci_scores: no factor has two or more classes");
  const std::size_t nf = codes.size();
  rep.importance = Matrix(z.cols, nf);
  rep.factor_informativeness.assign(nf, 0.0);
  std::vector<double> ds, cs, is;
  std::size_t runs = 0;
  LogisticConfig lc{Penalty::kL1, cfg.lambda, cfg.max_iter, 1e-6};
  for (std::uint64_t seed : cfg.seeds) {
    std::vector<std::vector<std::vector<std::size_t>>> folds;
    for (const auto& c : codes) folds.push_back(stratified_folds(c.y, static_cast<std::size_t>(cfg.folds), seed));
    for (int k = 0; k < cfg.folds; ++k) {
      Matrix r(z.cols, nf);
      double info = 0.0;
      for (std::size_t f = 0; f < nf; ++f) {
        const auto& test = folds[f][static_cast<std::size_t>(k)];
        const auto train = train_rows(folds[f], static_cast<std::size_t>(k), z.rows);
        Logistic model;
        model.fit(select_rows(z, train), select(codes[f].y, train), codes[f].k(), lc);
        const double acc = accuracy(select(codes[f].y, test), model.predict(select_rows(z, test)));
        info += acc;
        rep.factor_informativeness[f] += acc;
        const Matrix& w = model.coef();
        for (std::size_t c = 0; c < w.rows; ++c)
          for (std::size_t j = 0; j < w.cols; ++j) r.at(j, f) += std::abs(w.at(c, j));
      }
      if (nf >= 2) ds.push_back(dci_disentanglement(r));
      cs.push_back(dci_completeness(r));
      is.push_back(info / static_cast<double>(nf));
      for (std::size_t i = 0; i < r.data.size(); ++i) rep.importance.data[i] += r.data[i];
      ++runs;
    }
  }
  for (double& v : rep.importance.data) v /= static_cast<double>(runs);
  for (double& v : rep.factor_informativeness) v /= static_cast<double>(runs);
  if (nf >= 2) rep.disentanglement = ci95(ds);
  rep.completeness = ci95(cs);
  rep.informativeness = ci95(is);
  return rep;
}

nlohmann::json to_json(const DciReport& r) {
  nlohmann::json j;
  j["disentanglement"] = r.disentanglement ? to_json(*r.disentanglement) : nlohmann::json(nullptr);
  j["completeness"] = to_json(r.completeness);
  j["informativeness"] = to_json(r.informativeness);
  j["factors"] = r.factors;
  j["excluded_factors"] = r.excluded;
  j["factor_informativeness"] = r.factor_informativeness;
  nlohmann::json imp = nlohmann::json::array();
  for (std::size_t d = 0; d < r.importance.rows; ++d)
    imp.push_back(std::vector<double>(r.importance.row(d), r.importance.row(d) + r.importance.cols));
  j["importance"] = imp;
  return j;
}

}  // namespace vda::metrics
