#include "vda/metrics/modexp.h"

#include <algorithm>
#include <stdexcept>

#include "vda/metrics/cv.h"
#include "vda/metrics/logistic.h"
#include "vda/metrics/mi.h"

namespace vda::metrics {

Matrix factor_mi(const Matrix& z, const FactorTable& factors, int bins) {
  Matrix mi(z.cols, factors.names.size());
  for (std::size_t d = 0; d < z.cols; ++d) {
    const auto codes = discretize(z.column(d), bins);
    for (std::size_t f = 0; f < factors.names.size(); ++f) mi.at(d, f) = discrete_mi(codes, factors.codes[f]);
  }
  return mi;
}

double modularity_from_mi(const Matrix& mi, std::vector<std::size_t>* skipped) {
  if (mi.cols < 2) throw std::invalid_argument("modularity: needs at least two factors");
  double acc = 0.0;
  std::size_t used = 0;
  for (std::size_t d = 0; d < mi.rows; ++d) {
    const double* row = mi.row(d);
    const std::size_t best = static_cast<std::size_t>(std::max_element(row, row + mi.cols) - row);
    const double theta = row[best];
    if (!(theta > 0.0)) {
      if (skipped) skipped->push_back(d);
      continue;
    }
    double dev = 0.0;
    for (std::size_t f = 0; f < mi.cols; ++f)
      if (f != best) dev += row[f] * row[f];
    acc += 1.0 - dev / (theta * theta * static_cast<double>(mi.cols - 1));
    ++used;
  }
  return used ? acc / static_cast<double>(used) : 0.0;
}

ModExpReport modularity_explicitness(const Matrix& z, const FactorTable& factors, const ModExpConfig& cfg) {
  if (factors.rows() != z.rows) throw std::invalid_argument("modularity_explicitness: factor rows differ");
  if (factors.names.size() < 2) throw std::invalid_argument("modularity_explicitness: needs at least two factors");
  ModExpReport rep;
  modularity_from_mi(factor_mi(z, factors, cfg.bins), &rep.skipped_dims);
  std::vector<LabelCodes> codes;
  for (const auto& c : factors.codes) codes.push_back(encode_labels(c));
  std::vector<double> mods, exps;
  const LogisticConfig lc{Penalty::kL2, cfg.lambda, cfg.max_iter, 1e-6};
  for (std::uint64_t seed : cfg.seeds) {
    const auto folds = stratified_folds(codes[0].y, static_cast<std::size_t>(cfg.folds), seed);
    for (std::size_t k = 0; k < folds.size(); ++k) {
      const auto train = train_rows(folds, k, z.rows);
      const auto& test = folds[k];
      const Matrix ztr = select_rows(z, train), zte = select_rows(z, test);
      FactorTable ft;
      ft.names = factors.names;
      for (const auto& c : factors.codes) ft.codes.push_back(select(c, train));
      mods.push_back(modularity_from_mi(factor_mi(ztr, ft, cfg.bins)));

      double e = 0.0;
      std::size_t nf = 0;
      for (const auto& lcodes : codes) {
        if (lcodes.k() < 2) continue;
        const auto ytr = select(lcodes.y, train), yte = select(lcodes.y, test);
        Logistic m;
        m.fit(ztr, ytr, lcodes.k(), lc);
        const Matrix p = m.predict_proba(zte);
        double auc = 0.0;
        std::size_t nc = 0;
        for (std::size_t c = 0; c < lcodes.k(); ++c) {
          std::vector<bool> pos(yte.size());
          bool any = false;
          for (std::size_t i = 0; i < yte.size(); ++i) any |= pos[i] = yte[i] == static_cast<int>(c);
          if (!any) continue;
          auc += auroc(p.column(c), pos);
          ++nc;
        }
        if (nc == 0) continue;
        e += std::clamp((auc / static_cast<double>(nc) - 0.5) / 0.5, 0.0, 1.0);
        ++nf;
      }
      exps.push_back(nf ? e / static_cast<double>(nf) : 0.0);
    }
  }
  rep.modularity = ci95(mods);
  rep.explicitness = ci95(exps);
  return rep;
}

nlohmann::json to_json(const ModExpReport& r) {
  return {{"modularity", to_json(r.modularity)},
          {"explicitness", to_json(r.explicitness)},
          {"skipped_dims", r.skipped_dims}};
}

}  // namespace vda::metrics
