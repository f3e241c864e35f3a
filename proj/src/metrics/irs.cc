#include "vda/metrics/irs.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "vda/metrics/cv.h"
#include "vda/metrics/modexp.h"

namespace vda::metrics {

IrsValues irs_values(const Matrix& z, const FactorTable& factors, std::size_t top_k, int bins,
                     std::size_t expected_cells) {
  if (factors.rows() != z.rows || z.rows == 0) throw std::invalid_argument("irs: factor rows differ or no rows");
  const std::size_t nd = z.cols, nf = factors.names.size();
  IrsValues out;
  out.matrix = Matrix(nd, nf, 1.0);
  out.per_factor.assign(nf, 1.0);

  std::vector<double> mean(nd, 0.0), max_dev(nd, 0.0);
  for (std::size_t r = 0; r < z.rows; ++r)
    for (std::size_t d = 0; d < nd; ++d) mean[d] += z.at(r, d);
  for (double& m : mean) m /= static_cast<double>(z.rows);
  for (std::size_t r = 0; r < z.rows; ++r)
    for (std::size_t d = 0; d < nd; ++d) max_dev[d] = std::max(max_dev[d], std::abs(z.at(r, d) - mean[d]));
  std::vector<bool> active(nd);
  for (std::size_t d = 0; d < nd; ++d) active[d] = max_dev[d] > 1e-12 * (1.0 + std::abs(mean[d]));

  std::size_t cells = 0;
  for (std::size_t f = 0; f < nf; ++f) {
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t r = 0; r < z.rows; ++r) groups[factors.codes[f][r]].push_back(r);
    cells += groups.size();
    std::vector<double> cum(nd, 0.0);
    for (const auto& [value, rows] : groups) {
      for (std::size_t d = 0; d < nd; ++d) {
        double loc = 0.0;
        for (std::size_t r : rows) loc += z.at(r, d);
        loc /= static_cast<double>(rows.size());
        double dev = 0.0;
        for (std::size_t r : rows) dev = std::max(dev, std::abs(z.at(r, d) - loc));
        cum[d] += dev;
      }
    }
    for (std::size_t d = 0; d < nd; ++d)
      if (active[d]) out.matrix.at(d, f) = std::clamp(1.0 - cum[d] / static_cast<double>(groups.size()) / max_dev[d], 0.0, 1.0);
  }
  if (expected_cells > 0) out.coverage = static_cast<double>(cells) / static_cast<double>(expected_cells);

  double wsum = 0.0, acc = 0.0;
  for (std::size_t d = 0; d < nd; ++d) {
    if (!active[d]) continue;
    const double best = *std::max_element(out.matrix.row(d), out.matrix.row(d) + nf);
    acc += max_dev[d] * best;
    wsum += max_dev[d];
  }
  if (!(wsum > 0.0)) {
    out.zero_informative = true;
    return out;
  }
  out.irs = acc / wsum;

  const Matrix mi = factor_mi(z, factors, bins);
  for (std::size_t f = 0; f < nf; ++f) {
    std::vector<std::size_t> dims;
    for (std::size_t d = 0; d < nd; ++d)
      if (active[d]) dims.push_back(d);
    if (top_k > 0 && top_k < dims.size()) {
      std::stable_sort(dims.begin(), dims.end(), [&](std::size_t a, std::size_t b) { return mi.at(a, f) > mi.at(b, f); });
      dims.resize(top_k);
    }
    double w = 0.0, s = 0.0;
    for (std::size_t d : dims) {
      s += max_dev[d] * out.matrix.at(d, f);
      w += max_dev[d];
    }
    out.per_factor[f] = w > 0.0 ? s / w : 1.0;
  }
  return out;
}

IrsReport irs_score(const Matrix& z, const FactorTable& factors, const IrsConfig& cfg) {
  if (factors.names.size() < 2) throw std::invalid_argument("irs_score: needs at least two factors");
  if (factors.rows() != z.rows) throw std::invalid_argument("irs_score: factor rows differ");
  std::size_t expected = 0;
  for (const auto& c : factors.codes) expected += encode_labels(c).k();
  IrsReport rep;
  rep.factors = factors.names;
  std::vector<double> all;
  std::vector<std::vector<double>> per(factors.names.size());
  const LabelCodes strat = encode_labels(factors.codes[0]);
  for (std::uint64_t seed : cfg.seeds) {
    const auto folds = stratified_folds(strat.y, static_cast<std::size_t>(cfg.folds), seed);
    for (std::size_t k = 0; k < folds.size(); ++k) {
      const auto rows = train_rows(folds, k, z.rows);
      FactorTable ft;
      ft.names = factors.names;
      for (const auto& c : factors.codes) ft.codes.push_back(select(c, rows));
      const IrsValues v = irs_values(select_rows(z, rows), ft, cfg.top_k, cfg.bins, expected);
      all.push_back(v.irs);
      for (std::size_t f = 0; f < per.size(); ++f) per[f].push_back(v.per_factor[f]);
      rep.zero_informative = rep.zero_informative || v.zero_informative;
      rep.coverage = std::min(rep.coverage, v.coverage);
    }
  }
  rep.irs = ci95(all);
  for (const auto& p : per) rep.per_factor.push_back(ci95(p));
  return rep;
}

nlohmann::json to_json(const IrsReport& r) {
  nlohmann::json pf = nlohmann::json::object();
  for (std::size_t f = 0; f < r.factors.size(); ++f) pf[r.factors[f]] = to_json(r.per_factor[f]);
  return {{"irs", to_json(r.irs)}, {"per_factor", pf}, {"zero_informative", r.zero_informative}, {"coverage", r.coverage}};
}

}  // namespace vda::metrics
