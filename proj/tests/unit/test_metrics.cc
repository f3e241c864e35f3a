#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "vda/metrics/cv.h"
#include "vda/metrics/dci.h"
#include "vda/metrics/gcn.h"
#include "vda/metrics/mi.h"
#include "vda/metrics/modexp.h"
#include "vda/metrics/irs.h"
#include "vda/metrics/stats.h"
#include "vda/metrics/task_eval.h"
#include "vda/metrics/traversal.h"

using namespace vda::metrics;
namespace fs = std::filesystem;

namespace {

// Two balanced factors: a (5 classes) and b (4 classes), every cell filled.
FactorTable grid_factors(std::size_t n) {
  FactorTable ft;
  ft.names = {"a", "b"};
  ft.codes.assign(2, std::vector<int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    ft.codes[0][i] = static_cast<int>(i % 5);
    ft.codes[1][i] = static_cast<int>((i / 5) % 4);
  }
  return ft;
}

Matrix identity_code(const FactorTable& ft) {
  Matrix z(ft.rows(), ft.names.size());
  for (std::size_t r = 0; r < z.rows; ++r)
    for (std::size_t f = 0; f < z.cols; ++f) z.at(r, f) = ft.codes[f][r];
  return z;
}

Matrix noise_code(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Matrix z(n, d);
  for (double& v : z.data) v = nd(rng);
  return z;
}

// Independent histogram entropy: equal-width bins over [min, max].
double histogram_entropy(const std::vector<double>& x, int bins) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  std::map<int, double> counts;
  for (double v : x) {
    int b = static_cast<int>(std::floor((v - *lo) / (*hi - *lo) * bins));
    counts[std::min(b, bins - 1)] += 1.0;
  }
  double h = 0.0;
  for (const auto& [b, c] : counts) h -= c / x.size() * std::log(c / x.size());
  return h;
}

Matrix permute_cols(const Matrix& z, const std::vector<std::size_t>& perm) {
  Matrix out(z.rows, z.cols);
  for (std::size_t r = 0; r < z.rows; ++r)
    for (std::size_t c = 0; c < z.cols; ++c) out.at(r, c) = z.at(r, perm[c]);
  return out;
}

}  // namespace

TEST_CASE("ci95 uses the sample sd and the 1.96 normal quantile") {
  const Interval i = ci95({1.0, 2.0, 3.0, 4.0});
  CHECK(i.mean == doctest::Approx(2.5));
  CHECK(i.sd == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(i.hi - i.mean == doctest::Approx(1.96 * std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(i.n == 4);
  const auto j = to_json(i);
  CHECK(j.contains("ci95_lo"));
  CHECK(j.contains("ci95_hi"));
}

TEST_CASE("accuracy, F1 and AUROC on hand examples") {
  const std::vector<int> y{0, 0, 1, 1}, p{0, 1, 1, 1};
  CHECK(accuracy(y, p) == doctest::Approx(0.75));
  // class 0: precision 1, recall 0.5 -> 2/3; class 1: precision 2/3, recall 1 -> 0.8
  CHECK(f1_macro(y, p, 2) == doctest::Approx((2.0 / 3.0 + 0.8) / 2.0));
  CHECK(f1_weighted(y, p, 2) == doctest::Approx((2.0 / 3.0 + 0.8) / 2.0));
  const std::vector<int> y2{0, 1, 1, 1}, p2{0, 1, 1, 0};
  // class 0: p 0.5 r 1 -> 2/3; class 1: p 1 r 2/3 -> 0.8; supports 1 and 3
  CHECK(f1_weighted(y2, p2, 2) == doctest::Approx((2.0 / 3.0 + 3 * 0.8) / 4.0));
  CHECK(auroc({0.1, 0.2, 0.8, 0.9}, {false, false, true, true}) == doctest::Approx(1.0));
  CHECK(auroc({0.9, 0.8, 0.2, 0.1}, {false, false, true, true}) == doctest::Approx(0.0));
  CHECK(auroc({0.5, 0.5, 0.5, 0.5}, {false, true, false, true}) == doctest::Approx(0.5));
  CHECK(auroc({0.1, 0.2}, {true, true}) == doctest::Approx(0.5));
}

TEST_CASE("stratified folds partition rows and balance classes") {
  std::vector<int> y;
  for (int i = 0; i < 53; ++i) y.push_back(i % 3);
  const auto folds = stratified_folds(y, 5, 11);
  REQUIRE(folds.size() == 5);
  std::vector<int> seen(y.size(), 0);
  for (const auto& f : folds) {
    std::vector<int> cls(3, 0);
    for (auto r : f) {
      ++seen[r];
      ++cls[static_cast<std::size_t>(y[r])];
    }
    for (int c : cls) CHECK((c == 3 || c == 4));
  }
  for (int s : seen) CHECK(s == 1);
  const auto tr = train_rows(folds, 2, y.size());
  CHECK(tr.size() + folds[2].size() == y.size());
  CHECK(stratified_folds(y, 5, 11) == folds);
  std::vector<int> tiny{0, 0, 0, 0, 0, 1, 1, 1};
  CHECK_THROWS_AS(stratified_folds(tiny, 5, 0), std::invalid_argument);
}

TEST_CASE("MI of a duplicated dimension equals its histogram entropy") {
  Matrix z = noise_code(2000, 3, 1);
  for (std::size_t r = 0; r < z.rows; ++r) z.at(r, 1) = z.at(r, 0);
  const MiResult m = mi_matrix(z, 30);
  const double h = histogram_entropy(z.column(0), 30);
  CHECK(m.mi.at(0, 1) == doctest::Approx(h).epsilon(1e-12));
  CHECK(m.mi.at(0, 0) == doctest::Approx(h).epsilon(1e-12));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(m.mi.at(i, j) >= 0.0);
      CHECK(m.mi.at(i, j) == doctest::Approx(m.mi.at(j, i)).epsilon(1e-12));
    }
}

TEST_CASE("MI of independent uniform dimensions is near zero") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u;
  Matrix z(100000, 3);
  for (double& v : z.data) v = u(rng);
  CHECK(mi_matrix(z, 30).mean_offdiag <= 0.01);
}

TEST_CASE("MI handles constant columns and rejects fewer than two bins") {
  Matrix z = noise_code(100, 2, 2);
  for (std::size_t r = 0; r < z.rows; ++r) z.at(r, 1) = 3.0;
  const MiResult m = mi_matrix(z, 2);
  CHECK(m.mi.at(0, 1) == 0.0);
  CHECK(m.constant[1]);
  CHECK_FALSE(m.constant[0]);
  CHECK_THROWS_AS(discretize(z.column(0), 1), std::invalid_argument);
}

TEST_CASE("GCN total correlation matches the bivariate Gaussian closed form") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  const double rho = 0.5;
  Matrix z(100000, 2);
  for (std::size_t r = 0; r < z.rows; ++r) {
    const double a = nd(rng), b = nd(rng);
    z.at(r, 0) = a;
    z.at(r, 1) = rho * a + std::sqrt(1 - rho * rho) * b;
  }
  const GcnResult g = gcn_score(z);
  CHECK(g.tc == doctest::Approx(-0.5 * std::log(1 - rho * rho)).epsilon(0.03));
  CHECK(g.gcn == doctest::Approx(g.tc / (2 * g.mean_abs_offdiag)));
  CHECK_FALSE(g.ridge_added);
}

TEST_CASE("GCN is near zero for diagonal covariance and flags duplicates") {
  const GcnResult diag = gcn_score(noise_code(50000, 4, 3));
  CHECK(diag.tc < 1e-3);
  CHECK(diag.gcn < 0.05);
  CHECK(diag.gcn >= 0.0);
  Matrix dup = noise_code(500, 3, 4);
  for (std::size_t r = 0; r < dup.rows; ++r) dup.at(r, 2) = dup.at(r, 0);
  const GcnResult g = gcn_score(dup);
  CHECK(g.ridge_added);
  CHECK(std::isfinite(g.tc));
  CHECK(g.tc > 3.0);
  CHECK_THROWS_AS(gcn_score(noise_code(3, 3, 0)), std::invalid_argument);
}

TEST_CASE("MI and GCN are invariant to dimension permutation") {
  Matrix z = noise_code(3000, 4, 9);
  for (std::size_t r = 0; r < z.rows; ++r) z.at(r, 3) = 0.7 * z.at(r, 0) + 0.3 * z.at(r, 3);
  const std::vector<std::size_t> perm{2, 3, 0, 1};
  const Matrix zp = permute_cols(z, perm);
  CHECK(mi_matrix(zp).mean_offdiag == doctest::Approx(mi_matrix(z).mean_offdiag).epsilon(1e-12));
  CHECK(gcn_score(zp).gcn == doctest::Approx(gcn_score(z).gcn).epsilon(1e-9));
}

TEST_CASE("DCI entropy terms on hand-built importance matrices") {
  Matrix r(4, 2);
  r.at(0, 0) = r.at(1, 0) = 1.0;
  r.at(2, 1) = r.at(3, 1) = 1.0;
  // each factor spread over two of four dims: 1 - log 2 / log 4
  CHECK(dci_completeness(r) == doctest::Approx(1.0 - std::log(2.0) / std::log(4.0)));
  CHECK(dci_disentanglement(r) == doctest::Approx(1.0));
  Matrix u(3, 2, 1.0);
  CHECK(dci_disentanglement(u) == doctest::Approx(0.0));
  CHECK(dci_completeness(u) == doctest::Approx(0.0));
  Matrix mixed(2, 2);
  mixed.at(0, 0) = 3.0;
  mixed.at(1, 0) = mixed.at(1, 1) = 1.0;
  // dim 0 carries weight 3/5 with score 1, dim 1 weight 2/5 with score 0
  CHECK(dci_disentanglement(mixed) == doctest::Approx(0.6));
}

TEST_CASE("DCI of an identity code is near perfect") {
  const FactorTable ft = grid_factors(400);
  const DciReport rep = dci_scores(identity_code(ft), ft);
  REQUIRE(rep.disentanglement.has_value());
  CHECK(rep.disentanglement->mean >= 0.95);
  CHECK(rep.completeness.mean >= 0.95);
  CHECK(rep.informativeness.mean >= 0.99);
  CHECK(rep.informativeness.n == 25);
}

TEST_CASE("DCI informativeness of a noise code is near chance") {
  const FactorTable ft = grid_factors(1000);
  const DciReport rep = dci_scores(noise_code(1000, 4, 21), ft);
  const double chance = (1.0 / 5 + 1.0 / 4) / 2;
  CHECK(std::abs(rep.informativeness.mean - chance) <= 0.05);
}

TEST_CASE("DCI informativeness is invariant to per-dimension affine maps") {
  const FactorTable ft = grid_factors(400);
  Matrix z = noise_code(400, 3, 13);
  for (std::size_t r = 0; r < z.rows; ++r) z.at(r, 0) += ft.codes[0][r];
  Matrix za = z;
  const double scale[3] = {3.0, -0.25, 40.0}, shift[3] = {-7.0, 2.0, 0.5};
  for (std::size_t r = 0; r < z.rows; ++r)
    for (std::size_t c = 0; c < 3; ++c) za.at(r, c) = scale[c] * z.at(r, c) + shift[c];
  DciConfig cfg;
  cfg.seeds = {0, 1};
  const double a = dci_scores(z, ft, cfg).informativeness.mean;
  const double b = dci_scores(za, ft, cfg).informativeness.mean;
  CHECK(a == doctest::Approx(b).epsilon(1e-9));
}

TEST_CASE("DCI excludes single-class factors") {
  FactorTable ft = grid_factors(100);
  ft.names.push_back("const");
  ft.codes.push_back(std::vector<int>(100, 4));
  DciConfig cfg;
  cfg.seeds = {0};
  const DciReport rep = dci_scores(identity_code(grid_factors(100)), ft, cfg);
  CHECK(rep.excluded == std::vector<std::string>{"const"});
  CHECK(rep.factors.size() == 2);
}

TEST_CASE("modularity formula on hand MI matrices") {
  Matrix one(2, 2);
  one.at(0, 0) = 0.8;
  one.at(1, 1) = 0.3;
  CHECK(modularity_from_mi(one) == doctest::Approx(1.0));
  Matrix tie(1, 2, 0.4);
  CHECK(modularity_from_mi(tie) == doctest::Approx(0.0));
  Matrix with_zero(2, 2);
  with_zero.at(0, 0) = 1.0;
  std::vector<std::size_t> skipped;
  CHECK(modularity_from_mi(with_zero, &skipped) == doctest::Approx(1.0));
  CHECK(skipped == std::vector<std::size_t>{1});
  CHECK_THROWS_AS(modularity_from_mi(Matrix(2, 1)), std::invalid_argument);
}

TEST_CASE("separable binary factors give explicitness 1 and modularity 1") {
  FactorTable ft;
  ft.names = {"a", "b"};
  ft.codes.assign(2, std::vector<int>(200));
  for (std::size_t i = 0; i < 200; ++i) {
    ft.codes[0][i] = static_cast<int>(i % 2);
    ft.codes[1][i] = static_cast<int>((i / 2) % 2);
  }
  const ModExpReport rep = modularity_explicitness(identity_code(ft), ft);
  CHECK(rep.explicitness.mean == doctest::Approx(1.0));
  CHECK(rep.modularity.mean == doctest::Approx(1.0));
}

TEST_CASE("IRS of a code driven only by the target factor") {
  const FactorTable ft = grid_factors(400);
  Matrix z(400, 1);
  for (std::size_t r = 0; r < z.rows; ++r) z.at(r, 0) = ft.codes[0][r];
  const IrsValues v = irs_values(z, ft);
  CHECK(v.irs == doctest::Approx(1.0));
  CHECK(v.per_factor[0] == doctest::Approx(1.0));
  // fixing the other factor leaves the full deviation in place
  CHECK(v.per_factor[1] == doctest::Approx(0.0));
  CHECK_FALSE(v.zero_informative);
  const IrsReport rep = irs_score(z, ft);
  CHECK(rep.irs.mean == doctest::Approx(1.0));
  CHECK(rep.per_factor[1].mean <= 0.05);
  CHECK(rep.coverage == doctest::Approx(1.0));
}

TEST_CASE("IRS of a constant code is 1 with the zero-informative flag") {
  const FactorTable ft = grid_factors(100);
  const IrsValues v = irs_values(Matrix(100, 3, 2.5), ft);
  CHECK(v.irs == 1.0);
  CHECK(v.zero_informative);
}

TEST_CASE("IRS coverage reports missing factor cells") {
  FactorTable ft = grid_factors(100);
  const IrsValues v = irs_values(noise_code(100, 2, 0), ft, 0, 30, 12);
  CHECK(v.coverage == doctest::Approx(9.0 / 12.0));
}

TEST_CASE("bounded metrics stay in range and repeat exactly") {
  const FactorTable ft = grid_factors(300);
  Matrix z = noise_code(300, 4, 17);
  for (std::size_t r = 0; r < z.rows; ++r) z.at(r, 1) += 0.5 * ft.codes[1][r];
  DciConfig dc;
  dc.seeds = {0, 1};
  ModExpConfig mc;
  mc.seeds = {0, 1};
  IrsConfig ic;
  ic.seeds = {0, 1};
  const auto d1 = to_json(dci_scores(z, ft, dc)), d2 = to_json(dci_scores(z, ft, dc));
  const auto m1 = to_json(modularity_explicitness(z, ft, mc)), m2 = to_json(modularity_explicitness(z, ft, mc));
  const auto i1 = to_json(irs_score(z, ft, ic)), i2 = to_json(irs_score(z, ft, ic));
  CHECK(d1 == d2);
  CHECK(m1 == m2);
  CHECK(i1 == i2);
  for (const char* k : {"disentanglement", "completeness", "informativeness"}) {
    CHECK(d1[k]["mean"].get<double>() >= 0.0);
    CHECK(d1[k]["mean"].get<double>() <= 1.0);
  }
  for (const char* k : {"modularity", "explicitness"}) {
    CHECK(m1[k]["mean"].get<double>() >= 0.0);
    CHECK(m1[k]["mean"].get<double>() <= 1.0);
  }
  CHECK(i1["irs"]["mean"].get<double>() >= 0.0);
  CHECK(i1["irs"]["mean"].get<double>() <= 1.0);
  CHECK(mi_matrix(z).mean_offdiag >= 0.0);
  CHECK(gcn_score(z).gcn >= 0.0);
}

TEST_CASE("identity code outscores a noise code on every seed") {
  const FactorTable ft = grid_factors(200);
  const Matrix id = identity_code(ft);
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    const Matrix noise = noise_code(200, 2, 100 + seed);
    DciConfig dc;
    dc.seeds = {seed};
    ModExpConfig mc;
    mc.seeds = {seed};
    IrsConfig ic;
    ic.seeds = {seed};
    const DciReport di = dci_scores(id, ft, dc), dn = dci_scores(noise, ft, dc);
    CHECK(di.disentanglement->mean >= dn.disentanglement->mean);
    CHECK(di.informativeness.mean >= dn.informativeness.mean);
    const ModExpReport mi = modularity_explicitness(id, ft, mc), mn = modularity_explicitness(noise, ft, mc);
    CHECK(mi.modularity.mean >= mn.modularity.mean);
    CHECK(mi.explicitness.mean >= mn.explicitness.mean);
    CHECK(irs_score(id, ft, ic).irs.mean >= irs_score(noise, ft, ic).irs.mean);
  }
}

TEST_CASE("task evaluation recovers a label determined by one dimension") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  Matrix z = noise_code(250, 3, 4);
  std::vector<int> y(250);
  for (std::size_t r = 0; r < z.rows; ++r) {
    y[r] = static_cast<int>(r % 5);
    z.at(r, 1) = y[r] + u(rng);
  }
  const TaskReport lr = task_eval_cv(z, y, Classifier::kLogistic);
  CHECK(lr.accuracy.mean >= 0.99);
  CHECK(lr.accuracy.n == 25);
  CHECK(lr.chosen.size() == 25);
  TaskConfig one;
  one.seeds = {0};
  CHECK(task_eval_cv(z, y, Classifier::kSvm, one).accuracy.mean >= 0.99);
  CHECK(task_eval_cv(z, y, Classifier::kRandomForest, one).accuracy.mean >= 0.99);
}

TEST_CASE("task evaluation on random balanced labels stays near chance") {
  std::mt19937_64 rng(8);
  std::vector<int> y(500);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(i % 5);
  std::shuffle(y.begin(), y.end(), rng);
  const TaskReport rep = task_eval_cv(noise_code(500, 4, 9), y, Classifier::kLogistic);
  CHECK(rep.accuracy.mean >= 0.14);
  CHECK(rep.accuracy.mean <= 0.26);
  // balanced test folds make weighted and macro F1 coincide
  CHECK(rep.f1_weighted.mean == doctest::Approx(rep.f1_macro.mean).epsilon(1e-12));
}

TEST_CASE("task evaluation reports under-populated classes") {
  std::vector<int> y(40, 0);
  for (int i = 0; i < 3; ++i) y[static_cast<std::size_t>(i)] = 1;
  CHECK_THROWS_AS(task_eval_cv(noise_code(40, 2, 0), y, Classifier::kLogistic), std::invalid_argument);
  CHECK_THROWS_AS(parse_classifier("knn"), std::invalid_argument);
  CHECK(parse_classifier("random_forest") == Classifier::kRandomForest);
}

TEST_CASE("traversal selects one max and one min variance dim per subspace") {
  FactorTable ft;
  ft.names = {"speaker", "vowel"};
  ft.codes = {std::vector<int>(50, 7), std::vector<int>(50)};
  Matrix z = noise_code(50, 6, 1);
  for (std::size_t r = 0; r < 50; ++r) {
    ft.codes[1][r] = static_cast<int>(r % 5);
    z.at(r, 1) = 10.0 * ft.codes[1][r];
    z.at(r, 4) = 0.0;
  }
  const TraversalResult t = latent_traversal_response(z, 2, ft, "speaker", "vowel");
  REQUIRE(t.rows.size() == 2 * 2 * 5);
  std::map<std::pair<std::size_t, std::string>, std::size_t> picked;
  for (const auto& row : t.rows) picked[{row.subspace, row.role}] = row.dim;
  CHECK(picked.size() == 4);
  CHECK(picked[{0, "max_var"}] == 1);
  CHECK(picked[{1, "min_var"}] == 1);
  for (const auto& row : t.rows) {
    CHECK(row.count == 10);
    if (row.subspace == 0 && row.role == "max_var") CHECK(row.mean == doctest::Approx(10.0 * row.varied_value));
  }
  const fs::path out = fs::temp_directory_path() / "vda_traversal_test.csv";
  write_traversal_csv(out.string(), t);
  std::ifstream f(out);
  std::string header;
  std::getline(f, header);
  CHECK(header == "varied_value,subspace,dim,role,mean,sd,count");
  fs::remove(out);
}

TEST_CASE("traversal of a constant input has zero spread and rejects a varying fixed factor") {
  FactorTable ft;
  ft.names = {"speaker", "vowel"};
  ft.codes = {std::vector<int>(20, 1), std::vector<int>(20)};
  for (std::size_t r = 0; r < 20; ++r) ft.codes[1][r] = static_cast<int>(r % 4);
  const TraversalResult t = latent_traversal_response(Matrix(20, 4, 0.5), 2, ft, "speaker", "vowel");
  for (const auto& row : t.rows) CHECK(row.sd == 0.0);
  ft.codes[0][3] = 2;
  CHECK_THROWS_AS(latent_traversal_response(Matrix(20, 4), 2, ft, "speaker", "vowel"), std::invalid_argument);
  CHECK_THROWS_AS(latent_traversal_response(Matrix(20, 4), 2, ft, "gender", "vowel"), std::out_of_range);
}
