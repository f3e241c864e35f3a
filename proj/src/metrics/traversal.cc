#include "vda/metrics/traversal.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

namespace vda::metrics {

TraversalResult latent_traversal_response(const Matrix& z, std::size_t views, const FactorTable& factors,
                                          const std::string& fixed, const std::string& varied) {
  if (views == 0 || z.cols % views != 0) throw std::invalid_argument("traversal: columns do not split into views");
  if (z.rows == 0 || factors.rows() != z.rows) throw std::invalid_argument("traversal: no rows or misaligned factors");
  const auto& fx = factors.column(fixed);
  for (int v : fx)
    if (v != fx[0]) throw std::invalid_argument("traversal: factor '" + fixed + "' is not constant over the probe set");
  const auto& vv = factors.column(varied);
  const std::size_t zd = z.cols / views;

  std::vector<double> mean(z.cols, 0.0), var(z.cols, 0.0);
  for (std::size_t r = 0; r < z.rows; ++r)
    for (std::size_t c = 0; c < z.cols; ++c) mean[c] += z.at(r, c);
  for (double& m : mean) m /= static_cast<double>(z.rows);
  for (std::size_t r = 0; r < z.rows; ++r)
    for (std::size_t c = 0; c < z.cols; ++c) var[c] += (z.at(r, c) - mean[c]) * (z.at(r, c) - mean[c]);

  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < z.rows; ++r) groups[vv[r]].push_back(r);

  TraversalResult out{fixed, varied, {}};
  for (std::size_t s = 0; s < views; ++s) {
    std::size_t hi = s * zd, lo = s * zd;
    for (std::size_t c = s * zd; c < (s + 1) * zd; ++c) {
      if (var[c] > var[hi]) hi = c;
      if (var[c] < var[lo]) lo = c;
    }
    for (auto [col, role] : {std::pair{hi, "max_var"}, std::pair{lo, "min_var"}}) {
      for (const auto& [value, rows] : groups) {
        double m = 0.0, ss = 0.0;
        for (std::size_t r : rows) m += z.at(r, col);
        m /= static_cast<double>(rows.size());
        for (std::size_t r : rows) ss += (z.at(r, col) - m) * (z.at(r, col) - m);
        out.rows.push_back({value, s, col - s * zd, role, m, std::sqrt(ss / static_cast<double>(rows.size())), rows.size()});
      }
    }
  }
  return out;
}

void write_traversal_csv(const std::string& path, const TraversalResult& r) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + tmp + "'");
    f << "varied_value,subspace,dim,role,mean,sd,count\n";
    char buf[64];
    for (const auto& row : r.rows) {
      f << row.varied_value << ',' << row.subspace << ',' << row.dim << ',' << row.role << ',';
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", row.mean, row.sd);
      f << buf << ',' << row.count << '\n';
    }
  }
  std::filesystem::rename(tmp, p);
}

}  // namespace vda::metrics
