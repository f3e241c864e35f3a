#include "vda/metrics/gcn.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vda::metrics {

GcnResult gcn_score(const Matrix& z) {
  const std::size_t n = z.rows, d = z.cols;
  if (d == 0 || n < d + 1) throw std::invalid_argument("gcn_score: need at least dims + 1 rows");
  Eigen::MatrixXd x(n, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = z.at(r, c);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);

  GcnResult out;
  if (d > 1) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        if (i != j) acc += std::abs(cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    out.mean_abs_offdiag = acc / static_cast<double>(d * (d - 1));
  }
  // Singular or near-singular covariances get a ridge before the log-det.
  const double scale = std::max(cov.diagonal().maxCoeff(), 1e-300);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 1e-12 * scale) {
    cov += 1e-6 * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    out.ridge_added = true;
    ldlt.compute(cov);
  }
  double logdet = 0.0, logdiag = 0.0;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(d); ++i) {
    logdet += std::log(ldlt.vectorD()(i));
    logdiag += std::log(cov(i, i));
  }
  out.tc = std::max(0.0, 0.5 * (logdiag - logdet));
  out.gcn = out.tc / (static_cast<double>(d) * std::max(out.mean_abs_offdiag, 1e-8));
  return out;
}

}  // namespace vda::metrics
