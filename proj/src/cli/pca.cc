#include "vda/cli/pca.h"

#include <Eigen/Dense>
#include <cmath>

namespace vda::cli {

metrics::Matrix pca_project(const metrics::Matrix& x, std::size_t k) {
  metrics::Matrix out(x.rows, k);
  if (x.rows == 0 || x.cols == 0) return out;
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMat> m(x.data.data(), static_cast<Eigen::Index>(x.rows), static_cast<Eigen::Index>(x.cols));
  const RowMat centred = m.rowwise() - m.colwise().mean();
  const Eigen::MatrixXd cov = centred.transpose() * centred;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::Index d = static_cast<Eigen::Index>(x.cols);
  for (std::size_t c = 0; c < k && static_cast<Eigen::Index>(c) < d; ++c) {
    Eigen::VectorXd v = eig.eigenvectors().col(d - 1 - static_cast<Eigen::Index>(c));
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    const Eigen::VectorXd p = centred * v;
    for (std::size_t r = 0; r < x.rows; ++r) out.at(r, c) = p(static_cast<Eigen::Index>(r));
  }
  return out;
}

}  // namespace vda::cli
