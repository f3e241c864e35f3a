#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vda/model/embed.h"

namespace vda::metrics {

using model::FactorTable;

// Dense row-major matrix of latent rows.
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
  std::vector<double> column(std::size_t c) const;
};

Matrix embedding_matrix(const model::EmbeddingTable& t);
Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows);
Matrix select_cols(const Matrix& m, std::size_t begin, std::size_t end);
std::vector<int> select(const std::vector<int>& v, std::span<const std::size_t> rows);

// Per-column z-scoring fitted on one matrix and applied to others. Constant
// columns keep scale 1.
struct Standardizer {
  std::vector<double> mean, scale;

  void fit(const Matrix& x);
  Matrix apply(const Matrix& x) const;
};

// Maps arbitrary integer labels to 0..K-1 in increasing label order.
struct LabelCodes {
  std::vector<int> y;
  std::vector<int> classes;

  std::size_t k() const { return classes.size(); }
};

LabelCodes encode_labels(const std::vector<int>& labels);

}  // namespace vda::metrics
