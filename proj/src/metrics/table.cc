#include "vda/metrics/table.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace vda::metrics {

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) out[r] = at(r, c);
  return out;
}

Matrix embedding_matrix(const model::EmbeddingTable& t) {
  Matrix m(t.rows(), t.dim);
  m.data = t.values;
  return m;
}

Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), m.cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= m.rows) throw std::out_of_range("select_rows: row index out of range");
    std::copy_n(m.row(rows[i]), m.cols, out.data.begin() + static_cast<std::ptrdiff_t>(i * m.cols));
  }
  return out;
}

Matrix select_cols(const Matrix& m, std::size_t begin, std::size_t end) {
  if (begin >= end || end > m.cols) throw std::out_of_range("select_cols: bad column range");
  Matrix out(m.rows, end - begin);
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = begin; c < end; ++c) out.at(r, c - begin) = m.at(r, c);
  return out;
}

std::vector<int> select(const std::vector<int>& v, std::span<const std::size_t> rows) {
  std::vector<int> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = v.at(rows[i]);
  return out;
}

void Standardizer::fit(const Matrix& x) {
  mean.assign(x.cols, 0.0);
  scale.assign(x.cols, 1.0);
  if (x.rows == 0) return;
  for (std::size_t r = 0; r < x.rows; ++r)
    for (std::size_t c = 0; c < x.cols; ++c) mean[c] += x.at(r, c);
  for (double& m : mean) m /= static_cast<double>(x.rows);
  std::vector<double> var(x.cols, 0.0);
  for (std::size_t r = 0; r < x.rows; ++r)
    for (std::size_t c = 0; c < x.cols; ++c) var[c] += (x.at(r, c) - mean[c]) * (x.at(r, c) - mean[c]);
  for (std::size_t c = 0; c < x.cols; ++c) {
    const double sd = std::sqrt(var[c] / static_cast<double>(x.rows));
    scale[c] = sd > 1e-12 * (1.0 + std::abs(mean[c])) ? sd : 1.0;
  }
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols != mean.size()) throw std::invalid_argument("Standardizer: column count differs from fit");
  Matrix out(x.rows, x.cols);
  for (std::size_t r = 0; r < x.rows; ++r)
    for (std::size_t c = 0; c < x.cols; ++c) out.at(r, c) = (x.at(r, c) - mean[c]) / scale[c];
  return out;
}

LabelCodes encode_labels(const std::vector<int>& labels) {
  std::map<int, int> code;
  for (int l : labels) code.emplace(l, 0);
  LabelCodes out;
  int k = 0;
  for (auto& [label, c] : code) {
    c = k++;
    out.classes.push_back(label);
  }
  out.y.reserve(labels.size());
  for (int l : labels) out.y.push_back(code[l]);
  return out;
}

}  // namespace vda::metrics
