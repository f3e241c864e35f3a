#include "vda/metrics/cv.h"

#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>
#include <string>

namespace vda::metrics {

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels, std::size_t k,
                                                       std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("stratified_folds: need at least 2 folds");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto& [label, rows] : by_class)
    if (rows.size() < k)
      throw std::invalid_argument("stratified_folds: class " + std::to_string(label) + " has " +
                                  std::to_string(rows.size()) + " rows, fewer than " + std::to_string(k) + " folds");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t next = 0;
  for (auto& [label, rows] : by_class) {
    for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng() % i]);
    for (std::size_t r : rows) folds[next++ % k].push_back(r);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::vector<std::size_t> train_rows(const std::vector<std::vector<std::size_t>>& folds, std::size_t f,
                                    std::size_t n) {
  std::vector<bool> held(n, false);
  for (std::size_t r : folds.at(f)) held.at(r) = true;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (!held[i]) out.push_back(i);
  return out;
}

}  // namespace vda::metrics
