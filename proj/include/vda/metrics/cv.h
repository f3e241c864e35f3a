#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace vda::metrics {

// Test-row indices of k stratified folds. Rows of each class are shuffled with
// the seed and dealt round-robin, continuing across classes, so fold sizes
// differ by at most one. Throws std::invalid_argument when a class has fewer
// than k rows.
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels, std::size_t k,
                                                       std::uint64_t seed);

// Complement of fold `f` over n rows.
std::vector<std::size_t> train_rows(const std::vector<std::vector<std::size_t>>& folds, std::size_t f,
                                    std::size_t n);

}  // namespace vda::metrics
