#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "vda/metrics/stats.h"
#include "vda/metrics/table.h"

namespace vda::metrics {

enum class Classifier { kLogistic, kRandomForest, kSvm };

std::string classifier_name(Classifier c);
Classifier parse_classifier(const std::string& s);

struct TaskConfig {
  int folds = 5;
  int inner_folds = 3;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  // Hyper-parameter grid searched by the inner folds; empty uses the default
  // for the classifier (logistic L2 weight, SVM C, forest depth).
  std::vector<double> grid;
};

std::vector<double> default_grid(Classifier c);

struct TaskReport {
  std::string classifier;
  Interval accuracy;
  Interval f1_weighted;
  Interval f1_macro;
  std::size_t rows = 0;
  std::size_t classes = 0;
  std::vector<double> chosen;  // selected grid value per run
};

// Stratified outer folds x seeds; inside each outer training set a stratified
// inner cross-validation picks the grid value by mean accuracy. Throws
// std::invalid_argument when a class has fewer rows than outer folds.
TaskReport task_eval_cv(const Matrix& z, const std::vector<int>& labels, Classifier c, const TaskConfig& cfg = {});

nlohmann::json to_json(const TaskReport& r);

}  // namespace vda::metrics
