#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dlrec/dataset.hpp"
#include "dlrec/forest.hpp"
#include "dlrec/importance.hpp"
#include "dlrec/optimizer.hpp"

namespace dlrec {

/// Grid-searched static performance predictor.
struct TrainedSurrogate {
  ForestModel forest;
  TunerResult tuning;
};

struct TrainOptions {
  int folds = 5;
  std::vector<int> estimators = kEstimatorGrid;
  std::vector<int> depths = kDepthGrid;
  unsigned threads = 0;
};

/// Grid search, then a final fit on all rows with the selected cell.
TrainedSurrogate train_surrogate(const DesignMatrix& X, const TargetVector& y, std::uint64_t seed,
                                 const TrainOptions& options = {});

enum class ConfirmationMode { Auto, Manual };

struct RecommendOptions {
  std::string dataset_path;
  std::optional<std::string> space_path;  // default space when absent
  ConfirmationMode mode = ConfirmationMode::Auto;
  std::vector<std::string> manual_components;
  Configuration fixed;  // user constants for non-searched components
  AcquisitionParams params;
  int budget = 50;
  int n_init = 10;
  std::uint64_t seed = 0;
  int top_n = 5;
  int importance_repeats = 10;
  TrainOptions train;
  OptimizerOptions optimizer;
  std::optional<std::string> history_path;
};

struct RecommendationReport {
  Configuration recommended;
  double predicted_top1 = 0.0;
  std::vector<std::string> searched_components;
  ImportanceReport importance;
  std::optional<std::string> optimizer_history_path;
  double surrogate_cv_mse = 0.0;
  int surrogate_n_estimators = 0;
  int surrogate_max_depth = 0;
  std::uint64_t seed = 0;
  ConfirmationMode mode = ConfirmationMode::Auto;
  AcquisitionParams params;
  int budget = 0;
  int n_init = 0;
  std::vector<std::string> warnings;
  std::vector<HistoryEntry> history;
  ForestModel surrogate;  // in-memory only, not part of the document
};

/// End-to-end recommendation: train the predictor, confirm the components to
/// search (Top-N by importance, or the manual list), fix every other
/// component (user value, else the dataset mode), and search the reduced
/// space against the predictor.
RecommendationReport recommend(const RecommendOptions& options);

/// Report document (no timestamps; identical inputs give identical bytes).
nlohmann::json report_to_json(const RecommendationReport& report);

/// Predicted Top-1 accuracy (percent) of the configuration stored at
/// `config_path` under the model stored at `model_path`.
double predict_config(const std::string& model_path, const std::string& config_path);

/// Synthetic ImageClassEval-style dataset over the default space whose
/// accuracy is driven by epochs, batch size, learning rate, augmentation
/// and model size, with ~5% of the non-driving cells missing.
TabularDataset make_synthetic_dataset(int rows, std::uint64_t seed);

}  // namespace dlrec
