#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "dlrec/encoding.hpp"

namespace dlrec {

inline constexpr int kUnlimitedDepth = -1;

struct TreeParams {
  int max_depth = kUnlimitedDepth;
  int min_leaf = 1;
  /// Candidate columns drawn per node; 0 means every column.
  int feature_subsample = 0;
};

/// Flattened node. Internal nodes route x[feature] <= threshold to `left`.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // mean target of the training rows reaching the node
  int count = 0;
};

/// CART regression tree grown by greedy variance reduction.
class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const;
  std::size_t leaf_count() const;

  /// Marks every column used by some split.
  void collect_split_columns(std::vector<bool>& used) const;

 private:
  std::vector<TreeNode> nodes_;
};

/// Fits on the rows listed in `rows` (repeats allowed, as in a bootstrap
/// sample). Column sampling per node is driven by `seed`.
RegressionTree fit_tree(const DesignMatrix& X, const TargetVector& y,
                        const std::vector<Eigen::Index>& rows, const TreeParams& params,
                        std::uint64_t seed);

RegressionTree fit_tree(const DesignMatrix& X, const TargetVector& y, const TreeParams& params,
                        std::uint64_t seed);

struct ForestParams {
  int n_estimators = 100;
  int max_depth = 10;
  int min_leaf = 1;
  /// 0 selects ceil(width / 3).
  int feature_subsample = 0;
  bool bootstrap = true;
  /// Worker threads for tree fitting; 0 uses the hardware concurrency. The
  /// fitted model does not depend on this value.
  unsigned threads = 0;
};

struct ForestModel {
  std::vector<RegressionTree> trees;
  ForestParams params;
  std::uint64_t seed = 0;
  std::uint64_t schema_fingerprint = 0;
  Eigen::Index width = 0;

  /// Mean of the tree outputs. Throws ShapeError on width mismatch.
  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd predict_rows(const DesignMatrix& X) const;

  /// Throws ShapeError if the model was not trained on `schema`.
  void check_schema(const EncodingSchema& schema) const;
};

/// Trains `params.n_estimators` trees. Rows are put in a canonical
/// (lexicographic) order first, so the model does not depend on the input
/// row order; tree t draws its bootstrap sample and column subsets from
/// mix_seed(seed, t).
ForestModel fit_forest(const DesignMatrix& X, const TargetVector& y, const ForestParams& params,
                       std::uint64_t seed);

/// Predictions of the first k trees for k = 1..n, as a (rows x trees) matrix of
/// running means; column k-1 equals the prediction of a k-tree forest.
Eigen::MatrixXd prefix_predictions(const ForestModel& model, const DesignMatrix& X);

// Hyperparameter grid search.

inline const std::vector<int> kEstimatorGrid = {5, 10, 30, 50, 80, 100, 150, 180, 200, 250, 280, 300};
inline const std::vector<int> kDepthGrid = {3, 5, 10, 15};

struct GridCell {
  int n_estimators = 0;
  int max_depth = 0;
  double cv_mse = 0.0;
};

struct TunerResult {
  int best_n_estimators = 0;
  int best_max_depth = 0;
  double best_cv_mse = 0.0;
  std::vector<GridCell> cells;  // estimator-major order
};

struct GridSearchOptions {
  int folds = 5;
  std::vector<int> estimators = kEstimatorGrid;
  std::vector<int> depths = kDepthGrid;
  ForestParams base;  // n_estimators and max_depth are overwritten
};

/// Argmin over evaluated cells; ties go to fewer estimators, then to the
/// shallower depth.
TunerResult select_best(std::vector<GridCell> cells);

/// Evaluates every (n_estimators, max_depth) cell with `evaluate`.
TunerResult grid_search(const std::function<double(int n_estimators, int max_depth)>& evaluate,
                        const std::vector<int>& estimators = kEstimatorGrid,
                        const std::vector<int>& depths = kDepthGrid);

/// k-fold cross-validated MSE for every grid cell.
TunerResult grid_search(const DesignMatrix& X, const TargetVector& y,
                        const GridSearchOptions& options, std::uint64_t seed);

// Persistence. The document embeds the search space so a model file alone
// suffices to encode configurations.
inline constexpr int kForestFormatVersion = 1;

nlohmann::json forest_to_json(const ForestModel& model, const SearchSpace& space);
ForestModel forest_from_json(const nlohmann::json& doc, SearchSpace* space = nullptr);
void save_forest(const ForestModel& model, const SearchSpace& space, const std::string& path);
ForestModel load_forest(const std::string& path, SearchSpace* space = nullptr);

}  // namespace dlrec
