#include "dlrec/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include "dlrec/errors.hpp"
#include "dlrec/rng.hpp"

namespace dlrec {

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const DesignMatrix& X, const TargetVector& y, const TreeParams& params,
              std::uint64_t seed)
      : X_(X), y_(y), params_(params), rng_(seed) {
    const auto width = static_cast<int>(X.cols());
    n_candidates_ = params.feature_subsample <= 0 ? width : std::min(params.feature_subsample, width);
    columns_.resize(static_cast<std::size_t>(width));
    std::iota(columns_.begin(), columns_.end(), 0);
  }

  std::vector<TreeNode> build(std::vector<Eigen::Index> rows) {
    grow(rows, 0);
    return std::move(nodes_);
  }

 private:
  int grow(std::vector<Eigen::Index>& rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    double sum = 0.0;
    for (auto r : rows) sum += y_[r];
    const auto n = static_cast<double>(rows.size());
    const double mean = sum / n;
    double sse = 0.0;
    for (auto r : rows) sse += (y_[r] - mean) * (y_[r] - mean);
    nodes_[id].value = mean;
    nodes_[id].count = static_cast<int>(rows.size());

    const bool depth_capped = params_.max_depth != kUnlimitedDepth && depth >= params_.max_depth;
    if (depth_capped || rows.size() < 2 * static_cast<std::size_t>(std::max(params_.min_leaf, 1)) ||
        constant_target(rows)) {
      return id;
    }
    const auto split = best_split(rows, sum, sse);
    if (split.feature < 0) return id;

    std::vector<Eigen::Index> left, right;
    for (auto r : rows) (X_(r, split.feature) <= split.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    nodes_[id].feature = split.feature;
    nodes_[id].threshold = split.threshold;
    const int l = grow(left, depth + 1);
    nodes_[id].left = l;
    const int r = grow(right, depth + 1);
    nodes_[id].right = r;
    return id;
  }

  bool constant_target(const std::vector<Eigen::Index>& rows) const {
    const double first = y_[rows.front()];
    return std::all_of(rows.begin(), rows.end(), [&](auto r) { return y_[r] == first; });
  }

  SplitChoice best_split(const std::vector<Eigen::Index>& rows, double total, double node_sse) {
    // Partial Fisher-Yates draw of the candidate columns.
    for (int k = 0; k < n_candidates_; ++k) {
      const auto j = k + static_cast<int>(rng_.index(columns_.size() - static_cast<std::size_t>(k)));
      std::swap(columns_[static_cast<std::size_t>(k)], columns_[static_cast<std::size_t>(j)]);
    }
    const auto n = rows.size();
    const auto min_leaf = static_cast<std::size_t>(std::max(params_.min_leaf, 1));
    const double parent = total * total / static_cast<double>(n);

    SplitChoice best;
    std::vector<std::pair<double, double>> sorted(n);
    for (int k = 0; k < n_candidates_; ++k) {
      const int f = columns_[static_cast<std::size_t>(k)];
      for (std::size_t i = 0; i < n; ++i) sorted[i] = {X_(rows[i], f), y_[rows[i]]};
      std::sort(sorted.begin(), sorted.end());
      if (sorted.front().first == sorted.back().first) continue;

      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_sum += sorted[i].second;
        if (sorted[i].first == sorted[i + 1].first) continue;
        const std::size_t nl = i + 1, nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(nl) +
                            right_sum * right_sum / static_cast<double>(nr) - parent;
        if (gain > best.gain) {
          best.gain = gain;
          best.feature = f;
          best.threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
          // Midpoint may round onto the right value for adjacent doubles.
          if (!(best.threshold < sorted[i + 1].first)) best.threshold = sorted[i].first;
        }
      }
    }
    // Reject splits whose gain is at rounding level of the node's SSE.
    if (!(best.gain > 1e-12 * node_sse)) best.feature = -1;
    return best;
  }

  const DesignMatrix& X_;
  const TargetVector& y_;
  TreeParams params_;
  Rng rng_;
  int n_candidates_ = 0;
  std::vector<int> columns_;
  std::vector<TreeNode> nodes_;
};

void check_training_data(const DesignMatrix& X, const TargetVector& y) {
  if (X.rows() == 0 || X.cols() == 0) throw ShapeError("empty design matrix");
  if (y.size() != X.rows()) throw ShapeError("target length does not match design matrix rows");
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

double RegressionTree::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  int id = 0;
  while (nodes_[static_cast<std::size_t>(id)].feature >= 0) {
    const auto& node = nodes_[static_cast<std::size_t>(id)];
    id = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes_[static_cast<std::size_t>(id)].value;
}

int RegressionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<int> d(nodes_.size(), 0);
  int deepest = 0;
  // Children always follow their parent in the flattened order.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& node = nodes_[i];
    if (node.feature < 0) continue;
    d[static_cast<std::size_t>(node.left)] = d[i] + 1;
    d[static_cast<std::size_t>(node.right)] = d[i] + 1;
    deepest = std::max(deepest, d[i] + 1);
  }
  return deepest;
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

void RegressionTree::collect_split_columns(std::vector<bool>& used) const {
  for (const auto& node : nodes_)
    if (node.feature >= 0) used[static_cast<std::size_t>(node.feature)] = true;
}

RegressionTree fit_tree(const DesignMatrix& X, const TargetVector& y,
                        const std::vector<Eigen::Index>& rows, const TreeParams& params,
                        std::uint64_t seed) {
  check_training_data(X, y);
  if (rows.empty()) throw ShapeError("no rows to fit");
  return RegressionTree(TreeBuilder(X, y, params, seed).build(rows));
}

RegressionTree fit_tree(const DesignMatrix& X, const TargetVector& y, const TreeParams& params,
                        std::uint64_t seed) {
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(X.rows()));
  std::iota(rows.begin(), rows.end(), 0);
  return fit_tree(X, y, rows, params, seed);
}

double ForestModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != width) {
    throw ShapeError("feature vector has width " + std::to_string(x.size()) + ", model expects " +
                     std::to_string(width));
  }
  double sum = 0.0;
  for (const auto& tree : trees) sum += tree.predict(x);
  return sum / static_cast<double>(trees.size());
}

Eigen::VectorXd ForestModel::predict_rows(const DesignMatrix& X) const {
  Eigen::VectorXd out(X.rows());
  Eigen::VectorXd row(X.cols());
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    row = X.row(r).transpose();
    out[r] = predict(row);
  }
  return out;
}

void ForestModel::check_schema(const EncodingSchema& schema) const {
  if (schema.width() != width || schema.fingerprint() != schema_fingerprint) {
    throw ShapeError("model was trained on a different encoding schema");
  }
}

ForestModel fit_forest(const DesignMatrix& X, const TargetVector& y, const ForestParams& params,
                       std::uint64_t seed) {
  check_training_data(X, y);
  if (params.n_estimators < 1) throw ValidationError("n_estimators must be positive");
  const auto n = X.rows();

  // Canonical row order: lexicographic on (features, target).
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      if (X(a, j) != X(b, j)) return X(a, j) < X(b, j);
    }
    return y[a] < y[b];
  });

  TreeParams tp;
  tp.max_depth = params.max_depth;
  tp.min_leaf = params.min_leaf;
  tp.feature_subsample = params.feature_subsample > 0
                             ? params.feature_subsample
                             : static_cast<int>((X.cols() + 2) / 3);

  ForestModel model;
  model.params = params;
  model.params.feature_subsample = tp.feature_subsample;
  model.seed = seed;
  model.width = X.cols();
  model.trees.resize(static_cast<std::size_t>(params.n_estimators));

  parallel_for(model.trees.size(), params.threads, [&](std::size_t t) {
    const auto tree_seed = mix_seed(seed, t);
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
    if (params.bootstrap) {
      Rng rng(mix_seed(tree_seed, 0));
      for (auto& r : rows) r = order[rng.index(static_cast<std::uint64_t>(n))];
    } else {
      rows = order;
    }
    model.trees[t] = fit_tree(X, y, rows, tp, mix_seed(tree_seed, 1));
  });
  return model;
}

Eigen::MatrixXd prefix_predictions(const ForestModel& model, const DesignMatrix& X) {
  if (X.cols() != model.width) throw ShapeError("design matrix width mismatch");
  const auto n_trees = static_cast<Eigen::Index>(model.trees.size());
  Eigen::MatrixXd out(X.rows(), n_trees);
  Eigen::VectorXd row(X.cols());
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    row = X.row(r).transpose();
    double sum = 0.0;
    for (Eigen::Index t = 0; t < n_trees; ++t) {
      sum += model.trees[static_cast<std::size_t>(t)].predict(row);
      out(r, t) = sum / static_cast<double>(t + 1);
    }
  }
  return out;
}

TunerResult select_best(std::vector<GridCell> cells) {
  if (cells.empty()) throw ValidationError("empty hyperparameter grid");
  TunerResult result;
  const GridCell* best = &cells.front();
  for (const auto& c : cells) {
    const bool better =
        c.cv_mse < best->cv_mse ||
        (c.cv_mse == best->cv_mse &&
         (c.n_estimators < best->n_estimators ||
          (c.n_estimators == best->n_estimators && c.max_depth < best->max_depth)));
    if (better) best = &c;
  }
  result.best_n_estimators = best->n_estimators;
  result.best_max_depth = best->max_depth;
  result.best_cv_mse = best->cv_mse;
  result.cells = std::move(cells);
  return result;
}

TunerResult grid_search(const std::function<double(int, int)>& evaluate,
                        const std::vector<int>& estimators, const std::vector<int>& depths) {
  std::vector<GridCell> cells;
  for (int n : estimators)
    for (int d : depths) cells.push_back({n, d, evaluate(n, d)});
  return select_best(std::move(cells));
}

TunerResult grid_search(const DesignMatrix& X, const TargetVector& y,
                        const GridSearchOptions& options, std::uint64_t seed) {
  check_training_data(X, y);
  const auto n = X.rows();
  if (options.folds < 2 || n < options.folds) {
    throw ValidationError("grid search needs folds >= 2 and at least one row per fold");
  }
  if (options.estimators.empty() || options.depths.empty()) throw ValidationError("empty grid");

  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(mix_seed(seed, 0xF01D));
  rng.shuffle(idx.begin(), idx.end());

  const int max_trees = *std::max_element(options.estimators.begin(), options.estimators.end());
  // mse[depth][estimator] summed over folds
  std::vector<std::vector<double>> mse(options.depths.size(),
                                       std::vector<double>(options.estimators.size(), 0.0));

  for (int fold = 0; fold < options.folds; ++fold) {
    std::vector<Eigen::Index> train, test;
    for (std::size_t k = 0; k < idx.size(); ++k)
      (static_cast<int>(k % static_cast<std::size_t>(options.folds)) == fold ? test : train).push_back(idx[k]);
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    DesignMatrix Xtr = X(train, Eigen::all), Xte = X(test, Eigen::all);
    TargetVector ytr = y(train), yte = y(test);

    for (std::size_t d = 0; d < options.depths.size(); ++d) {
      ForestParams p = options.base;
      p.n_estimators = max_trees;
      p.max_depth = options.depths[d];
      // A k-tree forest is the k-tree prefix of a larger one with the same
      // seed, so one fit serves every estimator count.
      const auto model = fit_forest(Xtr, ytr, p, seed);
      const auto pred = prefix_predictions(model, Xte);
      for (std::size_t e = 0; e < options.estimators.size(); ++e) {
        const auto col = pred.col(options.estimators[e] - 1);
        mse[d][e] += (col - yte).squaredNorm() / static_cast<double>(yte.size());
      }
    }
  }

  std::vector<GridCell> cells;
  for (std::size_t e = 0; e < options.estimators.size(); ++e)
    for (std::size_t d = 0; d < options.depths.size(); ++d)
      cells.push_back({options.estimators[e], options.depths[d], mse[d][e] / options.folds});
  return select_best(std::move(cells));
}

nlohmann::json forest_to_json(const ForestModel& model, const SearchSpace& space) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : model.trees) {
    std::vector<int> feature, left, right, count;
    std::vector<double> threshold, value;
    for (const auto& node : tree.nodes()) {
      feature.push_back(node.feature);
      threshold.push_back(node.threshold);
      left.push_back(node.left);
      right.push_back(node.right);
      value.push_back(node.value);
      count.push_back(node.count);
    }
    trees.push_back({{"feature", feature}, {"threshold", threshold}, {"left", left},
                     {"right", right}, {"value", value}, {"count", count}});
  }
  return {
      {"format", "dlrec-forest"},
      {"version", kForestFormatVersion},
      {"n_estimators", model.params.n_estimators},
      {"max_depth", model.params.max_depth},
      {"min_leaf", model.params.min_leaf},
      {"feature_subsample", model.params.feature_subsample},
      {"bootstrap", model.params.bootstrap},
      {"seed", model.seed},
      {"schema_fingerprint", model.schema_fingerprint},
      {"width", model.width},
      {"space", space_to_json(space)},
      {"trees", trees},
  };
}

ForestModel forest_from_json(const nlohmann::json& doc, SearchSpace* space) {
  try {
    if (doc.at("format").get<std::string>() != "dlrec-forest") throw IoError("not a forest model document");
    const int version = doc.at("version").get<int>();
    if (version != kForestFormatVersion) {
      throw IoError("forest model version " + std::to_string(version) + " is not supported (expected " +
                    std::to_string(kForestFormatVersion) + ")");
    }
    ForestModel m;
    m.params.n_estimators = doc.at("n_estimators").get<int>();
    m.params.max_depth = doc.at("max_depth").get<int>();
    m.params.min_leaf = doc.at("min_leaf").get<int>();
    m.params.feature_subsample = doc.at("feature_subsample").get<int>();
    m.params.bootstrap = doc.at("bootstrap").get<bool>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.schema_fingerprint = doc.at("schema_fingerprint").get<std::uint64_t>();
    m.width = doc.at("width").get<Eigen::Index>();
    for (const auto& t : doc.at("trees")) {
      const auto feature = t.at("feature").get<std::vector<int>>();
      const auto threshold = t.at("threshold").get<std::vector<double>>();
      const auto left = t.at("left").get<std::vector<int>>();
      const auto right = t.at("right").get<std::vector<int>>();
      const auto value = t.at("value").get<std::vector<double>>();
      const auto count = t.at("count").get<std::vector<int>>();
      const auto n = feature.size();
      if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n ||
          value.size() != n || count.size() != n) {
        throw IoError("corrupt forest model: inconsistent node arrays");
      }
      std::vector<TreeNode> nodes(n);
      for (std::size_t i = 0; i < n; ++i) {
        nodes[i] = {feature[i], threshold[i], left[i], right[i], value[i], count[i]};
        if (feature[i] >= 0) {
          const auto bad = [&](int c) { return c <= static_cast<int>(i) || c >= static_cast<int>(n); };
          if (feature[i] >= m.width || bad(left[i]) || bad(right[i])) {
            throw IoError("corrupt forest model: invalid node links");
          }
        }
      }
      m.trees.emplace_back(std::move(nodes));
    }
    if (static_cast<int>(m.trees.size()) != m.params.n_estimators) {
      throw IoError("corrupt forest model: tree count does not match n_estimators");
    }
    auto sp = space_from_json(doc.at("space"));
    if (EncodingSchema(sp).fingerprint() != m.schema_fingerprint) {
      throw IoError("corrupt forest model: embedded space does not match the schema fingerprint");
    }
    if (space) *space = std::move(sp);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("corrupt forest model: ") + e.what());
  } catch (const ValidationError& e) {
    throw IoError(std::string("corrupt forest model: ") + e.what());
  }
}

void save_forest(const ForestModel& model, const SearchSpace& space, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << forest_to_json(model, space).dump() << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

ForestModel load_forest(const std::string& path, SearchSpace* space) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("corrupt forest model '" + path + "': " + e.what());
  }
  return forest_from_json(doc, space);
}

}  // namespace dlrec
