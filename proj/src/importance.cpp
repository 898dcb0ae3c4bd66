#include "dlrec/importance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dlrec/errors.hpp"
#include "dlrec/rng.hpp"

namespace dlrec {

namespace {

double mse(const Eigen::VectorXd& pred, const TargetVector& y) {
  return (pred - y).squaredNorm() / static_cast<double>(y.size());
}

}  // namespace

ImportanceReport permutation_importance(const ForestModel& model, const EncodingSchema& schema,
                                        const DesignMatrix& X, const TargetVector& y, int repeats,
                                        std::uint64_t seed) {
  if (repeats < 1) throw ValidationError("repeats must be at least 1");
  model.check_schema(schema);
  if (X.cols() != schema.width() || X.rows() != y.size() || X.rows() == 0) {
    throw ShapeError("importance data does not match the model schema");
  }

  ImportanceReport report;
  report.repeats = repeats;
  report.baseline_mse = mse(model.predict_rows(X), y);

  // A column no tree splits on cannot change any prediction, so its
  // shuffled MSE equals the baseline exactly.
  std::vector<bool> used(static_cast<std::size_t>(X.cols()), false);
  for (const auto& tree : model.trees) tree.collect_split_columns(used);

  const auto n = X.rows();
  DesignMatrix shuffled = X;
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const auto& col = schema.columns()[static_cast<std::size_t>(j)];
    ColumnImportance ci;
    ci.column = j;
    ci.name = col.label ? col.component + "[" + *col.label + "]" : col.component;
    if (used[static_cast<std::size_t>(j)]) {
      Rng rng(mix_seed(seed, static_cast<std::uint64_t>(j)));
      std::vector<double> deltas;
      for (int r = 0; r < repeats; ++r) {
        for (Eigen::Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
        rng.shuffle(perm.begin(), perm.end());
        for (Eigen::Index i = 0; i < n; ++i) shuffled(i, j) = X(perm[static_cast<std::size_t>(i)], j);
        deltas.push_back(mse(model.predict_rows(shuffled), y) - report.baseline_mse);
      }
      shuffled.col(j) = X.col(j);
      double sum = 0.0;
      for (double d : deltas) sum += d;
      ci.raw_mean = sum / repeats;
      if (repeats > 1) {
        double ss = 0.0;
        for (double d : deltas) ss += (d - ci.raw_mean) * (d - ci.raw_mean);
        ci.std_dev = std::sqrt(ss / (repeats - 1));
      }
    }
    ci.importance = std::max(ci.raw_mean, 0.0);
    report.per_column.push_back(std::move(ci));
  }

  const auto& space = schema.space();
  for (std::size_t c = 0; c < space.size(); ++c) {
    const auto [first, count] = schema.span(c);
    double total = 0.0;
    for (Eigen::Index j = first; j < first + count; ++j) total += report.per_column[static_cast<std::size_t>(j)].importance;
    report.per_component.push_back({space[c].name, total});
  }
  auto ranked = report.per_component;
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.importance != b.importance) return a.importance > b.importance;
    return a.component < b.component;
  });
  for (const auto& r : ranked) report.ranking.push_back(r.component);
  return report;
}

std::vector<std::string> confirm_components(const ImportanceReport& report, int top_n,
                                            const std::set<std::string>& exclude,
                                            std::string* warning) {
  if (top_n < 1) throw ValidationError("top_n must be at least 1");
  std::vector<std::string> out;
  for (const auto& name : report.ranking) {
    if (static_cast<int>(out.size()) == top_n) break;
    if (!exclude.count(name)) out.push_back(name);
  }
  if (static_cast<int>(out.size()) < top_n && warning) {
    *warning = "requested " + std::to_string(top_n) + " components but only " +
               std::to_string(out.size()) + " are eligible";
  }
  return out;
}

nlohmann::json importance_to_json(const ImportanceReport& report) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : report.per_column) {
    cols.push_back({{"column", c.column},
                    {"name", c.name},
                    {"importance", c.importance},
                    {"raw_mean", c.raw_mean},
                    {"std", c.std_dev}});
  }
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : report.per_component) comps.push_back({{"component", c.component}, {"importance", c.importance}});
  return {{"baseline_mse", report.baseline_mse},
          {"repeats", report.repeats},
          {"ranking", report.ranking},
          {"per_component", comps},
          {"per_column", cols}};
}

std::string importance_chart_csv(const ImportanceReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "component,score\n";
  for (const auto& name : report.ranking) {
    const auto it = std::find_if(report.per_component.begin(), report.per_component.end(),
                                 [&](const auto& c) { return c.component == name; });
    out << name << ',' << it->importance << '\n';
  }
  return out.str();
}

}  // namespace dlrec
