#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dlrec/encoding.hpp"
#include "dlrec/forest.hpp"

namespace dlrec {

struct ColumnImportance {
  Eigen::Index column = 0;
  std::string name;  // "component" or "component[label]"
  double raw_mean = 0.0;  // mean MSE increase, may be negative
  double importance = 0.0;  // raw_mean clipped at 0
  double std_dev = 0.0;  // sample standard deviation over repeats
};

struct ComponentImportance {
  std::string component;
  double importance = 0.0;  // sum of member-column importances
};

struct ImportanceReport {
  std::vector<ColumnImportance> per_column;        // schema column order
  std::vector<ComponentImportance> per_component;  // space order
  std::vector<std::string> ranking;  // descending importance, ties alphabetical
  double baseline_mse = 0.0;
  int repeats = 0;
};

/// Breiman-style permutation importance: for each column, the mean over
/// `repeats` seeded shuffles of MSE(shuffled) - MSE(baseline).
ImportanceReport permutation_importance(const ForestModel& model, const EncodingSchema& schema,
                                        const DesignMatrix& X, const TargetVector& y, int repeats,
                                        std::uint64_t seed);

/// First `top_n` names of the ranking, skipping `exclude`. When fewer names
/// are available the list is truncated and `warning` (if given) is set.
std::vector<std::string> confirm_components(const ImportanceReport& report, int top_n = 5,
                                            const std::set<std::string>& exclude = {},
                                            std::string* warning = nullptr);

nlohmann::json importance_to_json(const ImportanceReport& report);
/// "component,score" rows in ranking order.
std::string importance_chart_csv(const ImportanceReport& report);

}  // namespace dlrec
