#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dlrec/encoding.hpp"
#include "dlrec/optimizer.hpp"

namespace dlrec {

/// A synthetic maximization problem over a continuous box.
struct BenchmarkFunction {
  std::string name;
  SearchSpace space;
  /// Takes the encoded point (raw coordinates, since all ranges are linear).
  std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)> evaluate;
  double optimum = 0.0;  // maximum value
};

/// "sphere": -(x - 0.3)^2 on [0, 1].
/// "branin": negated Branin on [-5, 10] x [0, 15].
/// "rastrigin": negated 2-D Rastrigin on [-5.12, 5.12]^2.
BenchmarkFunction make_benchmark(const std::string& name);

double branin(double x1, double x2);
double rastrigin(const Eigen::Ref<const Eigen::VectorXd>& x);

/// Labelled optimizer configuration compared within one benchmark.
struct BenchmarkVariant {
  std::string label;
  AcquisitionParams params;
};

struct BenchmarkRun {
  std::uint64_t seed = 0;
  std::vector<double> best_so_far;  // one entry per evaluation
  double final_gap = 0.0;
  std::vector<HistoryEntry> history;
};

struct VariantSummary {
  std::string label;
  std::vector<BenchmarkRun> runs;
  double median_gap = 0.0;
  double q1_gap = 0.0;
  double q3_gap = 0.0;
};

struct BenchmarkSummary {
  std::string function;
  int n_init = 0;
  int t = 0;
  std::vector<VariantSummary> variants;
};

/// Linear-interpolated quantile of unsorted data, q in [0, 1].
double quantile(std::vector<double> v, double q);

/// Runs every variant `repeats` times with seeds seed, seed+1, ...; run r of
/// every variant uses the same seed, hence the same initial design.
BenchmarkSummary run_benchmark(const BenchmarkFunction& fn, const std::vector<BenchmarkVariant>& variants,
                               int repeats, int n_init, int t, std::uint64_t seed,
                               const OptimizerOptions& options = {});

/// Summary document; curves included when `with_curves`.
nlohmann::json benchmark_to_json(const BenchmarkSummary& summary, bool with_curves = true);

}  // namespace dlrec
