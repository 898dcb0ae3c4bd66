#include "dlrec/benchmark.hpp"

#include <algorithm>
#include <cmath>

#include "dlrec/errors.hpp"

namespace dlrec {

namespace {

constexpr double kPi = 3.14159265358979323846;

ComponentSpec box(const std::string& name, double lo, double hi) {
  ComponentSpec c;
  c.name = name;
  c.dimension = Dimension::TrainingOptimization;
  c.kind = ComponentKind::ContinuousRange;
  c.lo = lo;
  c.hi = hi;
  return c;
}

}  // namespace

double branin(double x1, double x2) {
  const double b = 5.1 / (4.0 * kPi * kPi);
  const double c = 5.0 / kPi;
  const double t = 1.0 / (8.0 * kPi);
  const double u = x2 - b * x1 * x1 + c * x1 - 6.0;
  return u * u + 10.0 * (1.0 - t) * std::cos(x1) + 10.0;
}

double rastrigin(const Eigen::Ref<const Eigen::VectorXd>& x) {
  double s = 10.0 * static_cast<double>(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) s += x[i] * x[i] - 10.0 * std::cos(2.0 * kPi * x[i]);
  return s;
}

BenchmarkFunction make_benchmark(const std::string& name) {
  BenchmarkFunction fn;
  fn.name = name;
  if (name == "sphere") {
    fn.space = SearchSpace({box("x0", 0.0, 1.0)});
    fn.evaluate = [](const auto& x) { return -(x[0] - 0.3) * (x[0] - 0.3); };
    fn.optimum = 0.0;
  } else if (name == "branin") {
    fn.space = SearchSpace({box("x1", -5.0, 10.0), box("x2", 0.0, 15.0)});
    fn.evaluate = [](const auto& x) { return -branin(x[0], x[1]); };
    fn.optimum = -0.39788735772973816;
  } else if (name == "rastrigin") {
    fn.space = SearchSpace({box("x0", -5.12, 5.12), box("x1", -5.12, 5.12)});
    fn.evaluate = [](const auto& x) { return -rastrigin(x); };
    fn.optimum = 0.0;
  } else {
    throw ValidationError("unknown benchmark function '" + name + "'");
  }
  return fn;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw ValidationError("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

BenchmarkSummary run_benchmark(const BenchmarkFunction& fn, const std::vector<BenchmarkVariant>& variants,
                               int repeats, int n_init, int t, std::uint64_t seed,
                               const OptimizerOptions& options) {
  if (repeats < 1) throw ValidationError("repeats must be at least 1");
  const EncodingSchema schema(fn.space);
  const Objective objective = [&](const FeatureVector& x) { return fn.evaluate(x); };

  BenchmarkSummary summary;
  summary.function = fn.name;
  summary.n_init = n_init;
  summary.t = t;
  for (const auto& variant : variants) {
    VariantSummary vs;
    vs.label = variant.label;
    std::vector<double> gaps;
    for (int r = 0; r < repeats; ++r) {
      BenchmarkRun run;
      run.seed = seed + static_cast<std::uint64_t>(r);
      auto result = optimize(objective, schema, variant.params, n_init, t, run.seed, options);
      for (const auto& h : result.history) run.best_so_far.push_back(h.f_best);
      run.final_gap = fn.optimum - result.best_y;
      run.history = std::move(result.history);
      gaps.push_back(run.final_gap);
      vs.runs.push_back(std::move(run));
    }
    vs.median_gap = quantile(gaps, 0.5);
    vs.q1_gap = quantile(gaps, 0.25);
    vs.q3_gap = quantile(gaps, 0.75);
    summary.variants.push_back(std::move(vs));
  }
  return summary;
}

nlohmann::json benchmark_to_json(const BenchmarkSummary& summary, bool with_curves) {
  nlohmann::json variants = nlohmann::json::array();
  for (const auto& v : summary.variants) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : v.runs) {
      nlohmann::json jr = {{"seed", r.seed}, {"final_gap", r.final_gap}};
      if (with_curves) jr["best_so_far"] = r.best_so_far;
      int random_steps = 0;
      for (const auto& h : r.history)
        if (!h.initial && h.was_random) ++random_steps;
      jr["random_search_steps"] = random_steps;
      runs.push_back(std::move(jr));
    }
    variants.push_back({{"label", v.label},
                        {"median_gap", v.median_gap},
                        {"q1_gap", v.q1_gap},
                        {"q3_gap", v.q3_gap},
                        {"runs", runs}});
  }
  return {{"function", summary.function},
          {"n_init", summary.n_init},
          {"t", summary.t},
          {"variants", variants}};
}

}  // namespace dlrec
