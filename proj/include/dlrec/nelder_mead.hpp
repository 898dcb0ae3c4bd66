#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include <Eigen/Core>

namespace dlrec {

/// Box-constrained Nelder-Mead minimizer. Trial points are clamped into
/// [lower, upper]. Returns the best point; `best_value` receives f there.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nelder_mead(
    const std::function<Scalar(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>&)>& f,
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> start,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& lower,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& upper, int max_evals, Scalar* best_value = nullptr,
    Scalar initial_step = Scalar(0.5), Scalar tolerance = Scalar(1e-6)) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const auto n = start.size();
  const auto clamp = [&](Vec v) { return Vec(v.cwiseMax(lower).cwiseMin(upper)); };

  std::vector<Vec> simplex;
  std::vector<Scalar> values;
  int evals = 0;
  const auto eval = [&](const Vec& v) {
    ++evals;
    return f(v);
  };

  simplex.push_back(clamp(start));
  values.push_back(eval(simplex.back()));
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec v = simplex.front();
    const Scalar room_up = upper[i] - v[i];
    v[i] += room_up >= initial_step ? initial_step : -initial_step;
    simplex.push_back(clamp(v));
    values.push_back(eval(simplex.back()));
  }

  std::vector<std::size_t> order(simplex.size());
  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    const auto best = order.front(), worst = order.back(), second = order[order.size() - 2];
    if (std::abs(values[worst] - values[best]) <= tolerance * (std::abs(values[best]) + tolerance)) break;

    Vec centroid = Vec::Zero(n);
    for (std::size_t k = 0; k + 1 < order.size(); ++k) centroid += simplex[order[k]];
    centroid /= static_cast<Scalar>(n);

    const Vec reflected = clamp(centroid + (centroid - simplex[worst]));
    const Scalar fr = eval(reflected);
    if (fr < values[best]) {
      const Vec expanded = clamp(centroid + Scalar(2) * (centroid - simplex[worst]));
      const Scalar fe = eval(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const Vec contracted = clamp(centroid + Scalar(0.5) * (simplex[worst] - centroid));
    const Scalar fc = eval(contracted);
    if (fc < values[worst]) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (std::size_t k = 0; k < simplex.size(); ++k) {
      if (k == best) continue;
      simplex[k] = clamp(simplex[best] + Scalar(0.5) * (simplex[k] - simplex[best]));
      values[k] = eval(simplex[k]);
    }
  }
  const auto it = std::min_element(values.begin(), values.end());
  if (best_value) *best_value = *it;
  return simplex[static_cast<std::size_t>(it - values.begin())];
}

}  // namespace dlrec
