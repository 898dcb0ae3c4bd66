#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "dlrec/errors.hpp"
#include "dlrec/nelder_mead.hpp"
#include "dlrec/rng.hpp"

namespace dlrec {

enum class KernelType { SquaredExponential, Matern52 };

/// Stationary ARD covariance function.
template <class Scalar = double>
struct Kernel {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  KernelType type = KernelType::SquaredExponential;
  Vector length_scales;
  Scalar signal_variance = Scalar(1);

  static Kernel isotropic(KernelType type, Eigen::Index dim, Scalar length, Scalar variance) {
    return Kernel{type, Vector::Constant(dim, length), variance};
  }

  bool valid() const {
    return signal_variance > Scalar(0) && length_scales.size() > 0 &&
           (length_scales.array() > Scalar(0)).all();
  }

  template <class A, class B>
  Scalar operator()(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& xp) const {
    if (x.size() != length_scales.size() || xp.size() != length_scales.size()) {
      throw ShapeError("kernel input width mismatch");
    }
    const Scalar r2 = ((x.derived() - xp.derived()).array() / length_scales.array()).square().sum();
    return from_squared_distance(r2);
  }

  Scalar from_squared_distance(Scalar r2) const {
    switch (type) {
      case KernelType::SquaredExponential:
        return signal_variance * std::exp(Scalar(-0.5) * r2);
      case KernelType::Matern52: {
        const Scalar r = std::sqrt(r2);
        const Scalar s5r = std::sqrt(Scalar(5)) * r;
        return signal_variance * (Scalar(1) + s5r + Scalar(5) / Scalar(3) * r2) * std::exp(-s5r);
      }
    }
    return Scalar(0);
  }

  /// Cross-covariance between the rows of A and the rows of B.
  Matrix gram(const Matrix& A, const Matrix& B) const {
    Matrix K(A.rows(), B.rows());
    const Vector inv = length_scales.cwiseInverse();
    const Matrix As = A * inv.asDiagonal();
    const Matrix Bs = B * inv.asDiagonal();
    for (Eigen::Index j = 0; j < B.rows(); ++j)
      for (Eigen::Index i = 0; i < A.rows(); ++i)
        K(i, j) = from_squared_distance((As.row(i) - Bs.row(j)).squaredNorm());
    return K;
  }
};

template <class Scalar = double>
struct Posterior {
  Scalar mean;
  Scalar sigma;
};

inline constexpr double kSigmaFloor = 1e-12;

/// Gaussian-process regression with constant prior mean equal to the mean of
/// the (deduplicated) targets. The predictive variance includes the noise
/// term.
template <class Scalar = double>
class GpModel {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  GpModel() = default;

  /// Rows of X are observations. Duplicate rows are merged by averaging
  /// their targets and rows are put in lexicographic order, so the model is
  /// independent of observation order. The Cholesky factorization retries
  /// with diagonal jitter 1e-10 .. 1e-4 (relative to the signal variance)
  /// and throws ValidationError if all attempts fail.
  static GpModel fit(const Matrix& X, const Vector& y, const Kernel<Scalar>& kernel,
                     Scalar noise_variance) {
    if (X.rows() < 1) throw ValidationError("GP fit needs at least one observation");
    if (y.size() != X.rows()) throw ShapeError("GP targets do not match observations");
    if (X.cols() != kernel.length_scales.size()) throw ShapeError("GP kernel width mismatch");
    if (!kernel.valid() || !(noise_variance > Scalar(0))) {
      throw ValidationError("GP hyperparameters must be positive");
    }
    GpModel m;
    m.kernel_ = kernel;
    m.noise_ = noise_variance;
    dedup(X, y, m.X_, m.y_);
    m.y_mean_ = m.y_.mean();
    m.factorize();
    return m;
  }

  Posterior<Scalar> posterior(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != X_.cols()) throw ShapeError("GP query width mismatch");
    Vector k_star(X_.rows());
    for (Eigen::Index i = 0; i < X_.rows(); ++i) k_star[i] = kernel_(X_.row(i).transpose(), x);
    const Scalar mean = y_mean_ + k_star.dot(alpha_);
    const Vector v = chol_.matrixL().solve(k_star);
    const Scalar var = kernel_.signal_variance + noise_ - v.squaredNorm();
    const Scalar sigma = std::max(std::sqrt(std::max(var, Scalar(0))), Scalar(kSigmaFloor));
    return {mean, sigma};
  }

  /// log p(y | X, hyperparameters) of the centered targets.
  Scalar log_marginal_likelihood() const {
    const Vector c = y_.array() - y_mean_;
    const Scalar log_det = Scalar(2) * chol_.matrixLLT().diagonal().array().log().sum();
    return Scalar(-0.5) * c.dot(alpha_) - Scalar(0.5) * log_det -
           Scalar(0.5) * static_cast<Scalar>(y_.size()) * Scalar(1.8378770664093454835606594728112);  // ln(2 pi)
  }

  const Matrix& X() const { return X_; }
  const Vector& y() const { return y_; }
  Scalar prior_mean() const { return y_mean_; }
  const Kernel<Scalar>& kernel() const { return kernel_; }
  Scalar noise_variance() const { return noise_; }
  Scalar jitter() const { return jitter_; }
  /// Lower-triangular factor of K + (noise + jitter) I.
  Matrix chol() const { return chol_.matrixL(); }
  const Vector& weights() const { return alpha_; }

 private:
  static void dedup(const Matrix& X, const Vector& y, Matrix& Xo, Vector& yo) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(X.rows()));
    std::iota(order.begin(), order.end(), 0);
    const auto less = [&](Eigen::Index a, Eigen::Index b) {
      for (Eigen::Index j = 0; j < X.cols(); ++j)
        if (X(a, j) != X(b, j)) return X(a, j) < X(b, j);
      return false;
    };
    std::stable_sort(order.begin(), order.end(), less);
    std::vector<Eigen::Index> firsts;
    std::vector<Scalar> sums;
    std::vector<int> counts;
    for (auto r : order) {
      if (!firsts.empty() && !less(firsts.back(), r) && !less(r, firsts.back())) {
        sums.back() += y[r];
        ++counts.back();
      } else {
        firsts.push_back(r);
        sums.push_back(y[r]);
        counts.push_back(1);
      }
    }
    const auto n = static_cast<Eigen::Index>(firsts.size());
    Xo.resize(n, X.cols());
    yo.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      Xo.row(i) = X.row(firsts[k]);
      yo[i] = sums[k] / static_cast<Scalar>(counts[k]);
    }
  }

  void factorize() {
    Matrix K = kernel_.gram(X_, X_);
    K.diagonal().array() += noise_;
    jitter_ = Scalar(0);
    chol_.compute(K);
    Scalar eps = Scalar(1e-10);
    while (chol_.info() != Eigen::Success || !positive_diagonal()) {
      if (eps > Scalar(1e-4) * Scalar(1.0000001)) {
        throw ValidationError("GP covariance matrix is ill-conditioned even with maximal jitter");
      }
      jitter_ = eps * kernel_.signal_variance;
      Matrix Kj = K;
      Kj.diagonal().array() += jitter_;
      chol_.compute(Kj);
      eps *= Scalar(10);
    }
    alpha_ = chol_.solve(Vector(y_.array() - y_mean_));
  }

  bool positive_diagonal() const {
    return (chol_.matrixLLT().diagonal().array() > Scalar(0)).all();
  }

  Kernel<Scalar> kernel_;
  Scalar noise_ = Scalar(1e-6);
  Scalar jitter_ = Scalar(0);
  Matrix X_;
  Vector y_;
  Scalar y_mean_ = Scalar(0);
  Eigen::LLT<Matrix> chol_;
  Vector alpha_;
};

struct GpFitOptions {
  int restarts = 5;
  int max_evals = 200;
  /// Length-scale search box, in units of the input scale (inputs are
  /// expected on roughly unit ranges).
  double min_length = 1e-2;
  double max_length = 1e2;
  /// Signal-variance search box relative to the sample variance of y.
  double min_variance_ratio = 1e-2;
  double max_variance_ratio = 1e2;
};

/// Chooses length scales and signal variance by maximizing the log marginal
/// likelihood with multi-start Nelder-Mead in log space. The first start is
/// `initial` (clamped into the box); the remaining starts are drawn from `rng`.
template <class Scalar>
Kernel<Scalar> fit_kernel(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& X,
                          const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y, Kernel<Scalar> initial,
                          Scalar noise_variance, const GpFitOptions& options, Rng& rng) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const auto d = X.cols();
  Scalar var_y = y.size() > 1 ? (y.array() - y.mean()).square().sum() / static_cast<Scalar>(y.size() - 1)
                              : Scalar(1);
  if (!(var_y > Scalar(1e-12))) var_y = Scalar(1);

  Vector lower(d + 1), upper(d + 1);
  lower.head(d).setConstant(std::log(Scalar(options.min_length)));
  upper.head(d).setConstant(std::log(Scalar(options.max_length)));
  lower[d] = std::log(var_y * Scalar(options.min_variance_ratio));
  upper[d] = std::log(var_y * Scalar(options.max_variance_ratio));

  const auto unpack = [&](const Vector& theta) {
    Kernel<Scalar> k = initial;
    k.length_scales = theta.head(d).array().exp();
    k.signal_variance = std::exp(theta[d]);
    return k;
  };
  const std::function<Scalar(const Vector&)> objective = [&](const Vector& theta) {
    try {
      return -GpModel<Scalar>::fit(X, y, unpack(theta), noise_variance).log_marginal_likelihood();
    } catch (const ValidationError&) {
      return std::numeric_limits<Scalar>::max() / Scalar(4);
    }
  };

  Vector start(d + 1);
  if (initial.length_scales.size() == d && initial.valid()) {
    start.head(d) = initial.length_scales.array().log();
    start[d] = std::log(initial.signal_variance);
  } else {
    start.head(d).setZero();
    start[d] = std::log(var_y);
  }
  start = start.cwiseMax(lower).cwiseMin(upper);

  Vector best = start;
  Scalar best_value = std::numeric_limits<Scalar>::infinity();
  for (int r = 0; r < std::max(options.restarts, 1); ++r) {
    if (r > 0) {
      for (Eigen::Index i = 0; i < d + 1; ++i)
        start[i] = lower[i] + static_cast<Scalar>(rng.uniform()) * (upper[i] - lower[i]);
    }
    Scalar value;
    const Vector theta = nelder_mead<Scalar>(objective, start, lower, upper, options.max_evals, &value);
    if (value < best_value) {
      best_value = value;
      best = theta;
    }
  }
  return unpack(best);
}

}  // namespace dlrec
