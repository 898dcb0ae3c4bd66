#pragma once

// Reference implementations used only by tests. None of these call into the
// library's numerics.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// erf by its Maclaurin series for |x| < 3, continued fraction otherwise.
inline double erf_series(double x) {
  const double ax = std::fabs(x);
  if (ax < 3.0) {
    double term = ax;
    double sum = ax;
    for (int n = 1; n < 200; ++n) {
      term *= -ax * ax / n;
      const double add = term / (2 * n + 1);
      sum += add;
      if (std::fabs(add) < 1e-18 * std::fabs(sum)) break;
    }
    const double r = 2.0 / std::sqrt(kPi) * sum;
    return x < 0 ? -r : r;
  }
  // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + 1/2/(x + 1/(x + 3/2/(x + ...))))
  double f = 0.0;
  for (int n = 60; n >= 1; --n) f = (n / 2.0) / (ax + f);
  const double erfc = std::exp(-ax * ax) / std::sqrt(kPi) / (ax + f);
  return x < 0 ? -(1.0 - erfc) : 1.0 - erfc;
}

// Upper tail computed directly to keep relative accuracy for large z.
inline double upper_tail(double z) {
  if (z > 3.0) {
    double f = 0.0;
    const double x = z / std::sqrt(2.0);
    for (int n = 60; n >= 1; --n) f = (n / 2.0) / (x + f);
    return 0.5 * std::exp(-x * x) / std::sqrt(kPi) / (x + f);
  }
  return 1.0 - 0.5 * (1.0 + erf_series(z / std::sqrt(2.0)));
}

inline double Phi(double z) {
  if (z < -3.0) return upper_tail(-z);
  return 0.5 * (1.0 + erf_series(z / std::sqrt(2.0)));
}

inline double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }

// gammaEI as printed: alpha (sigma Z + (f_best - m) Phi(Z)) + beta (1 - Phi(Z)).
inline double gamma_ei(double m, double sigma, double f_best, double alpha, double beta) {
  const double z = (f_best - m) / sigma;
  return alpha * (sigma * z + (f_best - m) * Phi(z)) + beta * upper_tail(z);
}

inline double se_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                        const Eigen::VectorXd& ell, double s2) {
  double r2 = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double d = (a[i] - b[i]) / ell[i];
    r2 += d * d;
  }
  return s2 * std::exp(-0.5 * r2);
}

struct GpPrediction {
  double mean;
  double sigma;
};

// Posterior via an explicit dense inverse of K + noise I (constant mean ybar).
inline GpPrediction dense_gp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& ell, double s2, double noise,
                             const Eigen::VectorXd& q) {
  const auto n = X.rows();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      K(i, j) = se_kernel(X.row(i).transpose(), X.row(j).transpose(), ell, s2) + (i == j ? noise : 0.0);
  const Eigen::MatrixXd Kinv = K.fullPivLu().inverse();
  const double ybar = y.mean();
  Eigen::VectorXd ks(n);
  for (Eigen::Index i = 0; i < n; ++i) ks[i] = se_kernel(X.row(i).transpose(), q, ell, s2);
  const double mean = ybar + ks.dot(Kinv * (y.array() - ybar).matrix());
  const double var = s2 + noise - ks.dot(Kinv * ks);
  return {mean, std::sqrt(std::max(var, 0.0))};
}

struct TrainingFit {
  Eigen::VectorXd mean;   // posterior mean at each training row
  double min_eigenvalue;  // of the noise-free kernel matrix
};

// Posterior mean at the training rows in extended precision, plus the
// smallest kernel eigenvalue. Exact mean satisfies |m - y| <= noise |alpha|.
inline TrainingFit training_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                const Eigen::VectorXd& ell, double s2, double noise) {
  using LD = long double;
  using M = Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic>;
  using V = Eigen::Matrix<LD, Eigen::Dynamic, 1>;
  const auto n = X.rows();
  M K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      LD r2 = 0;
      for (Eigen::Index c = 0; c < X.cols(); ++c) {
        const LD d = (static_cast<LD>(X(i, c)) - X(j, c)) / ell[c];
        r2 += d * d;
      }
      K(i, j) = s2 * std::exp(-r2 / 2);
    }
  const LD ybar = y.cast<LD>().mean();
  const V yc = y.cast<LD>().array() - ybar;
  M Kn = K;
  Kn.diagonal().array() += noise;
  const V alpha = Kn.fullPivLu().solve(yc);
  const V mean = (K * alpha).array() + ybar;
  const double lmin = static_cast<double>(Eigen::SelfAdjointEigenSolver<M>(K).eigenvalues().minCoeff());
  return {mean.cast<double>(), lmin};
}

inline double branin(double x1, double x2) {
  const double b = 5.1 / (4.0 * kPi * kPi);
  const double c = 5.0 / kPi;
  const double t = 1.0 / (8.0 * kPi);
  const double u = x2 - b * x1 * x1 + c * x1 - 6.0;
  return u * u + 10.0 * (1.0 - t) * std::cos(x1) + 10.0;
}

// Minimum of Branin on a 1000 x 1000 grid over [-5, 10] x [0, 15].
inline double branin_grid_min() {
  double best = 1e300;
  for (int i = 0; i < 1000; ++i) {
    const double x1 = -5.0 + 15.0 * i / 999.0;
    for (int j = 0; j < 1000; ++j) best = std::min(best, branin(x1, 15.0 * j / 999.0));
  }
  return best;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace oracle
