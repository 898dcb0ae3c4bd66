#pragma once

#include <algorithm>
#include <cmath>

namespace dlrec {

template <class Scalar = double>
Scalar normal_pdf(Scalar z) {
  return Scalar(0.39894228040143267793994605993438) * std::exp(Scalar(-0.5) * z * z);
}

template <class Scalar = double>
Scalar normal_cdf(Scalar z) {
  return Scalar(0.5) * std::erfc(-z * Scalar(0.70710678118654752440084436210485));
}

/// Random-exploration probability clamp(1 - k P, 0, 1). After a random step
/// the caller increments k; after a model-guided step it resets k to 1.
template <class Scalar = double>
Scalar omega_update(int k, Scalar p) {
  return std::clamp(Scalar(1) - static_cast<Scalar>(k) * p, Scalar(0), Scalar(1));
}

/// gammaEI with Z = (f_best - m) / sigma:
///   alpha (sigma Z + (f_best - m) Phi(Z)) + beta (1 - Phi(Z)).
/// With `pdf_variant` the first term uses sigma phi(Z) in place of sigma Z.
template <class Scalar = double>
Scalar gamma_ei(Scalar m, Scalar sigma, Scalar f_best, Scalar alpha, Scalar beta,
                bool pdf_variant = false) {
  const Scalar diff = f_best - m;
  const Scalar z = diff / sigma;
  const Scalar cdf = normal_cdf(z);
  const Scalar tail = Scalar(0.5) * std::erfc(z * Scalar(0.70710678118654752440084436210485));  // 1 - Phi(Z)
  const Scalar spread = pdf_variant ? sigma * normal_pdf(z) : sigma * z;
  return alpha * (spread + diff * cdf) + beta * tail;
}

// Baselines, maximization convention: z = (m - f_best) / sigma.

template <class Scalar = double>
Scalar expected_improvement(Scalar m, Scalar sigma, Scalar f_best) {
  if (!(sigma > Scalar(0))) return std::max(m - f_best, Scalar(0));
  const Scalar z = (m - f_best) / sigma;
  return (m - f_best) * normal_cdf(z) + sigma * normal_pdf(z);
}

template <class Scalar = double>
Scalar probability_of_improvement(Scalar m, Scalar sigma, Scalar f_best) {
  if (!(sigma > Scalar(0))) return m > f_best ? Scalar(1) : Scalar(0);
  return normal_cdf((m - f_best) / sigma);
}

template <class Scalar = double>
Scalar upper_confidence_bound(Scalar m, Scalar sigma, Scalar kappa) {
  return m + kappa * sigma;
}

enum class AcquisitionMode { GammaEI, EI, PI, UCB };

template <class Scalar = double>
Scalar baseline_acquisition(AcquisitionMode mode, Scalar m, Scalar sigma, Scalar f_best,
                            Scalar kappa) {
  switch (mode) {
    case AcquisitionMode::EI:
      return expected_improvement(m, sigma, f_best);
    case AcquisitionMode::PI:
      return probability_of_improvement(m, sigma, f_best);
    case AcquisitionMode::UCB:
      return upper_confidence_bound(m, sigma, kappa);
    case AcquisitionMode::GammaEI:
      break;
  }
  return Scalar(0);
}

}  // namespace dlrec
