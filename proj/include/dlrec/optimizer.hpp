#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlrec/acquisition.hpp"
#include "dlrec/encoding.hpp"
#include "dlrec/gp.hpp"
#include "dlrec/rng.hpp"

namespace dlrec {

/// How the random-exploration probability is produced for each step.
enum class OmegaPolicy {
  Schedule,      // clamp(1 - k P, 0, 1)
  AlwaysRandom,  // forced to 1: pure random search
  Disabled,      // forced to 0: every step is model guided
};

std::string to_string(AcquisitionMode mode);
AcquisitionMode parse_acquisition_mode(const std::string& s);

struct AcquisitionParams {
  double alpha = 1.0;
  double beta = 1.0;
  double p = 0.1;
  AcquisitionMode mode = AcquisitionMode::GammaEI;
  double ucb_kappa = 2.0;
  /// Use sigma * phi(Z) instead of sigma * Z in the first gammaEI term.
  bool gamma_ei_pdf_variant = false;
  OmegaPolicy omega_policy = OmegaPolicy::Schedule;

  /// Throws ValidationError on out-of-range values.
  void validate() const;
};

/// Acquisition score of a posterior (larger is better) for a maximized
/// objective. gammaEI is evaluated on the negated problem, where its
/// (f_best - f) improvement integrand measures gain over the incumbent.
double acquisition_value(const AcquisitionParams& params, const Posterior<double>& post,
                         double f_best);

/// Index of the largest acquisition value; ties keep the earliest candidate.
std::size_t argmax_acquisition(const AcquisitionParams& params,
                               const std::vector<Posterior<double>>& posteriors, double f_best);

struct OptimizerOptions {
  int candidate_budget = 2048;
  int incumbents = 5;
  int perturbations = 10;
  /// Standard deviation of incumbent perturbations in unit-cube coordinates.
  double perturbation_scale = 0.1;
  KernelType kernel = KernelType::SquaredExponential;
  double noise_variance = 1e-6;
  GpFitOptions gp_fit;
  /// Every this many steps the kernel is refitted with all restarts; in
  /// between, a single warm-started local search is used.
  int full_refit_every = 10;
};

struct Observation {
  FeatureVector x;
  double y = 0.0;
};

struct OptimizerState {
  std::vector<Observation> observed;
  double f_best = -std::numeric_limits<double>::infinity();
  int k = 1;
  double omega = 1.0;
  int iteration = 0;
  Rng rng{0};
  Kernel<double> kernel;
  GpModel<double> gp;
  bool gp_ready = false;

  void add(FeatureVector x, double y);
  /// Refits kernel hyperparameters and the GP on unit-cube inputs.
  void refit(const EncodingSchema& schema, const OptimizerOptions& options, bool full);
  /// Recomputes omega from k and the policy.
  void update_omega(const AcquisitionParams& params);
};

struct Proposal {
  FeatureVector x;
  bool was_random = false;
  double omega = 0.0;
  double xi = 0.0;
};

/// Uniform random configurations plus Gaussian perturbations of the best
/// incumbents, all snapped onto valid configurations.
std::vector<FeatureVector> generate_candidates(const OptimizerState& state,
                                               const EncodingSchema& schema,
                                               const OptimizerOptions& options, Rng& rng);

/// Draws xi; xi <= omega yields a uniform random sample, otherwise the
/// acquisition argmax over generated candidates.
Proposal propose_next(OptimizerState& state, const EncodingSchema& schema,
                      const AcquisitionParams& params, const OptimizerOptions& options);

using Objective = std::function<double(const FeatureVector&)>;

struct HistoryEntry {
  int iteration = 0;  // 0-based over all evaluations
  bool initial = false;
  FeatureVector x;
  Configuration config;
  double y = 0.0;
  bool was_random = false;
  double omega = 1.0;  // omega used for the step's draw (1 for initial samples)
  int k = 1;           // counter value that produced omega
  double f_best = 0.0;  // after this evaluation
};

struct OptimizationResult {
  Configuration best_config;
  FeatureVector best_x;
  double best_y = 0.0;
  std::vector<HistoryEntry> history;
};

/// Raised when the objective throws; carries the history collected so far.
class OptimizationAborted : public std::runtime_error {
 public:
  OptimizationAborted(const std::string& what, std::vector<HistoryEntry> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<HistoryEntry>& history() const { return history_; }

 private:
  std::vector<HistoryEntry> history_;
};

/// Evaluates n_init uniform samples, then runs t propose/evaluate/refit
/// steps, updating k and omega after each. Maximizes the objective.
OptimizationResult optimize(const Objective& objective, const EncodingSchema& schema,
                            const AcquisitionParams& params, int n_init, int t,
                            std::uint64_t seed, const OptimizerOptions& options = {});

/// One JSON object per line.
void write_history(std::ostream& out, const std::vector<HistoryEntry>& history);
void write_history(const std::string& path, const std::vector<HistoryEntry>& history);

}  // namespace dlrec
