#include "dlrec/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "dlrec/errors.hpp"

namespace dlrec {

namespace {

// Stream identifiers for child generators.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kLoopStream = 2;
constexpr std::uint64_t kKernelStream = 3;

Eigen::MatrixXd unit_design(const std::vector<Observation>& observed, const EncodingSchema& schema) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(observed.size()), schema.width());
  for (std::size_t i = 0; i < observed.size(); ++i)
    X.row(static_cast<Eigen::Index>(i)) = to_unit(schema, observed[i].x).transpose();
  return X;
}

}  // namespace

std::string to_string(AcquisitionMode mode) {
  switch (mode) {
    case AcquisitionMode::GammaEI:
      return "gammaei";
    case AcquisitionMode::EI:
      return "ei";
    case AcquisitionMode::PI:
      return "pi";
    case AcquisitionMode::UCB:
      return "ucb";
  }
  return "?";
}

AcquisitionMode parse_acquisition_mode(const std::string& s) {
  for (auto m : {AcquisitionMode::GammaEI, AcquisitionMode::EI, AcquisitionMode::PI, AcquisitionMode::UCB})
    if (to_string(m) == s) return m;
  throw ValidationError("unknown acquisition mode '" + s + "'");
}

void AcquisitionParams::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ValidationError("alpha and beta must be non-negative");
  if (mode == AcquisitionMode::GammaEI && !(alpha + beta > 0.0)) {
    throw ValidationError("gammaEI needs alpha + beta > 0");
  }
  if (!(p > 0.0 && p <= 1.0)) throw ValidationError("P must lie in (0, 1]");
  if (!(ucb_kappa > 0.0)) throw ValidationError("ucb_kappa must be positive");
}

double acquisition_value(const AcquisitionParams& params, const Posterior<double>& post,
                         double f_best) {
  if (params.mode == AcquisitionMode::GammaEI) {
    return gamma_ei(-post.mean, post.sigma, -f_best, params.alpha, params.beta,
                    params.gamma_ei_pdf_variant);
  }
  return baseline_acquisition(params.mode, post.mean, post.sigma, f_best, params.ucb_kappa);
}

std::size_t argmax_acquisition(const AcquisitionParams& params,
                               const std::vector<Posterior<double>>& posteriors, double f_best) {
  if (posteriors.empty()) throw ValidationError("no candidates to score");
  std::size_t best = 0;
  double best_value = acquisition_value(params, posteriors[0], f_best);
  for (std::size_t i = 1; i < posteriors.size(); ++i) {
    const double v = acquisition_value(params, posteriors[i], f_best);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  return best;
}

void OptimizerState::add(FeatureVector x, double y) {
  observed.push_back({std::move(x), y});
  f_best = std::max(f_best, y);
}

void OptimizerState::refit(const EncodingSchema& schema, const OptimizerOptions& options, bool full) {
  const Eigen::MatrixXd X = unit_design(observed, schema);
  Eigen::VectorXd y(X.rows());
  for (std::size_t i = 0; i < observed.size(); ++i) y[static_cast<Eigen::Index>(i)] = observed[i].y;

  if (kernel.length_scales.size() != schema.width()) {
    kernel = Kernel<double>::isotropic(options.kernel, schema.width(), 0.5, 1.0);
    full = true;
  }
  GpFitOptions fit = options.gp_fit;
  if (!full) {
    fit.restarts = 1;
    fit.max_evals = std::max(20, options.gp_fit.max_evals / 4);
  }
  Rng kernel_rng(mix_seed(rng.next_u64(), kKernelStream));
  kernel = fit_kernel<double>(X, y, kernel, options.noise_variance, fit, kernel_rng);
  gp = GpModel<double>::fit(X, y, kernel, options.noise_variance);
  gp_ready = true;
}

void OptimizerState::update_omega(const AcquisitionParams& params) {
  switch (params.omega_policy) {
    case OmegaPolicy::Schedule:
      omega = omega_update(k, params.p);
      break;
    case OmegaPolicy::AlwaysRandom:
      omega = 1.0;
      break;
    case OmegaPolicy::Disabled:
      omega = 0.0;
      break;
  }
}

std::vector<FeatureVector> generate_candidates(const OptimizerState& state,
                                               const EncodingSchema& schema,
                                               const OptimizerOptions& options, Rng& rng) {
  std::vector<FeatureVector> out;
  out.reserve(static_cast<std::size_t>(std::max(options.candidate_budget, 0) +
                                       options.incumbents * options.perturbations));
  for (int i = 0; i < options.candidate_budget; ++i)
    out.push_back(encode(schema, sample_uniform(schema.space(), rng)));

  std::vector<std::size_t> order(state.observed.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return state.observed[a].y > state.observed[b].y;
  });
  const auto n_inc = std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(options.incumbents, 0)));
  for (std::size_t r = 0; r < n_inc; ++r) {
    const Eigen::VectorXd base = to_unit(schema, state.observed[order[r]].x);
    for (int p = 0; p < options.perturbations; ++p) {
      Eigen::VectorXd u = base;
      for (Eigen::Index j = 0; j < u.size(); ++j)
        u[j] = std::clamp(u[j] + options.perturbation_scale * rng.normal(), 0.0, 1.0);
      out.push_back(encode(schema, decode(schema, from_unit(schema, u))));
    }
  }
  return out;
}

Proposal propose_next(OptimizerState& state, const EncodingSchema& schema,
                      const AcquisitionParams& params, const OptimizerOptions& options) {
  state.update_omega(params);
  Proposal proposal;
  proposal.omega = state.omega;
  proposal.xi = state.rng.uniform();
  if (proposal.xi <= state.omega) {
    proposal.was_random = true;
    proposal.x = encode(schema, sample_uniform(schema.space(), state.rng));
    return proposal;
  }
  if (!state.gp_ready) throw ValidationError("surrogate must be fitted before a guided proposal");
  const auto candidates = generate_candidates(state, schema, options, state.rng);
  std::vector<Posterior<double>> posts;
  posts.reserve(candidates.size());
  for (const auto& c : candidates) posts.push_back(state.gp.posterior(to_unit(schema, c)));
  proposal.x = candidates[argmax_acquisition(params, posts, state.f_best)];
  return proposal;
}

OptimizationResult optimize(const Objective& objective, const EncodingSchema& schema,
                            const AcquisitionParams& params, int n_init, int t,
                            std::uint64_t seed, const OptimizerOptions& options) {
  params.validate();
  if (n_init < 1) throw ValidationError("n_init must be at least 1");
  if (t < 0) throw ValidationError("iteration budget must be non-negative");

  OptimizationResult result;
  auto& history = result.history;
  OptimizerState state;
  state.rng = Rng(mix_seed(seed, kLoopStream));

  const auto evaluate = [&](const FeatureVector& x) {
    try {
      return objective(x);
    } catch (const std::exception& e) {
      throw OptimizationAborted(std::string("objective evaluation failed: ") + e.what(), history);
    }
  };
  const auto record = [&](const FeatureVector& x, double y, bool initial, bool was_random,
                          double omega, int k) {
    HistoryEntry h;
    h.iteration = static_cast<int>(history.size());
    h.initial = initial;
    h.x = x;
    h.config = decode(schema, x);
    h.y = y;
    h.was_random = was_random;
    h.omega = omega;
    h.k = k;
    h.f_best = state.f_best;
    history.push_back(std::move(h));
  };

  // The initial design depends only on the seed, so runs that differ only in
  // acquisition settings share it.
  Rng init_rng(mix_seed(seed, kInitStream));
  for (int i = 0; i < n_init; ++i) {
    FeatureVector x = encode(schema, sample_uniform(schema.space(), init_rng));
    const double y = evaluate(x);
    state.add(x, y);
    record(x, y, true, true, 1.0, 1);
  }
  const bool needs_model = params.omega_policy != OmegaPolicy::AlwaysRandom;
  if (needs_model && t > 0) state.refit(schema, options, true);

  for (int i = 0; i < t; ++i) {
    state.iteration = i;
    const int k_used = state.k;
    const Proposal p = propose_next(state, schema, params, options);
    const double y = evaluate(p.x);
    state.add(p.x, y);
    record(p.x, y, false, p.was_random, p.omega, k_used);
    state.k = p.was_random ? state.k + 1 : 1;
    if (needs_model && i + 1 < t) {
      const bool full = options.full_refit_every > 0 && (i + 1) % options.full_refit_every == 0;
      state.refit(schema, options, full);
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < history.size(); ++i)
    if (history[i].y > history[best].y) best = i;
  result.best_x = history[best].x;
  result.best_config = history[best].config;
  result.best_y = history[best].y;
  return result;
}

void write_history(std::ostream& out, const std::vector<HistoryEntry>& history) {
  for (const auto& h : history) {
    nlohmann::json j;
    j["iteration"] = h.iteration;
    j["phase"] = h.initial ? "init" : "search";
    j["x"] = std::vector<double>(h.x.data(), h.x.data() + h.x.size());
    j["config"] = config_to_json(h.config);
    j["y"] = h.y;
    j["was_random"] = h.was_random;
    j["omega"] = h.omega;
    j["k"] = h.k;
    j["f_best"] = h.f_best;
    out << j.dump() << '\n';
  }
}

void write_history(const std::string& path, const std::vector<HistoryEntry>& history) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write history '" + path + "'");
  write_history(out, history);
  if (!out) throw IoError("failed writing history '" + path + "'");
}

}  // namespace dlrec
