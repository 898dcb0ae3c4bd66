#include "dlrec/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "dlrec/errors.hpp"
#include "dlrec/rng.hpp"

namespace dlrec {

namespace {

constexpr std::uint64_t kTrainStream = 11;
constexpr std::uint64_t kImportanceStream = 12;
constexpr std::uint64_t kSearchStream = 13;

}  // namespace

TrainedSurrogate train_surrogate(const DesignMatrix& X, const TargetVector& y, std::uint64_t seed,
                                 const TrainOptions& options) {
  GridSearchOptions gs;
  gs.folds = std::min<int>(options.folds, static_cast<int>(X.rows()));
  gs.estimators = options.estimators;
  gs.depths = options.depths;
  gs.base.threads = options.threads;
  TrainedSurrogate out;
  out.tuning = grid_search(X, y, gs, seed);
  ForestParams p = gs.base;
  p.n_estimators = out.tuning.best_n_estimators;
  p.max_depth = out.tuning.best_max_depth;
  out.forest = fit_forest(X, y, p, seed);
  return out;
}

RecommendationReport recommend(const RecommendOptions& options) {
  options.params.validate();
  RecommendationReport report;
  report.seed = options.seed;
  report.mode = options.mode;
  report.params = options.params;
  report.budget = options.budget;
  report.n_init = options.n_init;

  const SearchSpace space = options.space_path ? load_space(*options.space_path) : default_space();
  const auto ds = load_csv(options.dataset_path, space);
  if (ds.records.empty()) throw ValidationError("dataset '" + options.dataset_path + "' has no records");
  if (ds.records.size() < 2) throw ValidationError("dataset needs at least two records for cross-validation");

  const EncodingSchema schema(space);
  const auto [X, y] = to_matrix(ds, schema);
  auto surrogate = train_surrogate(X, y, mix_seed(options.seed, kTrainStream), options.train);
  surrogate.forest.schema_fingerprint = schema.fingerprint();
  report.surrogate_cv_mse = surrogate.tuning.best_cv_mse;
  report.surrogate_n_estimators = surrogate.tuning.best_n_estimators;
  report.surrogate_max_depth = surrogate.tuning.best_max_depth;

  report.importance = permutation_importance(surrogate.forest, schema, X, y, options.importance_repeats,
                                             mix_seed(options.seed, kImportanceStream));

  std::set<std::string> free;
  if (options.mode == ConfirmationMode::Auto) {
    std::set<std::string> exclude;
    for (const auto& spec : space.components())
      if (!spec.searchable || options.fixed.count(spec.name)) exclude.insert(spec.name);
    std::string warning;
    const auto confirmed = confirm_components(report.importance, options.top_n, exclude, &warning);
    if (!warning.empty()) report.warnings.push_back(warning);
    free.insert(confirmed.begin(), confirmed.end());
  } else {
    if (options.manual_components.empty()) throw ValidationError("manual mode needs at least one component");
    for (const auto& name : options.manual_components) {
      if (!space.find(name)) throw ValidationError("manual component '" + name + "' is not in the space");
      free.insert(name);
    }
  }
  if (free.empty()) throw ValidationError("no components left to search");

  // Constants for everything not searched: user values, else dataset modes.
  Configuration fixed;
  const auto modes = dataset_modes(ds);
  for (const auto& spec : space.components()) {
    if (free.count(spec.name)) continue;
    const auto user = options.fixed.find(spec.name);
    fixed.emplace(spec.name, user != options.fixed.end() ? user->second : modes.at(spec.name));
  }
  for (const auto& [name, value] : options.fixed) {
    if (free.count(name)) {
      throw ValidationError("component '" + name + "' is both fixed and selected for search");
    }
    if (!space.find(name)) throw ValidationError("fixed component '" + name + "' is not in the space");
  }
  const auto restricted = restrict_space(space, free, fixed);
  for (const auto& spec : restricted.free.components()) report.searched_components.push_back(spec.name);

  const EncodingSchema free_schema(restricted.free);
  const auto& forest = surrogate.forest;
  const Objective objective = [&](const FeatureVector& x) {
    return forest.predict(encode(schema, restricted.complete(decode(free_schema, x))));
  };
  if (options.budget == 0) report.warnings.push_back("budget is 0; returning the best initial sample");
  auto result = optimize(objective, free_schema, options.params, options.n_init, options.budget,
                         mix_seed(options.seed, kSearchStream), options.optimizer);

  report.recommended = restricted.complete(result.best_config);
  const auto check = validate(space, report.recommended);
  if (!check) throw ValidationError("internal error: recommended configuration does not validate");
  report.predicted_top1 = forest.predict(encode(schema, report.recommended));
  if (options.history_path) {
    write_history(*options.history_path, result.history);
    report.optimizer_history_path = options.history_path;
  }
  report.history = std::move(result.history);
  report.surrogate = std::move(surrogate.forest);
  return report;
}

nlohmann::json report_to_json(const RecommendationReport& r) {
  nlohmann::json importance = {
      {"ranking", r.importance.ranking},
      {"baseline_mse", r.importance.baseline_mse},
      {"repeats", r.importance.repeats},
  };
  nlohmann::json per_component = nlohmann::json::object();
  for (const auto& c : r.importance.per_component) per_component[c.component] = c.importance;
  importance["per_component"] = per_component;

  return {
      {"format", "dlrec-report"},
      {"version", 1},
      {"recommended", config_to_json(r.recommended)},
      {"predicted_top1", r.predicted_top1},
      {"searched_components", r.searched_components},
      {"importance", importance},
      {"optimizer_history_path", r.optimizer_history_path ? nlohmann::json(*r.optimizer_history_path) : nlohmann::json()},
      {"surrogate",
       {{"cv_mse", r.surrogate_cv_mse},
        {"n_estimators", r.surrogate_n_estimators},
        {"max_depth", r.surrogate_max_depth}}},
      {"parameters",
       {{"seed", r.seed},
        {"mode", r.mode == ConfirmationMode::Auto ? "auto" : "manual"},
        {"acquisition", to_string(r.params.mode)},
        {"alpha", r.params.alpha},
        {"beta", r.params.beta},
        {"p", r.params.p},
        {"ucb_kappa", r.params.ucb_kappa},
        {"gamma_ei_pdf_variant", r.params.gamma_ei_pdf_variant},
        {"omega", r.params.omega_policy == OmegaPolicy::Schedule
                      ? "schedule"
                      : (r.params.omega_policy == OmegaPolicy::Disabled ? "disabled" : "always-random")},
        {"budget", r.budget},
        {"n_init", r.n_init}}},
      {"warnings", r.warnings},
  };
}

double predict_config(const std::string& model_path, const std::string& config_path) {
  SearchSpace space;
  const auto model = load_forest(model_path, &space);
  const EncodingSchema schema(space);
  model.check_schema(schema);
  const auto config = load_config(space, config_path);
  const auto check = validate(space, config);
  if (!check) {
    std::string msg = "configuration does not validate:";
    for (const auto& v : check.violations) msg += " [" + v.component + ": " + v.message + "]";
    throw ValidationError(msg);
  }
  return model.predict(encode(schema, config));
}

TabularDataset make_synthetic_dataset(int rows, std::uint64_t seed) {
  const auto& space = default_space();
  TabularDataset ds{space, {}};
  Rng rng(seed);
  const std::set<std::string> drivers = {"epochs", "batch_size", "learning_rate", "data_augmentation",
                                         "size_of_parameter"};
  const std::set<std::string> helpful_aug = {"mixup", "cutmix", "randaugment", "random resized crop",
                                             "random erasing"};
  for (int i = 0; i < rows; ++i) {
    ModelRecord rec;
    rec.values = sample_uniform(space, rng);
    const double epochs = static_cast<double>(std::get<std::int64_t>(rec.values.at("epochs")));
    const double batch = static_cast<double>(std::get<std::int64_t>(rec.values.at("batch_size")));
    const double lr = std::get<double>(rec.values.at("learning_rate"));
    const double params_m = std::get<double>(rec.values.at("size_of_parameter"));
    int good_aug = 0;
    for (const auto& l : std::get<CategorySet>(rec.values.at("data_augmentation")).labels)
      good_aug += helpful_aug.count(l) ? 1 : 0;

    const double e = std::log(epochs / 20.0) / std::log(5000.0 / 20.0);  // 0..1
    const double b = std::log2(batch / 256.0);
    const double l = std::log10(lr) + 1.5;
    const double p = std::log10(params_m / 0.18) / std::log10(632.0 / 0.18);
    double acc = 55.0 + 22.0 * std::sqrt(e) - 1.2 * b * b + 1.5 * good_aug - 2.0 * l * l + 6.0 * p +
                 0.8 * rng.normal();
    rec.top1_accuracy = std::round(std::clamp(acc, 0.0, 100.0) * 100.0) / 100.0;
    rec.source_id = "synthetic-" + std::to_string(i);
    for (const auto& spec : space.components()) {
      if (!drivers.count(spec.name) && rng.uniform() < 0.05) rec.values.erase(spec.name);
    }
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

}  // namespace dlrec
