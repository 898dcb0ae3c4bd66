#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dlrec/rng.hpp"

namespace dlrec {

enum class Dimension {
  ModelArchitecture,
  TrainingOptimization,
  RegularizationGeneralization,
  Framework,
  Data,
  Hardware,
};

enum class ComponentKind {
  CategoricalExclusive,
  CategoricalMultiSelect,
  ContinuousRange,
  IntegerRange,
};

std::string to_string(Dimension d);
std::string to_string(ComponentKind k);
Dimension parse_dimension(const std::string& s);
ComponentKind parse_kind(const std::string& s);

inline bool is_categorical(ComponentKind k) {
  return k == ComponentKind::CategoricalExclusive ||
         k == ComponentKind::CategoricalMultiSelect;
}

/// One tunable system component.
struct ComponentSpec {
  std::string name;
  Dimension dimension = Dimension::ModelArchitecture;
  ComponentKind kind = ComponentKind::CategoricalExclusive;
  std::vector<std::string> categories;  // categorical kinds only
  double lo = 0.0;                      // range kinds only
  double hi = 0.0;
  bool log_scale = false;
  // Components describing the user's data (e.g. train/test similarity) are
  // carried in the space but skipped by automatic confirmation.
  bool searchable = true;
  // Alternate column names accepted when reading datasets.
  std::vector<std::string> aliases;

  bool operator==(const ComponentSpec&) const = default;

  /// Index of a category label, or nullopt.
  std::optional<std::size_t> category_index(const std::string& label) const;
};

// Configuration values.
struct Category {
  std::string label;
  bool operator==(const Category&) const = default;
};
struct CategorySet {
  std::set<std::string> labels;
  bool operator==(const CategorySet&) const = default;
};
using ConfigValue = std::variant<Category, CategorySet, double, std::int64_t>;

/// Assignment of values to components, keyed by component name. A record
/// read from a dataset may be partial; a point of the search space is not.
using Configuration = std::map<std::string, ConfigValue>;

std::string format_value(const ConfigValue& v);

/// Ordered, immutable list of components with unique names.
class SearchSpace {
 public:
  SearchSpace() = default;
  /// Throws ValidationError when any component or name is invalid.
  explicit SearchSpace(std::vector<ComponentSpec> components);

  const std::vector<ComponentSpec>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  const ComponentSpec& operator[](std::size_t i) const { return components_[i]; }

  const ComponentSpec* find(const std::string& name) const;
  const ComponentSpec& at(const std::string& name) const;
  std::optional<std::size_t> index_of(const std::string& name) const;

  bool operator==(const SearchSpace& o) const { return components_ == o.components_; }

 private:
  std::vector<ComponentSpec> components_;
};

struct Violation {
  std::string component;
  std::string message;
};

struct ValidationReport {
  bool pass = true;
  std::vector<Violation> violations;
  explicit operator bool() const { return pass; }
};

/// Checks that `value` is a legal assignment for `spec`; returns the problem
/// description, or nullopt.
std::optional<std::string> check_value(const ComponentSpec& spec, const ConfigValue& value);

ValidationReport validate(const SearchSpace& space, const Configuration& config);

ConfigValue sample_value(const ComponentSpec& spec, Rng& rng);
Configuration sample_uniform(const SearchSpace& space, Rng& rng);
Configuration sample_uniform(const SearchSpace& space, std::uint64_t seed);

/// A reduced space over the free components, plus constants for the rest.
struct RestrictedSpace {
  SearchSpace free;
  Configuration fixed;

  /// Re-attaches the fixed constants to a point of the free space.
  Configuration complete(const Configuration& free_point) const;
};

/// Throws ValidationError when free and fixed overlap, fail to cover the
/// space, name unknown components, or a fixed value is invalid.
RestrictedSpace restrict_space(const SearchSpace& space,
                               const std::set<std::string>& free,
                               const Configuration& fixed);

/// The bundled 27-component space.
const SearchSpace& default_space();

// Search-space documents (JSON key/value tree).
nlohmann::json space_to_json(const SearchSpace& space);
SearchSpace space_from_json(const nlohmann::json& doc);
SearchSpace load_space(const std::string& path);
void save_space(const SearchSpace& space, const std::string& path);

// Configuration documents: {"component": value, ...} where categories are
// strings, multi-selects are arrays of strings and ranges are numbers.
nlohmann::json config_to_json(const Configuration& config);
Configuration config_from_json(const SearchSpace& space, const nlohmann::json& doc);
Configuration load_config(const SearchSpace& space, const std::string& path);

/// Parses a textual cell ("a;b" for multi-selects) into a value for `spec`.
ConfigValue parse_value(const ComponentSpec& spec, const std::string& text);

}  // namespace dlrec
