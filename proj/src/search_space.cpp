#include "dlrec/search_space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dlrec/errors.hpp"

namespace dlrec {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const std::pair<Dimension, const char*> kDimensionNames[] = {
    {Dimension::ModelArchitecture, "ModelArchitecture"},
    {Dimension::TrainingOptimization, "TrainingOptimization"},
    {Dimension::RegularizationGeneralization, "RegularizationGeneralization"},
    {Dimension::Framework, "Framework"},
    {Dimension::Data, "Data"},
    {Dimension::Hardware, "Hardware"},
};

const std::pair<ComponentKind, const char*> kKindNames[] = {
    {ComponentKind::CategoricalExclusive, "CategoricalExclusive"},
    {ComponentKind::CategoricalMultiSelect, "CategoricalMultiSelect"},
    {ComponentKind::ContinuousRange, "ContinuousRange"},
    {ComponentKind::IntegerRange, "IntegerRange"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void check_spec(const ComponentSpec& c) {
  if (c.name.empty()) throw ValidationError("component with empty name");
  if (is_categorical(c.kind)) {
    if (c.categories.empty()) {
      throw ValidationError("component '" + c.name + "' has no categories");
    }
    std::set<std::string> seen;
    for (const auto& label : c.categories) {
      if (label.empty() || label.find(';') != std::string::npos) {
        throw ValidationError("component '" + c.name + "' has an invalid label '" + label + "'");
      }
      if (!seen.insert(label).second) {
        throw ValidationError("component '" + c.name + "' repeats category '" + label + "'");
      }
    }
  } else {
    if (!(std::isfinite(c.lo) && std::isfinite(c.hi) && c.lo < c.hi)) {
      throw ValidationError("component '" + c.name + "' needs lo < hi");
    }
    if (c.log_scale && c.lo <= 0.0) {
      throw ValidationError("log-scale component '" + c.name + "' needs lo > 0");
    }
    if (c.kind == ComponentKind::IntegerRange &&
        (std::ceil(c.lo) > std::floor(c.hi))) {
      throw ValidationError("integer component '" + c.name + "' holds no integer");
    }
  }
}

}  // namespace

std::string to_string(Dimension d) {
  for (const auto& [k, n] : kDimensionNames)
    if (k == d) return n;
  return "?";
}

std::string to_string(ComponentKind kind) {
  for (const auto& [k, n] : kKindNames)
    if (k == kind) return n;
  return "?";
}

Dimension parse_dimension(const std::string& s) {
  for (const auto& [k, n] : kDimensionNames)
    if (s == n) return k;
  throw ValidationError("unknown dimension '" + s + "'");
}

ComponentKind parse_kind(const std::string& s) {
  for (const auto& [k, n] : kKindNames)
    if (s == n) return k;
  throw ValidationError("unknown component kind '" + s + "'");
}

std::optional<std::size_t> ComponentSpec::category_index(const std::string& label) const {
  const auto it = std::find(categories.begin(), categories.end(), label);
  if (it == categories.end()) return std::nullopt;
  return static_cast<std::size_t>(it - categories.begin());
}

std::string format_value(const ConfigValue& v) {
  return std::visit(overloaded{
                        [](const Category& c) { return c.label; },
                        [](const CategorySet& s) {
                          std::string out;
                          for (const auto& l : s.labels) {
                            if (!out.empty()) out += ';';
                            out += l;
                          }
                          return out;
                        },
                        [](double d) {
                          std::ostringstream os;
                          os.precision(17);
                          os << d;
                          return os.str();
                        },
                        [](std::int64_t i) { return std::to_string(i); },
                    },
                    v);
}

SearchSpace::SearchSpace(std::vector<ComponentSpec> components)
    : components_(std::move(components)) {
  std::set<std::string> names;
  for (const auto& c : components_) {
    check_spec(c);
    if (!names.insert(c.name).second) {
      throw ValidationError("duplicate component name '" + c.name + "'");
    }
  }
}

const ComponentSpec* SearchSpace::find(const std::string& name) const {
  for (const auto& c : components_)
    if (c.name == name) return &c;
  return nullptr;
}

const ComponentSpec& SearchSpace::at(const std::string& name) const {
  if (const auto* c = find(name)) return *c;
  throw ValidationError("unknown component '" + name + "'");
}

std::optional<std::size_t> SearchSpace::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < components_.size(); ++i)
    if (components_[i].name == name) return i;
  return std::nullopt;
}

std::optional<std::string> check_value(const ComponentSpec& spec, const ConfigValue& value) {
  switch (spec.kind) {
    case ComponentKind::CategoricalExclusive: {
      const auto* c = std::get_if<Category>(&value);
      if (!c) return "expected a single category";
      if (!spec.category_index(c->label)) return "unknown category '" + c->label + "'";
      return std::nullopt;
    }
    case ComponentKind::CategoricalMultiSelect: {
      const auto* s = std::get_if<CategorySet>(&value);
      if (!s) return "expected a set of categories";
      if (s->labels.empty()) return "empty category set";
      for (const auto& l : s->labels)
        if (!spec.category_index(l)) return "unknown category '" + l + "'";
      return std::nullopt;
    }
    case ComponentKind::ContinuousRange: {
      const auto* d = std::get_if<double>(&value);
      if (!d) return "expected a real value";
      if (!(*d >= spec.lo && *d <= spec.hi)) {
        return "value " + format_value(value) + " outside [" + format_value(spec.lo) + ", " +
               format_value(spec.hi) + "]";
      }
      return std::nullopt;
    }
    case ComponentKind::IntegerRange: {
      const auto* i = std::get_if<std::int64_t>(&value);
      if (!i) return "expected an integer value";
      const auto d = static_cast<double>(*i);
      if (!(d >= spec.lo && d <= spec.hi)) {
        return "value " + std::to_string(*i) + " outside [" + format_value(spec.lo) + ", " +
               format_value(spec.hi) + "]";
      }
      return std::nullopt;
    }
  }
  return "unhandled component kind";
}

ValidationReport validate(const SearchSpace& space, const Configuration& config) {
  ValidationReport report;
  for (const auto& spec : space.components()) {
    const auto it = config.find(spec.name);
    if (it == config.end()) {
      report.violations.push_back({spec.name, "missing component"});
      continue;
    }
    if (auto problem = check_value(spec, it->second)) {
      report.violations.push_back({spec.name, *problem});
    }
  }
  for (const auto& [name, value] : config) {
    if (!space.find(name)) report.violations.push_back({name, "not a component of the space"});
  }
  report.pass = report.violations.empty();
  return report;
}

ConfigValue sample_value(const ComponentSpec& spec, Rng& rng) {
  switch (spec.kind) {
    case ComponentKind::CategoricalExclusive:
      return Category{spec.categories[rng.index(spec.categories.size())]};
    case ComponentKind::CategoricalMultiSelect: {
      CategorySet set;
      while (set.labels.empty()) {
        for (const auto& label : spec.categories)
          if (rng.coin()) set.labels.insert(label);
      }
      return set;
    }
    case ComponentKind::ContinuousRange: {
      if (spec.log_scale) {
        const double v = std::exp(rng.uniform(std::log(spec.lo), std::log(spec.hi)));
        return std::clamp(v, spec.lo, spec.hi);
      }
      return std::clamp(rng.uniform(spec.lo, spec.hi), spec.lo, spec.hi);
    }
    case ComponentKind::IntegerRange: {
      const auto lo = static_cast<std::int64_t>(std::ceil(spec.lo));
      const auto hi = static_cast<std::int64_t>(std::floor(spec.hi));
      if (spec.log_scale) {
        const double v = std::exp(rng.uniform(std::log(static_cast<double>(lo) - 0.5 + 1e-9),
                                              std::log(static_cast<double>(hi) + 0.5)));
        return std::clamp(static_cast<std::int64_t>(std::llround(v)), lo, hi);
      }
      return lo + static_cast<std::int64_t>(rng.index(static_cast<std::uint64_t>(hi - lo + 1)));
    }
  }
  throw ValidationError("unhandled component kind");
}

Configuration sample_uniform(const SearchSpace& space, Rng& rng) {
  Configuration config;
  for (const auto& spec : space.components()) config.emplace(spec.name, sample_value(spec, rng));
  return config;
}

Configuration sample_uniform(const SearchSpace& space, std::uint64_t seed) {
  Rng rng(seed);
  return sample_uniform(space, rng);
}

Configuration RestrictedSpace::complete(const Configuration& free_point) const {
  Configuration out = fixed;
  for (const auto& [k, v] : free_point) out.insert_or_assign(k, v);
  return out;
}

RestrictedSpace restrict_space(const SearchSpace& space, const std::set<std::string>& free,
                               const Configuration& fixed) {
  for (const auto& name : free) {
    if (!space.find(name)) throw ValidationError("invalid restriction: unknown component '" + name + "'");
    if (fixed.count(name)) {
      throw ValidationError("invalid restriction: component '" + name + "' is both free and fixed");
    }
  }
  for (const auto& [name, value] : fixed) {
    const auto* spec = space.find(name);
    if (!spec) throw ValidationError("invalid restriction: unknown component '" + name + "'");
    if (auto problem = check_value(*spec, value)) {
      throw ValidationError("invalid restriction: fixed '" + name + "': " + *problem);
    }
  }
  std::vector<ComponentSpec> kept;
  for (const auto& spec : space.components()) {
    if (free.count(spec.name)) {
      kept.push_back(spec);
    } else if (!fixed.count(spec.name)) {
      throw ValidationError("invalid restriction: component '" + spec.name +
                            "' is neither free nor fixed");
    }
  }
  return RestrictedSpace{SearchSpace(std::move(kept)), fixed};
}

nlohmann::json space_to_json(const SearchSpace& space) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : space.components()) {
    nlohmann::json j;
    j["name"] = c.name;
    j["dimension"] = to_string(c.dimension);
    j["kind"] = to_string(c.kind);
    if (is_categorical(c.kind)) {
      j["categories"] = c.categories;
    } else {
      j["lo"] = c.lo;
      j["hi"] = c.hi;
      j["log_scale"] = c.log_scale;
    }
    if (!c.searchable) j["searchable"] = false;
    if (!c.aliases.empty()) j["aliases"] = c.aliases;
    comps.push_back(std::move(j));
  }
  return nlohmann::json{{"format", "dlrec-space"}, {"version", 1}, {"components", comps}};
}

SearchSpace space_from_json(const nlohmann::json& doc) {
  try {
    if (doc.value("version", 1) != 1) throw ValidationError("unsupported search-space version");
    std::vector<ComponentSpec> comps;
    for (const auto& j : doc.at("components")) {
      ComponentSpec c;
      c.name = j.at("name").get<std::string>();
      c.dimension = parse_dimension(j.at("dimension").get<std::string>());
      c.kind = parse_kind(j.at("kind").get<std::string>());
      if (is_categorical(c.kind)) {
        c.categories = j.at("categories").get<std::vector<std::string>>();
      } else {
        c.lo = j.at("lo").get<double>();
        c.hi = j.at("hi").get<double>();
        c.log_scale = j.value("log_scale", false);
      }
      c.searchable = j.value("searchable", true);
      c.aliases = j.value("aliases", std::vector<std::string>{});
      comps.push_back(std::move(c));
    }
    return SearchSpace(std::move(comps));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed search-space document: ") + e.what());
  }
}

SearchSpace load_space(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open search-space file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse search-space file '" + path + "': " + e.what());
  }
  return space_from_json(doc);
}

void save_space(const SearchSpace& space, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << space_to_json(space).dump(2) << '\n';
}

nlohmann::json config_to_json(const Configuration& config) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, value] : config) {
    std::visit(overloaded{
                   [&](const Category& c) { j[name] = c.label; },
                   [&](const CategorySet& s) { j[name] = std::vector<std::string>(s.labels.begin(), s.labels.end()); },
                   [&](double d) { j[name] = d; },
                   [&](std::int64_t i) { j[name] = i; },
               },
               value);
  }
  return j;
}

Configuration config_from_json(const SearchSpace& space, const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("configuration document must be an object");
  Configuration config;
  for (const auto& [name, j] : doc.items()) {
    const auto& spec = space.at(name);
    switch (spec.kind) {
      case ComponentKind::CategoricalExclusive:
        if (!j.is_string()) throw ValidationError("'" + name + "' expects a string");
        config.emplace(name, Category{j.get<std::string>()});
        break;
      case ComponentKind::CategoricalMultiSelect: {
        CategorySet set;
        if (j.is_string()) {
          const auto v = parse_value(spec, j.get<std::string>());
          set = std::get<CategorySet>(v);
        } else if (j.is_array()) {
          for (const auto& l : j) set.labels.insert(l.get<std::string>());
        } else {
          throw ValidationError("'" + name + "' expects a list of labels");
        }
        config.emplace(name, std::move(set));
        break;
      }
      case ComponentKind::ContinuousRange:
        if (!j.is_number()) throw ValidationError("'" + name + "' expects a number");
        config.emplace(name, j.get<double>());
        break;
      case ComponentKind::IntegerRange: {
        if (!j.is_number()) throw ValidationError("'" + name + "' expects a number");
        const double d = j.get<double>();
        if (d != std::floor(d)) throw ValidationError("'" + name + "' expects an integer");
        config.emplace(name, static_cast<std::int64_t>(d));
        break;
      }
    }
  }
  return config;
}

Configuration load_config(const SearchSpace& space, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open configuration file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse configuration file '" + path + "': " + e.what());
  }
  return config_from_json(space, doc);
}

ConfigValue parse_value(const ComponentSpec& spec, const std::string& raw) {
  const std::string text = trim(raw);
  switch (spec.kind) {
    case ComponentKind::CategoricalExclusive:
      return Category{text};
    case ComponentKind::CategoricalMultiSelect: {
      CategorySet set;
      std::stringstream ss(text);
      std::string part;
      while (std::getline(ss, part, ';')) {
        part = trim(part);
        if (!part.empty()) set.labels.insert(part);
      }
      return set;
    }
    case ComponentKind::ContinuousRange: {
      std::size_t used = 0;
      double d = 0.0;
      try {
        d = std::stod(text, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != text.size()) {
        throw ValidationError("'" + spec.name + "': '" + text + "' is not a number");
      }
      return d;
    }
    case ComponentKind::IntegerRange: {
      std::size_t used = 0;
      double d = 0.0;
      try {
        d = std::stod(text, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != text.size() || d != std::floor(d)) {
        throw ValidationError("'" + spec.name + "': '" + text + "' is not an integer");
      }
      return static_cast<std::int64_t>(d);
    }
  }
  throw ValidationError("unhandled component kind");
}

}  // namespace dlrec
