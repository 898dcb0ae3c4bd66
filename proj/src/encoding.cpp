#include "dlrec/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dlrec/errors.hpp"

namespace dlrec {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double encode_range(const ComponentSpec& spec, const ConfigValue& v) {
  double x = 0.0;
  if (spec.kind == ComponentKind::IntegerRange) {
    const auto* i = std::get_if<std::int64_t>(&v);
    if (!i) throw ValidationError("'" + spec.name + "' expects an integer value");
    x = static_cast<double>(*i);
  } else {
    const auto* d = std::get_if<double>(&v);
    if (!d) throw ValidationError("'" + spec.name + "' expects a real value");
    x = *d;
  }
  if (spec.log_scale) {
    if (!(x > 0.0)) throw ValidationError("'" + spec.name + "' log-scale value must be positive");
    return std::log(x);
  }
  return x;
}

void encode_component(const ComponentSpec& spec, const ConfigValue& value, Eigen::Index first,
                      FeatureVector& out) {
  switch (spec.kind) {
    case ComponentKind::CategoricalExclusive: {
      const auto* c = std::get_if<Category>(&value);
      if (!c) throw ValidationError("'" + spec.name + "' expects a single category");
      const auto idx = spec.category_index(c->label);
      if (!idx) throw ValidationError("'" + spec.name + "': unknown category '" + c->label + "'");
      out[first] = static_cast<double>(*idx);
      break;
    }
    case ComponentKind::CategoricalMultiSelect: {
      const auto* s = std::get_if<CategorySet>(&value);
      if (!s) throw ValidationError("'" + spec.name + "' expects a set of categories");
      for (std::size_t k = 0; k < spec.categories.size(); ++k) out[first + static_cast<Eigen::Index>(k)] = 0.0;
      for (const auto& label : s->labels) {
        const auto idx = spec.category_index(label);
        if (!idx) throw ValidationError("'" + spec.name + "': unknown category '" + label + "'");
        out[first + static_cast<Eigen::Index>(*idx)] = 1.0;
      }
      break;
    }
    case ComponentKind::ContinuousRange:
    case ComponentKind::IntegerRange:
      out[first] = encode_range(spec, value);
      break;
  }
}

}  // namespace

EncodingSchema::EncodingSchema(SearchSpace space) : space_(std::move(space)) {
  std::ostringstream desc;
  desc.precision(17);
  for (std::size_t i = 0; i < space_.size(); ++i) {
    const auto& spec = space_[i];
    const auto first = static_cast<Eigen::Index>(columns_.size());
    switch (spec.kind) {
      case ComponentKind::CategoricalExclusive: {
        const auto n = static_cast<double>(spec.categories.size());
        const auto role = spec.categories.size() == 2 ? ColumnRole::Binary : ColumnRole::Label;
        columns_.push_back({spec.name, role, std::nullopt, 0.0, std::max(n - 1.0, 1.0)});
        break;
      }
      case ComponentKind::CategoricalMultiSelect:
        for (const auto& label : spec.categories)
          columns_.push_back({spec.name, ColumnRole::MultiHot, label, 0.0, 1.0});
        break;
      case ComponentKind::ContinuousRange:
      case ComponentKind::IntegerRange:
        if (spec.log_scale) {
          columns_.push_back({spec.name, ColumnRole::LogNumeric, std::nullopt, std::log(spec.lo),
                              std::log(spec.hi)});
        } else {
          columns_.push_back({spec.name, ColumnRole::Numeric, std::nullopt, spec.lo, spec.hi});
        }
        break;
    }
    const auto count = static_cast<Eigen::Index>(columns_.size()) - first;
    spans_.emplace_back(first, count);
    owners_.insert(owners_.end(), static_cast<std::size_t>(count), i);
  }
  for (const auto& c : columns_) {
    desc << c.component << '|' << static_cast<int>(c.role) << '|' << c.label.value_or("") << '|'
         << c.lo << '|' << c.hi << '\n';
  }
  fingerprint_ = fnv1a(desc.str());
}

FeatureVector encode(const EncodingSchema& schema, const Configuration& config) {
  const auto& space = schema.space();
  FeatureVector out(schema.width());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& spec = space[i];
    const auto it = config.find(spec.name);
    if (it == config.end()) throw ValidationError("configuration lacks component '" + spec.name + "'");
    encode_component(spec, it->second, schema.span(i).first, out);
  }
  return out;
}

FeatureVector encode_partial(const EncodingSchema& schema, const Configuration& record,
                             const Eigen::VectorXd& numeric_fill) {
  if (numeric_fill.size() != schema.width()) throw ShapeError("fill vector width mismatch");
  const auto& space = schema.space();
  FeatureVector out(schema.width());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& spec = space[i];
    const auto [first, count] = schema.span(i);
    const auto it = record.find(spec.name);
    if (it != record.end()) {
      encode_component(spec, it->second, first, out);
      continue;
    }
    switch (spec.kind) {
      case ComponentKind::CategoricalExclusive:
        out[first] = EncodingSchema::missing_code(spec);
        break;
      case ComponentKind::CategoricalMultiSelect:
        out.segment(first, count).setZero();
        break;
      default:
        out[first] = numeric_fill[first];
    }
  }
  return out;
}

Configuration decode(const EncodingSchema& schema, const Eigen::Ref<const Eigen::VectorXd>& vec) {
  if (vec.size() != schema.width()) throw ShapeError("feature vector width mismatch");
  const auto& space = schema.space();
  Configuration config;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& spec = space[i];
    const auto [first, count] = schema.span(i);
    switch (spec.kind) {
      case ComponentKind::CategoricalExclusive: {
        const double n = static_cast<double>(spec.categories.size());
        double code = 0.0;
        if (spec.categories.size() == 2) {
          code = vec[first] >= 0.5 ? 1.0 : 0.0;
        } else {
          code = std::clamp(std::round(vec[first]), 0.0, n - 1.0);
        }
        if (std::isnan(vec[first])) code = 0.0;
        config.emplace(spec.name, Category{spec.categories[static_cast<std::size_t>(code)]});
        break;
      }
      case ComponentKind::CategoricalMultiSelect: {
        CategorySet set;
        Eigen::Index best = 0;
        for (Eigen::Index k = 0; k < count; ++k) {
          if (vec[first + k] > vec[first + best]) best = k;
          if (vec[first + k] >= 0.5) set.labels.insert(spec.categories[static_cast<std::size_t>(k)]);
        }
        if (set.labels.empty()) set.labels.insert(spec.categories[static_cast<std::size_t>(best)]);
        config.emplace(spec.name, std::move(set));
        break;
      }
      case ComponentKind::ContinuousRange: {
        double x = spec.log_scale ? std::exp(vec[first]) : vec[first];
        if (std::isnan(x)) x = spec.lo;
        config.emplace(spec.name, std::clamp(x, spec.lo, spec.hi));
        break;
      }
      case ComponentKind::IntegerRange: {
        double x = spec.log_scale ? std::exp(vec[first]) : vec[first];
        if (std::isnan(x)) x = spec.lo;
        x = std::clamp(std::round(x), std::ceil(spec.lo), std::floor(spec.hi));
        config.emplace(spec.name, static_cast<std::int64_t>(x));
        break;
      }
    }
  }
  return config;
}

bool approx_equal(const Configuration& a, const Configuration& b, double rel_tol) {
  if (a.size() != b.size()) return false;
  for (const auto& [name, va] : a) {
    const auto it = b.find(name);
    if (it == b.end()) return false;
    const auto& vb = it->second;
    if (va.index() != vb.index()) return false;
    if (const auto* da = std::get_if<double>(&va)) {
      const double db = std::get<double>(vb);
      if (std::abs(*da - db) > rel_tol * std::max(std::abs(*da), std::abs(db))) return false;
    } else if (!(va == vb)) {
      return false;
    }
  }
  return true;
}

Eigen::VectorXd to_unit(const EncodingSchema& schema, const Eigen::Ref<const Eigen::VectorXd>& vec) {
  if (vec.size() != schema.width()) throw ShapeError("feature vector width mismatch");
  Eigen::VectorXd out(vec.size());
  for (Eigen::Index j = 0; j < vec.size(); ++j) {
    const auto& c = schema.columns()[static_cast<std::size_t>(j)];
    out[j] = (vec[j] - c.lo) / (c.hi - c.lo);
  }
  return out;
}

Eigen::VectorXd from_unit(const EncodingSchema& schema, const Eigen::Ref<const Eigen::VectorXd>& unit) {
  if (unit.size() != schema.width()) throw ShapeError("feature vector width mismatch");
  Eigen::VectorXd out(unit.size());
  for (Eigen::Index j = 0; j < unit.size(); ++j) {
    const auto& c = schema.columns()[static_cast<std::size_t>(j)];
    out[j] = c.lo + unit[j] * (c.hi - c.lo);
  }
  return out;
}

}  // namespace dlrec
