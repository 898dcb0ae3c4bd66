#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dlrec/search_space.hpp"

namespace dlrec {

using FeatureVector = Eigen::VectorXd;
using DesignMatrix = Eigen::MatrixXd;
using TargetVector = Eigen::VectorXd;

enum class ColumnRole {
  Binary,      // two-category exclusive component, 0/1 indicator
  Label,       // multi-category exclusive component, integer code
  MultiHot,    // one indicator per category of a multi-select component
  Numeric,     // range component, raw value
  LogNumeric,  // range component, natural log of the value
};

struct Column {
  std::string component;
  ColumnRole role = ColumnRole::Numeric;
  std::optional<std::string> label;  // MultiHot only
  double lo = 0.0;                   // bounds of the encoded value
  double hi = 0.0;
};

/// Deterministic column layout for a search space:
///  - 2-category exclusive -> 1 indicator column (category 0 -> 0, category 1 -> 1)
///  - n-category exclusive -> 1 label column with codes 0..n-1 in category order
///  - multi-select         -> n indicator columns, one per category
///  - ranges               -> 1 numeric column (ln of the value when log_scale)
///
/// Missing categorical values in dataset records encode as code n for
/// exclusive components and as an all-zero block for multi-selects.
class EncodingSchema {
 public:
  explicit EncodingSchema(SearchSpace space);

  const SearchSpace& space() const { return space_; }
  const std::vector<Column>& columns() const { return columns_; }
  Eigen::Index width() const { return static_cast<Eigen::Index>(columns_.size()); }

  /// Half-open column span [first, first + count) of component i.
  std::pair<Eigen::Index, Eigen::Index> span(std::size_t component) const {
    return spans_[component];
  }
  /// Owning component index for each column.
  std::size_t owner(Eigen::Index column) const { return owners_[static_cast<std::size_t>(column)]; }

  /// Stable 64-bit hash of the column layout and bounds.
  std::uint64_t fingerprint() const { return fingerprint_; }

  /// Missing-value code for an exclusive component's column.
  static double missing_code(const ComponentSpec& spec) {
    return static_cast<double>(spec.categories.size());
  }

 private:
  SearchSpace space_;
  std::vector<Column> columns_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> spans_;
  std::vector<std::size_t> owners_;
  std::uint64_t fingerprint_ = 0;
};

inline EncodingSchema build_schema(const SearchSpace& space) { return EncodingSchema(space); }

/// Encodes a complete configuration. Throws ValidationError on missing
/// components, unknown labels or values of the wrong kind.
FeatureVector encode(const EncodingSchema& schema, const Configuration& config);

/// Encodes a possibly partial record. Missing range components take
/// `numeric_fill[column]`; missing categoricals take their missing code.
FeatureVector encode_partial(const EncodingSchema& schema, const Configuration& record,
                             const Eigen::VectorXd& numeric_fill);

/// Inverse of encode on valid vectors; rounds, thresholds and clamps
/// arbitrary vectors onto the nearest valid configuration.
Configuration decode(const EncodingSchema& schema, const Eigen::Ref<const Eigen::VectorXd>& vec);

/// Equality with relative tolerance on real values (log-scale columns do not
/// round-trip bit-exactly through exp/log).
bool approx_equal(const Configuration& a, const Configuration& b, double rel_tol = 1e-12);

/// Maps encoded vectors to and from the unit cube using the column bounds.
Eigen::VectorXd to_unit(const EncodingSchema& schema, const Eigen::Ref<const Eigen::VectorXd>& vec);
Eigen::VectorXd from_unit(const EncodingSchema& schema, const Eigen::Ref<const Eigen::VectorXd>& unit);

}  // namespace dlrec
