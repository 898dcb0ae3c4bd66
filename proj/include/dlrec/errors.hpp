#pragma once

#include <stdexcept>
#include <string>

namespace dlrec {

/// Input that violates a documented contract (bad space, bad restriction,
/// unknown label, ill-conditioned kernel matrix).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension or schema mismatch between a model and its inputs.
class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Unreadable, truncated or wrongly versioned files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dlrec
