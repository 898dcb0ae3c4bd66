#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dlrec/encoding.hpp"
#include "dlrec/search_space.hpp"

namespace dlrec {

inline constexpr const char* kTargetColumn = "top1_accuracy";
inline constexpr const char* kSourceColumn = "source_id";

/// One evaluated DL system: a partial configuration (missing components are
/// simply absent) and its Top-1 accuracy in percent.
struct ModelRecord {
  Configuration values;
  double top1_accuracy = 0.0;
  std::string source_id;
};

struct TabularDataset {
  SearchSpace space;
  std::vector<ModelRecord> records;
};

/// Reads a UTF-8 CSV with a header row. Column names match component names
/// or their aliases; multi-select cells are ';'-separated; empty cells are
/// missing. Unknown columns are skipped and listed in `ignored` when given.
/// Throws IoError on unreadable files and on malformed rows (the message
/// names the 1-based data row).
TabularDataset load_csv(const std::string& path, const SearchSpace& space,
                        std::vector<std::string>* ignored = nullptr);

/// Writes the canonical form: components in space order, then the target
/// and source columns.
void save_csv(const TabularDataset& ds, const std::string& path);

/// Per-column fill values for missing range components: the median of the
/// encoded non-missing cells, or the midpoint of the encoded bounds when the
/// column has none. Categorical columns hold NaN.
Eigen::VectorXd numeric_fill(const TabularDataset& ds, const EncodingSchema& schema);

/// Design matrix (one encoded, imputed row per record, row order kept) and
/// target vector.
std::pair<DesignMatrix, TargetVector> to_matrix(const TabularDataset& ds,
                                                const EncodingSchema& schema);

/// Seeded shuffle split; the first part receives round(fraction * n) records.
std::pair<TabularDataset, TabularDataset> split(const TabularDataset& ds, double fraction,
                                                std::uint64_t seed);

/// Most frequent value for categorical components (ties to the earliest
/// label, or the set whose text form sorts first) and median for ranges; components never observed
/// take their first category or range midpoint.
Configuration dataset_modes(const TabularDataset& ds);

}  // namespace dlrec
