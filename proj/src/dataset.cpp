#include "dlrec/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include "dlrec/errors.hpp"
#include "dlrec/rng.hpp"

namespace dlrec {

namespace {

// RFC 4180 record splitting; quoted fields may contain commas and "".
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cell));
      cell.clear();
    } else if (ch != '\r') {
      cell += ch;
    }
  }
  out.push_back(std::move(cell));
  return out;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TabularDataset load_csv(const std::string& path, const SearchSpace& space,
                        std::vector<std::string>* ignored) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("dataset '" + path + "' has no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_csv_line(line);
  std::vector<const ComponentSpec*> column_spec(header.size(), nullptr);
  std::optional<std::size_t> target_col, source_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto& name = header[c];
    if (name == kTargetColumn) {
      target_col = c;
    } else if (name == kSourceColumn) {
      source_col = c;
    } else if (const auto* spec = space.find(name)) {
      column_spec[c] = spec;
    } else {
      for (const auto& spec : space.components()) {
        if (std::find(spec.aliases.begin(), spec.aliases.end(), name) != spec.aliases.end()) {
          column_spec[c] = &spec;
          break;
        }
      }
      if (!column_spec[c] && ignored) ignored->push_back(name);
    }
  }
  if (!target_col) throw IoError("dataset '" + path + "' lacks a '" + kTargetColumn + "' column");

  TabularDataset ds{space, {}};
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    ++row;
    const auto where = "dataset '" + path + "' row " + std::to_string(row) + ": ";
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw IoError(where + "expected " + std::to_string(header.size()) + " cells, got " +
                    std::to_string(cells.size()));
    }
    ModelRecord rec;
    try {
      rec.top1_accuracy = std::stod(cells[*target_col]);
    } catch (const std::exception&) {
      throw IoError(where + "unreadable " + kTargetColumn + " '" + cells[*target_col] + "'");
    }
    if (!(rec.top1_accuracy >= 0.0 && rec.top1_accuracy <= 100.0)) {
      throw IoError(where + kTargetColumn + " " + cells[*target_col] + " outside [0, 100]");
    }
    if (source_col) rec.source_id = cells[*source_col];
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto* spec = column_spec[c];
      if (!spec || blank(cells[c])) continue;
      try {
        auto value = parse_value(*spec, cells[c]);
        if (auto problem = check_value(*spec, value)) throw ValidationError("'" + spec->name + "': " + *problem);
        rec.values.insert_or_assign(spec->name, std::move(value));
      } catch (const ValidationError& e) {
        throw IoError(where + e.what());
      }
    }
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

void save_csv(const TabularDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (const auto& spec : ds.space.components()) out << csv_quote(spec.name) << ',';
  out << kTargetColumn << ',' << kSourceColumn << '\n';
  for (const auto& rec : ds.records) {
    for (const auto& spec : ds.space.components()) {
      const auto it = rec.values.find(spec.name);
      if (it != rec.values.end()) out << csv_quote(format_value(it->second));
      out << ',';
    }
    out << format_value(rec.top1_accuracy) << ',' << csv_quote(rec.source_id) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

Eigen::VectorXd numeric_fill(const TabularDataset& ds, const EncodingSchema& schema) {
  Eigen::VectorXd fill = Eigen::VectorXd::Constant(schema.width(), std::numeric_limits<double>::quiet_NaN());
  const auto& space = schema.space();
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& spec = space[i];
    if (is_categorical(spec.kind)) continue;
    const auto first = schema.span(i).first;
    std::vector<double> present;
    for (const auto& rec : ds.records) {
      const auto it = rec.values.find(spec.name);
      if (it == rec.values.end()) continue;
      const double v = std::holds_alternative<std::int64_t>(it->second)
                           ? static_cast<double>(std::get<std::int64_t>(it->second))
                           : std::get<double>(it->second);
      present.push_back(spec.log_scale ? std::log(v) : v);
    }
    const auto& col = schema.columns()[static_cast<std::size_t>(first)];
    fill[first] = present.empty() ? 0.5 * (col.lo + col.hi) : median(std::move(present));
  }
  return fill;
}

std::pair<DesignMatrix, TargetVector> to_matrix(const TabularDataset& ds,
                                                const EncodingSchema& schema) {
  const auto fill = numeric_fill(ds, schema);
  const auto n = static_cast<Eigen::Index>(ds.records.size());
  DesignMatrix X(n, schema.width());
  TargetVector y(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& rec = ds.records[static_cast<std::size_t>(r)];
    X.row(r) = encode_partial(schema, rec.values, fill).transpose();
    y[r] = rec.top1_accuracy;
  }
  return {std::move(X), std::move(y)};
}

std::pair<TabularDataset, TabularDataset> split(const TabularDataset& ds, double fraction,
                                                std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ValidationError("split fraction must lie in (0, 1)");
  std::vector<std::size_t> idx(ds.records.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx.begin(), idx.end());
  const auto n_first = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size())));
  TabularDataset a{ds.space, {}}, b{ds.space, {}};
  for (std::size_t k = 0; k < idx.size(); ++k) {
    (k < n_first ? a : b).records.push_back(ds.records[idx[k]]);
  }
  return {std::move(a), std::move(b)};
}

Configuration dataset_modes(const TabularDataset& ds) {
  Configuration out;
  for (const auto& spec : ds.space.components()) {
    if (is_categorical(spec.kind)) {
      // Count by formatted value; std::map keeps ties ordered.
      std::map<std::string, std::pair<std::size_t, ConfigValue>> counts;
      for (const auto& rec : ds.records) {
        const auto it = rec.values.find(spec.name);
        if (it == rec.values.end()) continue;
        auto& slot = counts.try_emplace(format_value(it->second), 0, it->second).first->second;
        ++slot.first;
      }
      if (counts.empty()) {
        if (spec.kind == ComponentKind::CategoricalExclusive) {
          out.emplace(spec.name, Category{spec.categories.front()});
        } else {
          out.emplace(spec.name, CategorySet{{spec.categories.front()}});
        }
        continue;
      }
      // Prefer higher counts, then earlier category order for exclusives.
      const std::pair<std::size_t, ConfigValue>* best = nullptr;
      std::size_t best_rank = 0;
      for (const auto& [key, entry] : counts) {
        std::size_t rank = 0;
        if (const auto* c = std::get_if<Category>(&entry.second)) rank = *spec.category_index(c->label);
        if (!best || entry.first > best->first ||
            (entry.first == best->first && rank < best_rank)) {
          best = &entry;
          best_rank = rank;
        }
      }
      out.emplace(spec.name, best->second);
    } else {
      std::vector<double> present;
      for (const auto& rec : ds.records) {
        const auto it = rec.values.find(spec.name);
        if (it == rec.values.end()) continue;
        present.push_back(std::holds_alternative<std::int64_t>(it->second)
                              ? static_cast<double>(std::get<std::int64_t>(it->second))
                              : std::get<double>(it->second));
      }
      const double m = present.empty() ? 0.5 * (spec.lo + spec.hi) : median(std::move(present));
      if (spec.kind == ComponentKind::IntegerRange) {
        const double r = std::clamp(std::round(m), std::ceil(spec.lo), std::floor(spec.hi));
        out.emplace(spec.name, static_cast<std::int64_t>(r));
      } else {
        out.emplace(spec.name, std::clamp(m, spec.lo, spec.hi));
      }
    }
  }
  return out;
}

}  // namespace dlrec
