#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "als/domain.hpp"

namespace als::gbm {

struct ColumnSpec {
  std::string name;
  FeatureKind kind = FeatureKind::Numeric;

  friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

/// Ordered column list a model was trained on.
struct Schema {
  std::vector<ColumnSpec> columns;

  std::size_t size() const { return columns.size(); }
  /// FNV-1a over column names and kinds; stored in model files.
  std::uint64_t hash() const;

  friend bool operator==(const Schema&, const Schema&) = default;
};

/// Row-major design matrix with labels. Categorical cells hold a
/// non-negative integral category index; NaN marks a missing value.
struct Dataset {
  Schema schema;
  std::vector<double> x;
  std::vector<double> y;

  std::size_t rows() const { return y.size(); }
  std::size_t cols() const { return schema.size(); }
  std::span<const double> row(std::size_t i) const { return {x.data() + i * cols(), cols()}; }
  double at(std::size_t r, std::size_t c) const { return x[r * cols() + c]; }

  void add_row(std::span<const double> values, double label);
  Dataset subset(std::span<const std::size_t> rows) const;
};

}  // namespace als::gbm
