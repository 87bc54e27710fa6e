#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "als/gbm/dataset.hpp"

namespace als::gbm {

/// One node of a binary regression tree. A node with `feature < 0` is a
/// leaf and carries `value`; otherwise rows with x <= threshold (numeric) or
/// x in `left_categories` (categorical) go left. Missing values and
/// categories unseen at training go to the side flagged by `missing_left`.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  std::vector<int> left_categories;  // sorted
  bool missing_left = false;
  int left = -1;
  int right = -1;
  double value = 0.0;
  double gain = 0.0;

  bool is_leaf() const { return feature < 0; }
};

/// Nodes are stored in preorder; node 0 is the root.
class RegressionTree {
public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes);

  /// Single-leaf tree.
  static RegressionTree constant(double value);

  double predict(std::span<const double> row) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const;

private:
  std::vector<TreeNode> nodes_;
};

struct TreeParams {
  int max_depth = 7;
  std::size_t min_leaf = 5;
};

/// Per-feature row orderings (ascending value, missing last) computed once
/// per dataset and reused by every tree.
class PresortedColumns {
public:
  explicit PresortedColumns(const Dataset& data);
  const std::vector<std::size_t>& order(std::size_t feature) const { return order_[feature]; }

private:
  std::vector<std::vector<std::size_t>> order_;
};

/// Chooses a leaf's output from the training rows that reach it.
using LeafValueFn = std::function<double(std::span<const std::size_t> rows)>;

/// Greedy depth-first tree growth on `gradient` (indexed by dataset row)
/// using squared-error gain. Only `rows` take part; only `features` are
/// considered for splits, in the given order, which also breaks gain ties.
RegressionTree grow_tree(const Dataset& data, const PresortedColumns& presorted, std::span<const std::size_t> rows,
                         std::span<const double> gradient, std::span<const std::size_t> features,
                         const TreeParams& params, const LeafValueFn& leaf_value);

}  // namespace als::gbm
