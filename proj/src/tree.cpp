#include "als/gbm/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "als/error.hpp"

namespace als::gbm {

std::uint64_t Schema::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](unsigned char c) {
    h ^= c;
    h *= 1099511628211ULL;
  };
  for (const auto& c : columns) {
    for (unsigned char ch : c.name) mix(ch);
    mix(':');
    mix(c.kind == FeatureKind::Categorical ? 'c' : 'n');
    mix(';');
  }
  return h;
}

void Dataset::add_row(std::span<const double> values, double label) {
  if (values.size() != cols()) {
    throw Error(ErrorCode::SchemaMismatch, "row has " + std::to_string(values.size()) + " values, schema has " +
                                               std::to_string(cols()));
  }
  x.insert(x.end(), values.begin(), values.end());
  y.push_back(label);
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.schema = schema;
  out.x.reserve(rows.size() * cols());
  out.y.reserve(rows.size());
  for (auto r : rows) out.add_row(row(r), y[r]);
  return out;
}

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw Error(ErrorCode::InvalidArgument, "tree without nodes");
}

RegressionTree RegressionTree::constant(double value) {
  TreeNode leaf;
  leaf.value = value;
  return RegressionTree({leaf});
}

double RegressionTree::predict(std::span<const double> row) const {
  std::size_t i = 0;
  while (true) {
    const TreeNode& n = nodes_[i];
    if (n.is_leaf()) return n.value;
    const double v = row[static_cast<std::size_t>(n.feature)];
    bool left;
    if (std::isnan(v)) {
      left = n.missing_left;
    } else if (!n.left_categories.empty()) {
      left = std::binary_search(n.left_categories.begin(), n.left_categories.end(), static_cast<int>(v));
    } else {
      left = v <= n.threshold;
    }
    i = static_cast<std::size_t>(left ? n.left : n.right);
  }
}

int RegressionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  // Preorder: every child index is larger than its parent's.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    best = std::max(best, d[i]);
    if (!n.is_leaf()) {
      d[static_cast<std::size_t>(n.left)] = d[i] + 1;
      d[static_cast<std::size_t>(n.right)] = d[i] + 1;
    }
  }
  return best;
}

PresortedColumns::PresortedColumns(const Dataset& data) : order_(data.cols()) {
  const std::size_t n = data.rows();
  for (std::size_t c = 0; c < data.cols(); ++c) {
    auto& ord = order_[c];
    ord.resize(n);
    for (std::size_t i = 0; i < n; ++i) ord[i] = i;
    std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) {
      const double va = data.at(a, c);
      const double vb = data.at(b, c);
      if (std::isnan(va)) return false;
      if (std::isnan(vb)) return true;
      return va < vb;
    });
  }
}

namespace {

struct Split {
  double gain = 0.0;
  std::size_t feature = 0;
  double threshold = 0.0;
  std::vector<int> left_categories;
  bool missing_left = false;
  bool valid = false;
};

constexpr double kMinGain = 1e-12;

class Grower {
public:
  Grower(const Dataset& data, const PresortedColumns& presorted, std::span<const std::size_t> rows,
         std::span<const double> gradient, std::span<const std::size_t> features, const TreeParams& params,
         const LeafValueFn& leaf_value)
      : data_(data), gradient_(gradient), features_(features), params_(params), leaf_value_(leaf_value) {
    std::vector<char> in_sample(data.rows(), 0);
    for (auto r : rows) in_sample[r] = 1;
    rows_.assign(rows.begin(), rows.end());
    sorted_.resize(features.size());
    for (std::size_t k = 0; k < features.size(); ++k) {
      const auto f = features[k];
      if (data.schema.columns[f].kind != FeatureKind::Numeric) continue;
      auto& s = sorted_[k];
      s.reserve(rows.size());
      for (auto r : presorted.order(f)) {
        if (in_sample[r]) s.push_back(r);
      }
    }
    goes_left_.assign(data.rows(), 0);
    buffer_.resize(rows.size());
  }

  std::vector<TreeNode> run() {
    build(0, rows_.size(), 0);
    return std::move(nodes_);
  }

private:
  double x(std::size_t r, std::size_t f) const { return data_.at(r, f); }

  int build(std::size_t b, std::size_t e, int depth) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    const std::size_t n = e - b;
    Split best;
    if (depth < params_.max_depth && n >= 2 * params_.min_leaf && n >= 2) best = find_split(b, e);
    if (!best.valid) {
      nodes_[static_cast<std::size_t>(index)].value =
          leaf_value_(std::span<const std::size_t>(rows_.data() + b, n));
      return index;
    }
    const std::size_t n_left = apply(best, b, e);
    {
      auto& node = nodes_[static_cast<std::size_t>(index)];
      node.feature = static_cast<int>(best.feature);
      node.threshold = best.threshold;
      node.left_categories = best.left_categories;
      node.missing_left = best.missing_left;
      node.gain = best.gain;
    }
    const int left = build(b, b + n_left, depth + 1);
    const int right = build(b + n_left, e, depth + 1);
    nodes_[static_cast<std::size_t>(index)].left = left;
    nodes_[static_cast<std::size_t>(index)].right = right;
    return index;
  }

  // Evaluates one candidate partition; missing rows join the larger side.
  void consider(Split& best, std::size_t feature, double sum_l, std::size_t n_l, double sum_r, std::size_t n_r,
                double sum_m, std::size_t n_m, double parent_term, double threshold,
                const std::vector<int>* categories) const {
    const bool missing_left = n_l >= n_r;
    if (missing_left) {
      sum_l += sum_m;
      n_l += n_m;
    } else {
      sum_r += sum_m;
      n_r += n_m;
    }
    if (n_l < params_.min_leaf || n_r < params_.min_leaf || n_l == 0 || n_r == 0) return;
    const double gain = sum_l * sum_l / static_cast<double>(n_l) + sum_r * sum_r / static_cast<double>(n_r) - parent_term;
    if (gain > kMinGain && gain > best.gain) {
      best.gain = gain;
      best.feature = feature;
      best.threshold = threshold;
      best.missing_left = missing_left;
      best.valid = true;
      if (categories) {
        best.left_categories = *categories;
        std::sort(best.left_categories.begin(), best.left_categories.end());
      } else {
        best.left_categories.clear();
      }
    }
  }

  Split find_split(std::size_t b, std::size_t e) const {
    double total = 0.0;
    for (std::size_t i = b; i < e; ++i) total += gradient_[rows_[i]];
    const double parent_term = total * total / static_cast<double>(e - b);
    Split best;
    for (std::size_t k = 0; k < features_.size(); ++k) {
      const auto f = features_[k];
      if (data_.schema.columns[f].kind == FeatureKind::Numeric) {
        numeric_split(best, k, f, b, e, total, parent_term);
      } else {
        categorical_split(best, f, b, e, total, parent_term);
      }
    }
    return best;
  }

  void numeric_split(Split& best, std::size_t k, std::size_t f, std::size_t b, std::size_t e, double total,
                     double parent_term) const {
    const auto& s = sorted_[k];
    std::size_t nm = 0;
    double sum_present = 0.0;
    for (std::size_t i = b; i < e && !std::isnan(x(s[i], f)); ++i) {
      ++nm;
      sum_present += gradient_[s[i]];
    }
    if (nm < 2) return;
    const double sum_m = total - sum_present;
    const std::size_t n_m = (e - b) - nm;
    double sum_l = 0.0;
    for (std::size_t i = 0; i + 1 < nm; ++i) {
      const std::size_t r = s[b + i];
      sum_l += gradient_[r];
      const double v = x(r, f);
      const double next = x(s[b + i + 1], f);
      if (!(v < next)) continue;
      double thr = v + (next - v) / 2.0;
      if (!(thr < next)) thr = v;
      consider(best, f, sum_l, i + 1, sum_present - sum_l, nm - i - 1, sum_m, n_m, parent_term, thr, nullptr);
    }
  }

  void categorical_split(Split& best, std::size_t f, std::size_t b, std::size_t e, double total,
                         double parent_term) const {
    std::map<int, std::pair<double, std::size_t>> per_cat;
    double sum_present = 0.0;
    std::size_t nm = 0;
    for (std::size_t i = b; i < e; ++i) {
      const double v = x(rows_[i], f);
      if (std::isnan(v)) continue;
      auto& acc = per_cat[static_cast<int>(v)];
      acc.first += gradient_[rows_[i]];
      acc.second += 1;
      sum_present += gradient_[rows_[i]];
      ++nm;
    }
    if (per_cat.size() < 2) return;
    struct Cat {
      double mean;
      int id;
      double sum;
      std::size_t count;
    };
    std::vector<Cat> cats;
    cats.reserve(per_cat.size());
    for (const auto& [id, acc] : per_cat) cats.push_back({acc.first / static_cast<double>(acc.second), id, acc.first, acc.second});
    std::sort(cats.begin(), cats.end(), [](const Cat& a, const Cat& c) {
      if (a.mean != c.mean) return a.mean < c.mean;
      return a.id < c.id;
    });
    const double sum_m = total - sum_present;
    const std::size_t n_m = (e - b) - nm;
    double sum_l = 0.0;
    std::size_t n_l = 0;
    std::vector<int> left;
    for (std::size_t i = 0; i + 1 < cats.size(); ++i) {
      sum_l += cats[i].sum;
      n_l += cats[i].count;
      left.push_back(cats[i].id);
      consider(best, f, sum_l, n_l, sum_present - sum_l, nm - n_l, sum_m, n_m, parent_term, 0.0, &left);
    }
  }

  std::size_t apply(const Split& split, std::size_t b, std::size_t e) {
    const auto f = split.feature;
    for (std::size_t i = b; i < e; ++i) {
      const std::size_t r = rows_[i];
      const double v = x(r, f);
      bool left;
      if (std::isnan(v)) {
        left = split.missing_left;
      } else if (data_.schema.columns[f].kind == FeatureKind::Categorical) {
        left = std::binary_search(split.left_categories.begin(), split.left_categories.end(), static_cast<int>(v));
      } else {
        left = v <= split.threshold;
      }
      goes_left_[r] = left ? 1 : 0;
    }
    const std::size_t n_left = partition(rows_, b, e);
    for (std::size_t k = 0; k < sorted_.size(); ++k) {
      if (!sorted_[k].empty()) partition(sorted_[k], b, e);
    }
    return n_left;
  }

  // Stable partition of v[b, e) by goes_left_.
  std::size_t partition(std::vector<std::size_t>& v, std::size_t b, std::size_t e) {
    std::size_t out = 0;
    for (std::size_t i = b; i < e; ++i) {
      if (goes_left_[v[i]]) buffer_[out++] = v[i];
    }
    const std::size_t n_left = out;
    for (std::size_t i = b; i < e; ++i) {
      if (!goes_left_[v[i]]) buffer_[out++] = v[i];
    }
    std::copy(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(e - b), v.begin() + static_cast<std::ptrdiff_t>(b));
    return n_left;
  }

  const Dataset& data_;
  std::span<const double> gradient_;
  std::span<const std::size_t> features_;
  TreeParams params_;
  const LeafValueFn& leaf_value_;
  std::vector<std::size_t> rows_;
  std::vector<std::vector<std::size_t>> sorted_;
  std::vector<char> goes_left_;
  std::vector<std::size_t> buffer_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

RegressionTree grow_tree(const Dataset& data, const PresortedColumns& presorted, std::span<const std::size_t> rows,
                         std::span<const double> gradient, std::span<const std::size_t> features,
                         const TreeParams& params, const LeafValueFn& leaf_value) {
  if (rows.empty()) throw Error(ErrorCode::EmptyData, "cannot grow a tree on zero rows");
  Grower g(data, presorted, rows, gradient, features, params, leaf_value);
  return RegressionTree(g.run());
}

}  // namespace als::gbm
