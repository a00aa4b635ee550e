#include "eegart/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eegart/error.hpp"

namespace eegart {

namespace {

// Weighted Gini: maximise sum_k wL_k^2 / WL + sum_k wR_k^2 / WR.
struct GiniCriterion {
  std::span<const int> y;
  std::span<const double> w;
  int k;

  struct Stats {
    std::vector<double> class_w;
    double total = 0.0;
    double sumsq = 0.0;
  };
  Stats empty() const { return {std::vector<double>(static_cast<std::size_t>(k), 0.0), 0.0, 0.0}; }
  void add(Stats& s, std::size_t row) const {
    const double wi = w[row];
    double& c = s.class_w[static_cast<std::size_t>(y[row])];
    s.sumsq += wi * (2.0 * c + wi);
    c += wi;
    s.total += wi;
  }
  void remove(Stats& s, std::size_t row) const {
    const double wi = w[row];
    double& c = s.class_w[static_cast<std::size_t>(y[row])];
    s.sumsq += wi * (wi - 2.0 * c);
    c -= wi;
    s.total -= wi;
  }
  double score(const Stats& s) const { return s.total > 0.0 ? s.sumsq / s.total : 0.0; }
  bool pure(const Stats& s) const {
    int nonzero = 0;
    for (double c : s.class_w) nonzero += c > 0.0;
    return nonzero <= 1;
  }
  std::vector<double> leaf(const Stats& s, std::span<const std::size_t>) const {
    std::vector<double> out(s.class_w);
    if (s.total > 0.0)
      for (auto& v : out) v /= s.total;
    return out;
  }
};

// Squared error: maximise SL^2 / nL + SR^2 / nR.
struct VarianceCriterion {
  std::span<const double> target;
  std::span<const double> num;
  std::span<const double> den;

  struct Stats {
    double sum = 0.0;
    double sumsq = 0.0;
    double count = 0.0;
  };
  Stats empty() const { return {}; }
  void add(Stats& s, std::size_t row) const {
    s.sum += target[row];
    s.sumsq += target[row] * target[row];
    s.count += 1.0;
  }
  void remove(Stats& s, std::size_t row) const {
    s.sum -= target[row];
    s.sumsq -= target[row] * target[row];
    s.count -= 1.0;
  }
  double score(const Stats& s) const { return s.count > 0.0 ? s.sum * s.sum / s.count : 0.0; }
  bool pure(const Stats& s) const {
    return s.count <= 1.0 || s.sumsq - s.sum * s.sum / s.count <= 1e-14 * std::max(1.0, s.sumsq);
  }
  std::vector<double> leaf(const Stats&, std::span<const std::size_t> rows) const {
    double n = 0.0, d = 0.0;
    for (std::size_t r : rows) {
      n += num[r];
      d += den[r];
    }
    return {std::abs(d) > 1e-150 ? n / d : 0.0};
  }
};

}  // namespace

template <typename Criterion>
class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const Criterion& crit, const DecisionTree::Params& params, Rng& rng)
      : x_(x), crit_(crit), params_(params), rng_(rng) {}

  DecisionTree build(std::span<const std::size_t> rows) {
    std::vector<std::size_t> work(rows.begin(), rows.end());
    grow(work, 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
  };

  std::int32_t make_leaf(const typename Criterion::Stats& stats, std::span<const std::size_t> rows) {
    auto value = crit_.leaf(stats, rows);
    if (tree_.width_ == 0) tree_.width_ = value.size();
    DecisionTree::Node node;
    node.value = static_cast<std::uint32_t>(tree_.values_.size());
    tree_.values_.insert(tree_.values_.end(), value.begin(), value.end());
    tree_.nodes_.push_back(node);
    return static_cast<std::int32_t>(tree_.nodes_.size() - 1);
  }

  Split best_split(std::vector<std::size_t>& rows, const typename Criterion::Stats& parent) {
    const std::size_t d = x_.cols();
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t budget = d;
    if (params_.max_features > 0 && params_.max_features < d) {
      rng_.shuffle(order);
      budget = params_.max_features;
    }
    const double parent_score = crit_.score(parent);
    const double tol = 1e-12 * std::max(1.0, std::abs(parent_score));
    Split best;
    std::vector<std::size_t> sorted(rows);
    for (std::size_t fi = 0; fi < d; ++fi) {
      // Keep looking past the budget only while no valid split exists.
      if (fi >= budget && best.found) break;
      const std::size_t f = order[fi];
      std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
        const double xa = x_(a, f), xb = x_(b, f);
        return xa < xb || (xa == xb && a < b);
      });
      auto left = crit_.empty();
      auto right = parent;
      const std::size_t n = sorted.size();
      for (std::size_t i = 0; i + 1 < n; ++i) {
        crit_.add(left, sorted[i]);
        crit_.remove(right, sorted[i]);
        const double xi = x_(sorted[i], f);
        const double xn = x_(sorted[i + 1], f);
        if (xi == xn) continue;
        if (i + 1 < params_.min_samples_leaf || n - i - 1 < params_.min_samples_leaf) continue;
        const double gain = crit_.score(left) + crit_.score(right) - parent_score;
        if (gain > tol && (!best.found || gain > best.gain)) {
          double thr = 0.5 * (xi + xn);
          if (!(thr < xn)) thr = xi;
          best = {true, f, thr, gain};
        }
      }
    }
    return best;
  }

  std::int32_t grow(std::vector<std::size_t>& rows, int depth) {
    auto stats = crit_.empty();
    for (std::size_t r : rows) crit_.add(stats, r);
    const bool depth_done = params_.max_depth > 0 && depth >= params_.max_depth;
    if (depth_done || rows.size() < params_.min_samples_split || crit_.pure(stats)) return make_leaf(stats, rows);
    const Split split = best_split(rows, stats);
    if (!split.found) return make_leaf(stats, rows);

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows) (x_(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    const auto id = static_cast<std::int32_t>(tree_.nodes_.size());
    DecisionTree::Node node;
    node.feature = static_cast<std::int32_t>(split.feature);
    node.threshold = split.threshold;
    tree_.nodes_.push_back(node);
    const auto l = grow(left_rows, depth + 1);
    const auto r = grow(right_rows, depth + 1);
    tree_.nodes_[static_cast<std::size_t>(id)].left = l;
    tree_.nodes_[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  const Matrix& x_;
  const Criterion& crit_;
  const DecisionTree::Params& params_;
  Rng& rng_;
  DecisionTree tree_;
};

DecisionTree DecisionTree::fit_classifier(const Matrix& x, std::span<const int> y, int num_classes,
                                          std::span<const double> weights, std::span<const std::size_t> rows,
                                          const Params& params, Rng& rng) {
  if (rows.empty()) throw UsageError("decision tree: no training rows");
  std::vector<double> unit;
  if (weights.empty()) {
    unit.assign(x.rows(), 1.0);
    weights = unit;
  }
  GiniCriterion crit{y, weights, num_classes};
  return TreeBuilder<GiniCriterion>(x, crit, params, rng).build(rows);
}

DecisionTree DecisionTree::fit_regressor(const Matrix& x, std::span<const double> target,
                                         std::span<const double> leaf_num, std::span<const double> leaf_den,
                                         std::span<const std::size_t> rows, const Params& params, Rng& rng) {
  if (rows.empty()) throw UsageError("decision tree: no training rows");
  VarianceCriterion crit{target, leaf_num, leaf_den};
  return TreeBuilder<VarianceCriterion>(x, crit, params, rng).build(rows);
}

std::span<const double> DecisionTree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes_[i].feature >= 0) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return {values_.data() + nodes_[i].value, width_};
}

int DecisionTree::depth() const {
  std::vector<std::pair<std::size_t, int>> stack{{0, 0}};
  int deepest = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (nodes_[i].feature >= 0) {
      stack.push_back({static_cast<std::size_t>(nodes_[i].left), d + 1});
      stack.push_back({static_cast<std::size_t>(nodes_[i].right), d + 1});
    }
  }
  return deepest;
}

void DecisionTree::scale_leaves(double factor) {
  for (auto& v : values_) v *= factor;
}

void DecisionTree::save(BinaryWriter& w) const {
  w.u64(width_);
  w.u64(nodes_.size());
  for (const auto& n : nodes_) {
    w.u32(static_cast<std::uint32_t>(n.feature));
    w.f64(n.threshold);
    w.u32(static_cast<std::uint32_t>(n.left));
    w.u32(static_cast<std::uint32_t>(n.right));
    w.u32(n.value);
  }
  w.f64s(values_);
}

DecisionTree DecisionTree::load(BinaryReader& r) {
  DecisionTree t;
  t.width_ = r.u64();
  const std::uint64_t n = r.u64();
  if (n == 0 || n > r.remaining()) throw DataError("model: malformed tree");
  t.nodes_.resize(n);
  for (auto& node : t.nodes_) {
    node.feature = static_cast<std::int32_t>(r.u32());
    node.threshold = r.f64();
    node.left = static_cast<std::int32_t>(r.u32());
    node.right = static_cast<std::int32_t>(r.u32());
    node.value = r.u32();
  }
  t.values_ = r.f64s();
  for (const auto& node : t.nodes_) {
    if (node.feature >= 0) {
      if (node.left <= 0 || node.right <= 0 || static_cast<std::uint64_t>(node.left) >= n ||
          static_cast<std::uint64_t>(node.right) >= n)
        throw DataError("model: tree child index out of range");
    } else if (node.value + t.width_ > t.values_.size()) {
      throw DataError("model: tree leaf offset out of range");
    }
  }
  return t;
}

}  // namespace eegart
