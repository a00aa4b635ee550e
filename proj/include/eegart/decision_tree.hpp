#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "eegart/binary_io.hpp"
#include "eegart/random.hpp"
#include "eegart/types.hpp"

namespace eegart {

/// Binary CART tree over dense features. Classification trees split on
/// weighted Gini impurity and store class distributions in their leaves;
/// regression trees split on squared error and store one value per leaf.
class DecisionTree {
 public:
  struct Params {
    int max_depth = 0;             // 0 = unlimited
    std::size_t max_features = 0;  // features examined per split; 0 or >= d = all, in index order
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
  };

  // `rows` may contain repeats (bootstrap); weights are indexed by row id.
  static DecisionTree fit_classifier(const Matrix& x, std::span<const int> y, int num_classes,
                                     std::span<const double> weights, std::span<const std::size_t> rows,
                                     const Params& params, Rng& rng);

  // Splits minimise squared error of `target`; each leaf stores
  // sum(leaf_num) / sum(leaf_den) over its rows (0 when the denominator vanishes).
  static DecisionTree fit_regressor(const Matrix& x, std::span<const double> target,
                                    std::span<const double> leaf_num, std::span<const double> leaf_den,
                                    std::span<const std::size_t> rows, const Params& params, Rng& rng);

  std::span<const double> predict(std::span<const double> x) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t leaf_width() const { return width_; }
  int depth() const;

  void scale_leaves(double factor);

  void save(BinaryWriter& w) const;
  static DecisionTree load(BinaryReader& r);

  bool operator==(const DecisionTree&) const = default;

 private:
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t value = 0;  // offset into values_ (leaves)
    bool operator==(const Node&) const = default;
  };

  template <typename Criterion>
  friend class TreeBuilder;

  std::vector<Node> nodes_;
  std::vector<double> values_;
  std::size_t width_ = 0;
};

}  // namespace eegart
