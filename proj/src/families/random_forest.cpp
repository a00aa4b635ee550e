#include <cmath>
#include <numeric>

#include "../families.hpp"
#include "eegart/decision_tree.hpp"
#include "eegart/error.hpp"
#include "eegart/parallel.hpp"

namespace eegart::detail {

namespace {

class RandomForest final : public FittedClassifier {
 public:
  std::vector<DecisionTree> trees;

  void scores(std::span<const double> x, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& t : trees) {
      const auto p = t.predict(x);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += p[k];
    }
    for (auto& v : out) v /= static_cast<double>(trees.size());
  }

  void save(BinaryWriter& w) const override {
    w.u64(trees.size());
    for (const auto& t : trees) t.save(w);
  }
};

std::size_t features_per_split(const std::string& rule, std::size_t d) {
  if (rule == "sqrt") return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
  if (rule == "half") return std::max<std::size_t>(1, d / 2);
  if (rule == "all") return d;
  throw UsageError("random_forest: max_features must be sqrt, half or all (got '" + rule + "')");
}

}  // namespace

FitOutput fit_random_forest(const FitInput& in, const Hyperparams& hp) {
  check_keys(hp, {"n_trees", "max_depth", "max_features", "bootstrap", "min_samples_leaf"}, "random_forest");
  const long n_trees = int_param(hp, "n_trees", 100);
  const long max_depth = int_param(hp, "max_depth", 0);
  const std::string max_features = choice_param(hp, "max_features", "sqrt");
  const std::string bootstrap = choice_param(hp, "bootstrap", "true");
  const long min_leaf = int_param(hp, "min_samples_leaf", 1);
  if (n_trees < 1 || max_depth < 0 || min_leaf < 1) throw UsageError("random_forest: invalid settings");
  if (bootstrap != "true" && bootstrap != "false" && bootstrap != "1" && bootstrap != "0")
    throw UsageError("random_forest: bootstrap must be true or false");
  const bool use_bootstrap = bootstrap == "true" || bootstrap == "1";

  const std::size_t n = in.x.rows();
  DecisionTree::Params params;
  params.max_depth = static_cast<int>(max_depth);
  params.max_features = features_per_split(max_features, in.x.cols());
  params.min_samples_leaf = static_cast<std::size_t>(min_leaf);

  auto m = std::make_shared<RandomForest>();
  m->trees.resize(static_cast<std::size_t>(n_trees));
  // Each tree owns a generator seeded from seed xor tree index.
  parallel_for(m->trees.size(), default_workers(), [&](std::size_t t) {
    Rng rng(in.seed ^ static_cast<std::uint64_t>(t));
    std::vector<std::size_t> rows(n);
    if (use_bootstrap) {
      for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n));
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    m->trees[t] = DecisionTree::fit_classifier(in.x, in.y, in.num_classes, {}, rows, params, rng);
  });
  return {m, true};
}

std::shared_ptr<const FittedClassifier> load_random_forest(BinaryReader& r) {
  auto m = std::make_shared<RandomForest>();
  const std::uint64_t n = r.u64();
  if (n == 0 || n > r.remaining()) throw DataError("model: malformed random_forest");
  for (std::uint64_t i = 0; i < n; ++i) m->trees.push_back(DecisionTree::load(r));
  return m;
}

}  // namespace eegart::detail
