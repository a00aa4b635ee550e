#include <algorithm>
#include <cmath>
#include <numeric>

#include "../families.hpp"
#include "eegart/decision_tree.hpp"
#include "eegart/error.hpp"
#include "eegart/parallel.hpp"

namespace eegart::detail {

namespace {

// Softmax boosting: F_k = log prior_k + shrinkage * sum_r tree_{r,k}(x).
class GradientBoost final : public FittedClassifier {
 public:
  std::vector<double> init;
  double shrinkage = 0.1;
  std::vector<std::vector<DecisionTree>> rounds;  // rounds x K

  void scores(std::span<const double> x, std::span<double> out) const override {
    std::copy(init.begin(), init.end(), out.begin());
    for (const auto& round : rounds)
      for (std::size_t k = 0; k < round.size(); ++k) out[k] += shrinkage * round[k].predict(x)[0];
    softmax_inplace(out);
  }

  void save(BinaryWriter& w) const override {
    w.f64s(init);
    w.f64(shrinkage);
    w.u64(rounds.size());
    for (const auto& round : rounds)
      for (const auto& t : round) t.save(w);
  }
};

}  // namespace

FitOutput fit_gradient_boost(const FitInput& in, const Hyperparams& hp) {
  check_keys(hp, {"n_rounds", "learning_rate", "max_depth", "subsample"}, "gradient_boost");
  const long n_rounds = int_param(hp, "n_rounds", 100);
  const double lr = real_param(hp, "learning_rate", 0.1);
  const long depth = int_param(hp, "max_depth", 3);
  const double subsample = real_param(hp, "subsample", 1.0);
  if (n_rounds < 1 || !(lr >= 0.0) || depth < 1 || !(subsample > 0.0 && subsample <= 1.0))
    throw UsageError("gradient_boost: invalid settings");

  const std::size_t n = in.x.rows();
  const auto k = static_cast<std::size_t>(in.num_classes);
  auto m = std::make_shared<GradientBoost>();
  m->shrinkage = lr;
  std::vector<double> prior(k, 0.0);
  for (int c : in.y) prior[static_cast<std::size_t>(c)] += 1.0;
  for (auto p : prior) m->init.push_back(std::log(p / static_cast<double>(n)));
  if (lr == 0.0) return {m, true};

  DecisionTree::Params params;
  params.max_depth = static_cast<int>(depth);
  Matrix f(n, k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < k; ++c) f(i, c) = m->init[c];

  Rng rng(in.seed);
  const auto n_sub = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(subsample * static_cast<double>(n))));
  std::vector<std::vector<double>> residual(k, std::vector<double>(n)), den(k, std::vector<double>(n));
  const double newton_scale = (static_cast<double>(k) - 1.0) / static_cast<double>(k);
  for (long r = 0; r < n_rounds; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      auto row = f.row(i);
      std::vector<double> p(row.begin(), row.end());
      softmax_inplace(p);
      for (std::size_t c = 0; c < k; ++c) {
        const double res = (static_cast<std::size_t>(in.y[i]) == c ? 1.0 : 0.0) - p[c];
        residual[c][i] = res;
        den[c][i] = std::abs(res) * (1.0 - std::abs(res));
      }
    }
    std::vector<std::size_t> rows;
    if (n_sub < n) {
      rows = rng.sample_without_replacement(n, n_sub);
      std::sort(rows.begin(), rows.end());
    } else {
      rows.resize(n);
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    std::vector<DecisionTree> round(k);
    // Per-class trees are independent given the round's residuals.
    parallel_for(k, default_workers(), [&](std::size_t c) {
      Rng unused(in.seed);
      round[c] = DecisionTree::fit_regressor(in.x, residual[c], residual[c], den[c], rows, params, unused);
      round[c].scale_leaves(newton_scale);
    });
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < k; ++c) f(i, c) += lr * round[c].predict(in.x.row(i))[0];
    m->rounds.push_back(std::move(round));
  }
  return {m, true};
}

std::shared_ptr<const FittedClassifier> load_gradient_boost(BinaryReader& r) {
  auto m = std::make_shared<GradientBoost>();
  m->init = r.f64s();
  m->shrinkage = r.f64();
  const std::uint64_t rounds = r.u64();
  if (m->init.empty() || rounds > r.remaining()) throw DataError("model: malformed gradient_boost");
  for (std::uint64_t i = 0; i < rounds; ++i) {
    std::vector<DecisionTree> round;
    for (std::size_t c = 0; c < m->init.size(); ++c) round.push_back(DecisionTree::load(r));
    m->rounds.push_back(std::move(round));
  }
  return m;
}

}  // namespace eegart::detail
