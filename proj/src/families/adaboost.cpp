#include <algorithm>
#include <cmath>
#include <numeric>

#include "../families.hpp"
#include "eegart/decision_tree.hpp"
#include "eegart/error.hpp"

namespace eegart::detail {

namespace {

// Multi-class SAMME: score_k = sum of stage weights whose tree votes k,
// normalised by the total stage weight.
class AdaBoost final : public FittedClassifier {
 public:
  std::vector<DecisionTree> stages;
  std::vector<double> alphas;
  std::vector<double> errors;
  std::vector<double> prior;  // used when no stage was accepted

  void scores(std::span<const double> x, std::span<double> out) const override {
    if (stages.empty()) {
      std::copy(prior.begin(), prior.end(), out.begin());
      return;
    }
    std::fill(out.begin(), out.end(), 0.0);
    double total = 0.0;
    for (std::size_t s = 0; s < stages.size(); ++s) {
      out[vote(stages[s].predict(x))] += alphas[s];
      total += alphas[s];
    }
    for (auto& v : out) v /= total;
  }

  static std::size_t vote(std::span<const double> dist) {
    return static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
  }

  void save(BinaryWriter& w) const override {
    w.f64s(prior);
    w.f64s(alphas);
    w.f64s(errors);
    for (const auto& t : stages) t.save(w);
  }

  std::map<std::string, std::vector<double>> diagnostics() const override {
    return {{"stage_errors", errors}, {"stage_weights", alphas}};
  }
};

}  // namespace

FitOutput fit_adaboost(const FitInput& in, const Hyperparams& hp) {
  check_keys(hp, {"n_stages", "learning_rate", "max_depth"}, "adaboost");
  const long n_stages = int_param(hp, "n_stages", 50);
  const double lr = real_param(hp, "learning_rate", 1.0);
  const long depth = int_param(hp, "max_depth", 1);
  if (n_stages < 1 || !(lr > 0.0) || depth < 1 || depth > 3) throw UsageError("adaboost: invalid settings (depth 1..3)");

  const std::size_t n = in.x.rows();
  const auto k = static_cast<double>(in.num_classes);
  auto m = std::make_shared<AdaBoost>();
  m->prior.assign(static_cast<std::size_t>(in.num_classes), 0.0);
  for (int c : in.y) m->prior[static_cast<std::size_t>(c)] += 1.0 / static_cast<double>(n);

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  DecisionTree::Params params;
  params.max_depth = static_cast<int>(depth);
  Rng rng(in.seed);  // unused by full-feature trees, kept for the builder interface
  std::vector<char> miss(n);
  bool converged = false;
  for (long s = 0; s < n_stages; ++s) {
    auto tree = DecisionTree::fit_classifier(in.x, in.y, in.num_classes, w, rows, params, rng);
    double err = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      miss[i] = AdaBoost::vote(tree.predict(in.x.row(i))) != static_cast<std::size_t>(in.y[i]);
      err += miss[i] ? w[i] : 0.0;
      total += w[i];
    }
    err /= total;
    if (err >= 1.0 - 1.0 / k) {
      // No better than chance: the stage is rejected and boosting ends, since
      // unchanged weights would reproduce the same learner.
      converged = true;
      break;
    }
    if (err <= 0.0) {
      m->stages.push_back(std::move(tree));
      m->alphas.push_back(1.0);
      m->errors.push_back(0.0);
      converged = true;
      break;
    }
    const double alpha = lr * (std::log((1.0 - err) / err) + std::log(k - 1.0));
    m->stages.push_back(std::move(tree));
    m->alphas.push_back(alpha);
    m->errors.push_back(err);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (miss[i]) w[i] *= std::exp(alpha);
      sum += w[i];
    }
    for (auto& v : w) v /= sum;
  }
  return {m, converged || !m->stages.empty()};
}

std::shared_ptr<const FittedClassifier> load_adaboost(BinaryReader& r) {
  auto m = std::make_shared<AdaBoost>();
  m->prior = r.f64s();
  m->alphas = r.f64s();
  m->errors = r.f64s();
  if (m->errors.size() != m->alphas.size()) throw DataError("model: malformed adaboost");
  for (std::size_t i = 0; i < m->alphas.size(); ++i) m->stages.push_back(DecisionTree::load(r));
  return m;
}

}  // namespace eegart::detail
