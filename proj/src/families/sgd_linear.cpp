#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "../families.hpp"
#include "eegart/error.hpp"
#include "eegart/random.hpp"

namespace eegart::detail {

namespace {

// Multinomial logistic regression on standardized inputs.
class SgdLinear final : public FittedClassifier {
 public:
  Standardizer scaler;
  Matrix weights;  // K x d
  std::vector<double> bias;
  std::vector<double> epoch_loss;

  void scores(std::span<const double> x, std::span<double> out) const override {
    std::vector<double> z(x.size());
    scaler.apply(x, z);
    logits(z, out);
    softmax_inplace(out);
  }

  void logits(std::span<const double> z, std::span<double> out) const {
    for (std::size_t k = 0; k < weights.rows(); ++k) {
      const auto w = weights.row(k);
      double s = bias[k];
      for (std::size_t j = 0; j < z.size(); ++j) s += w[j] * z[j];
      out[k] = s;
    }
  }

  void save(BinaryWriter& w) const override {
    scaler.save(w);
    w.u64(weights.cols());
    w.f64s(weights.data());
    w.f64s(bias);
  }

  std::map<std::string, std::vector<double>> diagnostics() const override { return {{"epoch_loss", epoch_loss}}; }
};

}  // namespace

FitOutput fit_sgd_linear(const FitInput& in, const Hyperparams& hp) {
  check_keys(hp, {"alpha", "eta0", "power_t", "max_epochs", "tol", "n_iter_no_change"}, "sgd_linear");
  const double alpha = real_param(hp, "alpha", 1e-4);
  const double eta0 = real_param(hp, "eta0", 0.01);
  const double power_t = real_param(hp, "power_t", 0.25);
  const long max_epochs = int_param(hp, "max_epochs", 200);
  const double tol = real_param(hp, "tol", 1e-4);
  const long no_change = int_param(hp, "n_iter_no_change", 5);
  if (!(alpha >= 0.0) || !(eta0 > 0.0) || max_epochs < 1 || max_epochs > 200 || no_change < 1)
    throw UsageError("sgd_linear: invalid settings (epochs must be in [1, 200])");

  auto m = std::make_shared<SgdLinear>();
  m->scaler = Standardizer::fit(in.x);
  const Matrix x = m->scaler.apply(in.x);
  const std::size_t n = x.rows(), d = x.cols();
  const auto k = static_cast<std::size_t>(in.num_classes);
  m->weights = Matrix(k, d);
  m->bias.assign(k, 0.0);

  Rng rng(in.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> p(k);
  double best = std::numeric_limits<double>::infinity();
  long stale = 0;
  bool converged = false;
  double t = 1.0;
  for (long epoch = 0; epoch < max_epochs; ++epoch) {
    rng.shuffle(order);
    double loss = 0.0;
    for (std::size_t i : order) {
      const auto xi = x.row(i);
      m->logits(xi, p);
      softmax_inplace(p);
      const auto yi = static_cast<std::size_t>(in.y[i]);
      loss -= std::log(std::max(p[yi], std::numeric_limits<double>::min()));
      const double eta = eta0 / std::pow(t, power_t);
      for (std::size_t c = 0; c < k; ++c) {
        const double g = p[c] - (c == yi ? 1.0 : 0.0);
        auto w = m->weights.row(c);
        for (std::size_t j = 0; j < d; ++j) w[j] -= eta * (g * xi[j] + alpha * w[j]);
        m->bias[c] -= eta * g;
      }
      t += 1.0;
    }
    loss /= static_cast<double>(n);
    m->epoch_loss.push_back(loss);
    if (loss > best - tol) {
      if (++stale >= no_change) {
        converged = true;
        break;
      }
    } else {
      stale = 0;
    }
    best = std::min(best, loss);
  }
  return {m, converged};
}

std::shared_ptr<const FittedClassifier> load_sgd_linear(BinaryReader& r) {
  auto m = std::make_shared<SgdLinear>();
  m->scaler = Standardizer::load(r);
  const std::uint64_t d = r.u64();
  auto w = r.f64s();
  m->bias = r.f64s();
  if (d == 0 || w.size() != m->bias.size() * d || d != m->scaler.mean.size()) throw DataError("model: malformed sgd_linear");
  m->weights = Matrix(m->bias.size(), d);
  m->weights.data() = std::move(w);
  return m;
}

}  // namespace eegart::detail
