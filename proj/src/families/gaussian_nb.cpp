#include <cmath>
#include <numbers>

#include "../families.hpp"
#include "eegart/error.hpp"

namespace eegart::detail {

namespace {

class GaussianNb final : public FittedClassifier {
 public:
  std::vector<double> log_prior;  // K
  Matrix mean;                    // K x d
  Matrix var;                     // K x d

  void scores(std::span<const double> x, std::span<double> out) const override {
    for (std::size_t k = 0; k < mean.rows(); ++k) {
      double ll = log_prior[k];
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double d = x[j] - mean(k, j);
        ll -= 0.5 * (std::log(2.0 * std::numbers::pi * var(k, j)) + d * d / var(k, j));
      }
      out[k] = ll;
    }
    softmax_inplace(out);
  }

  void save(BinaryWriter& w) const override {
    w.f64s(log_prior);
    w.u64(mean.cols());
    w.f64s(mean.data());
    w.f64s(var.data());
  }

  // Row-major K x d, classes in ascending code order.
  std::map<std::string, std::vector<double>> diagnostics() const override {
    return {{"class_means", mean.data()}, {"class_variances", var.data()}};
  }
};

}  // namespace

FitOutput fit_gaussian_nb(const FitInput& in, const Hyperparams& hp) {
  check_keys(hp, {"var_smoothing"}, "gaussian_nb");
  const double smoothing = real_param(hp, "var_smoothing", 1e-9);
  if (!(smoothing >= 0.0)) throw UsageError("gaussian_nb: var_smoothing must be >= 0");
  const std::size_t n = in.x.rows(), d = in.x.cols();
  const auto k = static_cast<std::size_t>(in.num_classes);

  auto m = std::make_shared<GaussianNb>();
  m->mean = Matrix(k, d);
  m->var = Matrix(k, d);
  std::vector<double> count(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(in.y[i]);
    count[c] += 1.0;
    for (std::size_t j = 0; j < d; ++j) m->mean(c, j) += in.x(i, j);
  }
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t j = 0; j < d; ++j) m->mean(c, j) /= count[c];
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(in.y[i]);
    for (std::size_t j = 0; j < d; ++j) {
      const double dev = in.x(i, j) - m->mean(c, j);
      m->var(c, j) += dev * dev;
    }
  }
  // Smoothing is relative to the largest per-feature variance of the whole set.
  double max_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mu = 0.0, v = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += in.x(i, j);
    mu /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) v += (in.x(i, j) - mu) * (in.x(i, j) - mu);
    max_var = std::max(max_var, v / static_cast<double>(n));
  }
  double epsilon = smoothing * max_var;
  if (!(epsilon > 0.0)) epsilon = std::max(smoothing, 1e-300);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t j = 0; j < d; ++j) m->var(c, j) = m->var(c, j) / count[c] + epsilon;
  for (std::size_t c = 0; c < k; ++c) m->log_prior.push_back(std::log(count[c] / static_cast<double>(n)));
  return {m, true};
}

std::shared_ptr<const FittedClassifier> load_gaussian_nb(BinaryReader& r) {
  auto m = std::make_shared<GaussianNb>();
  m->log_prior = r.f64s();
  const std::uint64_t d = r.u64();
  auto mean = r.f64s();
  auto var = r.f64s();
  const std::size_t k = m->log_prior.size();
  if (mean.size() != k * d || var.size() != k * d) throw DataError("model: malformed gaussian_nb");
  m->mean = Matrix(k, d);
  m->var = Matrix(k, d);
  m->mean.data() = std::move(mean);
  m->var.data() = std::move(var);
  return m;
}

}  // namespace eegart::detail
