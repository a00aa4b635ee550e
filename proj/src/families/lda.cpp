#include <algorithm>
#include <cmath>

#include "../families.hpp"
#include "eegart/error.hpp"
#include "eegart/jacobi.hpp"

namespace eegart::detail {

namespace {

// Linear discriminants: score_k = w_k . x + b_k, then softmax.
class Lda final : public FittedClassifier {
 public:
  Matrix coef;  // K x d
  std::vector<double> intercept;

  void scores(std::span<const double> x, std::span<double> out) const override {
    for (std::size_t k = 0; k < coef.rows(); ++k) {
      const auto w = coef.row(k);
      double s = intercept[k];
      for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * x[j];
      out[k] = s;
    }
    softmax_inplace(out);
  }

  void save(BinaryWriter& w) const override {
    w.u64(coef.cols());
    w.f64s(coef.data());
    w.f64s(intercept);
  }
};

}  // namespace

FitOutput fit_lda(const FitInput& in, const Hyperparams& hp) {
  check_keys(hp, {"shrinkage"}, "lda");
  const double gamma = real_param(hp, "shrinkage", 0.0);
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw UsageError("lda: shrinkage must be in [0, 1]");
  const std::size_t n = in.x.rows(), d = in.x.cols();
  const auto k = static_cast<std::size_t>(in.num_classes);

  Matrix means(k, d);
  std::vector<double> count(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(in.y[i]);
    count[c] += 1.0;
    for (std::size_t j = 0; j < d; ++j) means(c, j) += in.x(i, j);
  }
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t j = 0; j < d; ++j) means(c, j) /= count[c];

  Matrix cov(d, d);
  std::vector<double> dev(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(in.y[i]);
    for (std::size_t j = 0; j < d; ++j) dev[j] = in.x(i, j) - means(c, j);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a; b < d; ++b) cov(a, b) += dev[a] * dev[b];
  }
  const double dof = n > k ? static_cast<double>(n - k) : static_cast<double>(n);
  double trace = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) cov(b, a) = cov(a, b) = cov(a, b) / dof;
    trace += cov(a, a);
  }
  const double target = trace / static_cast<double>(d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) cov(a, b) *= (1.0 - gamma);
    cov(a, a) += gamma * target;
  }

  const auto eig = jacobi_eigen(cov);
  const double max_ev = *std::max_element(eig.values.begin(), eig.values.end());
  const double min_ev = *std::min_element(eig.values.begin(), eig.values.end());
  if (!(max_ev > 0.0) || min_ev <= 1e-10 * max_ev)
    throw DataError("lda: singular covariance (use shrinkage > 0)");

  // Sigma^-1 = V diag(1/lambda) V^T
  Matrix inv(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      double s = 0.0;
      for (std::size_t e = 0; e < d; ++e) s += eig.vectors(a, e) * eig.vectors(b, e) / eig.values[e];
      inv(a, b) = s;
    }

  auto m = std::make_shared<Lda>();
  m->coef = Matrix(k, d);
  for (std::size_t c = 0; c < k; ++c) {
    double quad = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      double s = 0.0;
      for (std::size_t b = 0; b < d; ++b) s += inv(a, b) * means(c, b);
      m->coef(c, a) = s;
      quad += s * means(c, a);
    }
    m->intercept.push_back(-0.5 * quad + std::log(count[c] / static_cast<double>(n)));
  }
  return {m, true};
}

std::shared_ptr<const FittedClassifier> load_lda(BinaryReader& r) {
  auto m = std::make_shared<Lda>();
  const std::uint64_t d = r.u64();
  auto coef = r.f64s();
  m->intercept = r.f64s();
  if (d == 0 || coef.size() != m->intercept.size() * d) throw DataError("model: malformed lda");
  m->coef = Matrix(m->intercept.size(), d);
  m->coef.data() = std::move(coef);
  return m;
}

}  // namespace eegart::detail
