#include "eegart/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "../families.hpp"
#include "eegart/error.hpp"

namespace eegart {

MlpNetwork::MlpNetwork(std::size_t inputs, std::vector<std::size_t> hidden, std::size_t outputs) {
  sizes_.push_back(inputs);
  sizes_.insert(sizes_.end(), hidden.begin(), hidden.end());
  sizes_.push_back(outputs);
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
  }
  params_.assign(total, 0.0);
}

void MlpNetwork::init(Rng& rng) {
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const double fan_in = static_cast<double>(sizes_[l]);
    const double fan_out = static_cast<double>(sizes_[l + 1]);
    const double bound = l + 1 < layers ? std::sqrt(6.0 / fan_in) : std::sqrt(6.0 / (fan_in + fan_out));
    const std::size_t w0 = weight_offset(l);
    for (std::size_t i = 0; i < sizes_[l] * sizes_[l + 1]; ++i) params_[w0 + i] = rng.uniform(-bound, bound);
    std::fill_n(params_.begin() + static_cast<std::ptrdiff_t>(bias_offset(l)), sizes_[l + 1], 0.0);
  }
}

void MlpNetwork::forward(std::span<const double> x, std::span<double> probs) const {
  std::vector<double> cur(x.begin(), x.end()), next;
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = sizes_[l], out = sizes_[l + 1];
    next.assign(out, 0.0);
    const double* w = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    for (std::size_t o = 0; o < out; ++o) {
      double s = b[o];
      for (std::size_t i = 0; i < in; ++i) s += w[o * in + i] * cur[i];
      next[o] = (l + 1 < layers) ? std::max(0.0, s) : s;
    }
    cur.swap(next);
  }
  std::copy(cur.begin(), cur.end(), probs.begin());
  detail::softmax_inplace(probs);
}

double MlpNetwork::loss(const Matrix& x, std::span<const int> y, std::span<const std::size_t> rows, double l2,
                        std::vector<double>* grad) const {
  const std::size_t layers = sizes_.size() - 1;
  if (grad) grad->assign(params_.size(), 0.0);
  std::vector<std::vector<double>> act(layers + 1);
  std::vector<double> delta, prev_delta;
  double total = 0.0;
  for (std::size_t r : rows) {
    act[0].assign(x.row(r).begin(), x.row(r).end());
    for (std::size_t l = 0; l < layers; ++l) {
      const std::size_t in = sizes_[l], out = sizes_[l + 1];
      act[l + 1].assign(out, 0.0);
      const double* w = params_.data() + weight_offset(l);
      const double* b = params_.data() + bias_offset(l);
      for (std::size_t o = 0; o < out; ++o) {
        double s = b[o];
        for (std::size_t i = 0; i < in; ++i) s += w[o * in + i] * act[l][i];
        act[l + 1][o] = (l + 1 < layers) ? std::max(0.0, s) : s;
      }
    }
    auto& logits = act[layers];
    detail::softmax_inplace(logits);
    const auto label = static_cast<std::size_t>(y[r]);
    total -= std::log(std::max(logits[label], std::numeric_limits<double>::min()));
    if (!grad) continue;

    delta = logits;
    delta[label] -= 1.0;
    for (std::size_t l = layers; l-- > 0;) {
      const std::size_t in = sizes_[l], out = sizes_[l + 1];
      double* gw = grad->data() + weight_offset(l);
      double* gb = grad->data() + bias_offset(l);
      const double* w = params_.data() + weight_offset(l);
      for (std::size_t o = 0; o < out; ++o) {
        gb[o] += delta[o];
        for (std::size_t i = 0; i < in; ++i) gw[o * in + i] += delta[o] * act[l][i];
      }
      if (l == 0) break;
      prev_delta.assign(in, 0.0);
      for (std::size_t o = 0; o < out; ++o)
        for (std::size_t i = 0; i < in; ++i) prev_delta[i] += w[o * in + i] * delta[o];
      // ReLU derivative, taken as 0 at exactly 0.
      for (std::size_t i = 0; i < in; ++i)
        if (act[l][i] <= 0.0) prev_delta[i] = 0.0;
      delta.swap(prev_delta);
    }
  }
  const double n = static_cast<double>(rows.size());
  double penalty = 0.0;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t w0 = weight_offset(l), count = sizes_[l] * sizes_[l + 1];
    for (std::size_t i = 0; i < count; ++i) penalty += params_[w0 + i] * params_[w0 + i];
  }
  if (grad) {
    for (auto& g : *grad) g /= n;
    for (std::size_t l = 0; l < layers; ++l) {
      const std::size_t w0 = weight_offset(l), count = sizes_[l] * sizes_[l + 1];
      for (std::size_t i = 0; i < count; ++i) (*grad)[w0 + i] += l2 * params_[w0 + i];
    }
  }
  return total / n + 0.5 * l2 * penalty;
}

namespace detail {

namespace {

class Mlp final : public FittedClassifier {
 public:
  Standardizer scaler;
  MlpNetwork net;
  std::vector<double> val_curve;

  void scores(std::span<const double> x, std::span<double> out) const override {
    std::vector<double> z(x.size());
    scaler.apply(x, z);
    net.forward(z, out);
  }

  void save(BinaryWriter& w) const override {
    scaler.save(w);
    const auto& sizes = net.layer_sizes();
    w.u32(static_cast<std::uint32_t>(sizes.size()));
    for (auto s : sizes) w.u64(s);
    w.f64s(net.params());
  }

  std::map<std::string, std::vector<double>> diagnostics() const override { return {{"val_loss", val_curve}}; }
};

}  // namespace

FitOutput fit_mlp(const FitInput& in, const Hyperparams& hp) {
  check_keys(hp, {"hidden_layers", "width", "learning_rate", "alpha", "batch_size", "max_epochs", "patience"}, "mlp");
  const long layers = int_param(hp, "hidden_layers", 1);
  const long width = int_param(hp, "width", 64);
  const double lr = real_param(hp, "learning_rate", 0.01);
  const double alpha = real_param(hp, "alpha", 1e-4);
  const long batch = int_param(hp, "batch_size", 32);
  const long max_epochs = int_param(hp, "max_epochs", 200);
  const long patience = int_param(hp, "patience", 10);
  if (layers < 1 || layers > 2) throw UsageError("mlp: hidden_layers must be 1 or 2");
  if (width < 1) throw UsageError("mlp: width must be positive");
  if (!(lr > 0.0) || !(alpha >= 0.0) || batch < 1 || max_epochs < 1 || patience < 1)
    throw UsageError("mlp: invalid optimiser settings");

  auto m = std::make_shared<Mlp>();
  m->scaler = Standardizer::fit(in.x);
  const Matrix x = m->scaler.apply(in.x);
  Rng rng(in.seed);
  m->net = MlpNetwork(x.cols(), std::vector<std::size_t>(static_cast<std::size_t>(layers), static_cast<std::size_t>(width)),
                      static_cast<std::size_t>(in.num_classes));
  m->net.init(rng);

  // Hold out 10% for early stopping when the set is large enough.
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  std::vector<std::size_t> val, train;
  const std::size_t n_val = x.rows() >= 20 ? x.rows() / 10 : 0;
  val.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  const auto& monitor = val.empty() ? train : val;

  auto& params = m->net.params();
  std::vector<double> velocity(params.size(), 0.0), grad, best = params;
  double best_loss = m->net.loss(x, in.y, monitor, 0.0);
  long stale = 0;
  bool stopped_early = false;
  for (long epoch = 0; epoch < max_epochs; ++epoch) {
    rng.shuffle(train);
    for (std::size_t start = 0; start < train.size(); start += static_cast<std::size_t>(batch)) {
      const std::size_t end = std::min(train.size(), start + static_cast<std::size_t>(batch));
      m->net.loss(x, in.y, std::span<const std::size_t>(train).subspan(start, end - start), alpha, &grad);
      for (std::size_t i = 0; i < params.size(); ++i) {
        velocity[i] = 0.9 * velocity[i] - lr * grad[i];
        params[i] += velocity[i];
      }
    }
    const double l = m->net.loss(x, in.y, monitor, 0.0);
    m->val_curve.push_back(l);
    if (!std::isfinite(l)) break;
    if (l < best_loss - 1e-6) {
      best_loss = l;
      best = params;
      stale = 0;
    } else if (++stale >= patience) {
      stopped_early = true;
      break;
    }
  }
  params = best;
  return {m, stopped_early};
}

std::shared_ptr<const FittedClassifier> load_mlp(BinaryReader& r) {
  auto m = std::make_shared<Mlp>();
  m->scaler = Standardizer::load(r);
  const std::uint32_t n = r.u32();
  if (n < 2 || n > 16) throw DataError("model: malformed mlp");
  std::vector<std::size_t> sizes(n);
  for (auto& s : sizes) s = r.u64();
  m->net = MlpNetwork(sizes.front(), std::vector<std::size_t>(sizes.begin() + 1, sizes.end() - 1), sizes.back());
  auto params = r.f64s();
  if (params.size() != m->net.params().size() || sizes.front() != m->scaler.mean.size())
    throw DataError("model: malformed mlp");
  m->net.params() = std::move(params);
  return m;
}

}  // namespace detail

}  // namespace eegart
