#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "eegart/random.hpp"
#include "eegart/types.hpp"

namespace eegart {

/// Fully connected ReLU network with a softmax output layer. Parameters live
/// in one flat vector, layer by layer: weights (out x in, row-major) then biases.
class MlpNetwork {
 public:
  MlpNetwork() = default;
  MlpNetwork(std::size_t inputs, std::vector<std::size_t> hidden, std::size_t outputs);

  // He-uniform weights for hidden layers, Glorot-uniform for the output; zero biases.
  void init(Rng& rng);

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t inputs() const { return sizes_.front(); }
  std::size_t outputs() const { return sizes_.back(); }
  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }

  void forward(std::span<const double> x, std::span<double> probs) const;

  /// Mean cross-entropy over `rows` plus 0.5 * l2 * ||weights||^2 (biases are
  /// not penalised). When `grad` is non-null it receives the exact gradient.
  double loss(const Matrix& x, std::span<const int> y, std::span<const std::size_t> rows, double l2,
              std::vector<double>* grad = nullptr) const;

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + sizes_[layer] * sizes_[layer + 1];
  }

  std::vector<std::size_t> sizes_;    // inputs, hidden..., outputs
  std::vector<std::size_t> offsets_;  // start of each layer's parameters
  std::vector<double> params_;
};

}  // namespace eegart
