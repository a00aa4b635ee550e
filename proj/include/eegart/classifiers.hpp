#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "eegart/features.hpp"
#include "eegart/types.hpp"

namespace eegart {

struct LabeledFeatureSet;
class BinaryWriter;

enum class Family { adaboost, gaussian_nb, knn, lda, mlp, random_forest, sgd_linear, gradient_boost };

inline constexpr std::array<Family, 8> kAllFamilies = {
    Family::adaboost, Family::gaussian_nb,   Family::knn,        Family::lda,
    Family::mlp,      Family::random_forest, Family::sgd_linear, Family::gradient_boost};

std::string_view family_name(Family f);     // config/CLI identifier, e.g. "random_forest"
std::string_view family_display(Family f);  // report label, e.g. "Random Forests"
std::optional<Family> parse_family(std::string_view name);

// Integer-valued parameters are stored as doubles; categorical ones as strings.
using ParamValue = std::variant<double, std::string>;
using Hyperparams = std::map<std::string, ParamValue>;

std::string param_to_string(const ParamValue& v);

struct AlgorithmSpec {
  Family family = Family::gaussian_nb;
  Hyperparams hyperparams;  // missing entries take the family default
};

/// One score per ArtifactClass code. All families emit non-negative scores
/// summing to 1 (posteriors, softmax outputs or vote fractions); classes absent
/// from training score 0.
using ClassScores = std::array<double, kNumClasses>;

// Argmax with ties to the smallest class code.
ArtifactClass argmax_class(const ClassScores& s);

/// Family-specific fitted parameters over the K classes seen in training.
class FittedClassifier {
 public:
  virtual ~FittedClassifier() = default;
  virtual void scores(std::span<const double> x, std::span<double> out) const = 0;
  virtual void save(BinaryWriter& w) const = 0;
  virtual std::map<std::string, std::vector<double>> diagnostics() const { return {}; }
};

/// Immutable trained model; safe to share across threads for prediction.
class Model {
 public:
  Model(Family family, std::size_t dim, std::vector<ArtifactClass> classes, std::uint64_t seed, bool converged,
        std::shared_ptr<const FittedClassifier> impl);

  Family family() const { return family_; }
  std::size_t dim() const { return dim_; }
  const std::vector<ArtifactClass>& classes() const { return classes_; }
  std::uint64_t seed() const { return seed_; }
  // False when an iteration cap stopped training before its convergence test.
  bool converged() const { return converged_; }

  /// Throws UsageError on dimension mismatch.
  ClassScores predict_scores(std::span<const double> x) const;
  ArtifactClass predict(std::span<const double> x) const { return argmax_class(predict_scores(x)); }

  std::map<std::string, std::vector<double>> diagnostics() const { return impl_->diagnostics(); }

  const FittedClassifier& impl() const { return *impl_; }

 private:
  Family family_;
  std::size_t dim_;
  std::vector<ArtifactClass> classes_;
  std::uint64_t seed_;
  bool converged_;
  std::shared_ptr<const FittedClassifier> impl_;
};

/// Deterministic in (spec, data, seed). A single training class yields a model
/// that always predicts it. Throws DataError for LDA with a singular
/// covariance and for k-NN with k larger than the training set, UsageError for
/// malformed hyperparameters.
Model fit(const AlgorithmSpec& spec, const Matrix& x, std::span<const ArtifactClass> y, std::uint64_t seed);
Model fit(const AlgorithmSpec& spec, const LabeledFeatureSet& train, std::uint64_t seed);

inline ClassScores predict_scores(const Model& m, std::span<const double> x) { return m.predict_scores(x); }

/// Whole-second decisions: scores of all windows starting inside [t, t+1) are
/// averaged; epochs without windows repeat the previous label (null first).
/// Epochs run from 0 to the last second covered by a window.
std::vector<std::pair<std::size_t, ArtifactClass>> predict_epochs(const Model& m,
                                                                  std::span<const TimedFeature> feats,
                                                                  double window_s, double stride_s);

// EAM1 binary: magic, version, family tag, dimension, classes, seed,
// convergence flag, then the family's parameter blob.
std::vector<std::uint8_t> save_model(const Model& m);
Model load_model(std::span<const std::uint8_t> bytes);

}  // namespace eegart
