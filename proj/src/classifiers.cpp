#include "eegart/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "eegart/dataset.hpp"
#include "eegart/error.hpp"
#include "families.hpp"

namespace eegart {

namespace {

struct FamilyInfo {
  Family family;
  std::string_view name;
  std::string_view display;
};

constexpr std::array<FamilyInfo, 8> kFamilies = {{
    {Family::adaboost, "adaboost", "AdaBoost"},
    {Family::gaussian_nb, "gaussian_nb", "GaussianNB"},
    {Family::knn, "knn", "k-NN"},
    {Family::lda, "lda", "LDA"},
    {Family::mlp, "mlp", "MLP"},
    {Family::random_forest, "random_forest", "Random Forests"},
    {Family::sgd_linear, "sgd_linear", "SGD classifier"},
    {Family::gradient_boost, "gradient_boost", "gradient_boost (xgboost-substitute)"},
}};

constexpr std::uint32_t kModelVersion = 1;

// Always predicts the only class seen in training.
class ConstantClassifier final : public FittedClassifier {
 public:
  void scores(std::span<const double>, std::span<double> out) const override { out[0] = 1.0; }
  void save(BinaryWriter&) const override {}
};

constexpr std::uint8_t kConstantTag = 0xff;

}  // namespace

std::string_view family_name(Family f) { return kFamilies.at(static_cast<std::size_t>(f)).name; }
std::string_view family_display(Family f) { return kFamilies.at(static_cast<std::size_t>(f)).display; }

std::optional<Family> parse_family(std::string_view name) {
  for (const auto& info : kFamilies)
    if (info.name == name) return info.family;
  return std::nullopt;
}

std::string param_to_string(const ParamValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(v));
  return buf;
}

ArtifactClass argmax_class(const ClassScores& s) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] > s[best]) best = i;
  return static_cast<ArtifactClass>(best);
}

Model::Model(Family family, std::size_t dim, std::vector<ArtifactClass> classes, std::uint64_t seed, bool converged,
             std::shared_ptr<const FittedClassifier> impl)
    : family_(family), dim_(dim), classes_(std::move(classes)), seed_(seed), converged_(converged),
      impl_(std::move(impl)) {}

ClassScores Model::predict_scores(std::span<const double> x) const {
  if (x.size() != dim_)
    throw UsageError("dimension mismatch: model expects " + std::to_string(dim_) + ", got " +
                     std::to_string(x.size()));
  std::array<double, kNumClasses> local{};
  impl_->scores(x, std::span<double>(local.data(), classes_.size()));
  ClassScores out{};
  for (std::size_t k = 0; k < classes_.size(); ++k) out[code(classes_[k])] = local[k];
  return out;
}

Model fit(const AlgorithmSpec& spec, const Matrix& x, std::span<const ArtifactClass> y, std::uint64_t seed) {
  if (x.rows() != y.size()) throw UsageError("fit: feature and label counts differ");
  if (x.rows() == 0) throw DataError("fit: empty training set");
  for (double v : x.data())
    if (!std::isfinite(v)) throw DataError("fit: non-finite feature value");

  std::vector<ArtifactClass> classes;
  for (ArtifactClass c : kAllClasses)
    if (std::find(y.begin(), y.end(), c) != y.end()) classes.push_back(c);
  std::vector<int> yi(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    yi[i] = static_cast<int>(std::find(classes.begin(), classes.end(), y[i]) - classes.begin());

  if (classes.size() == 1) {
    return Model(spec.family, x.cols(), classes, seed, true, std::make_shared<ConstantClassifier>());
  }

  const detail::FitInput in{x, yi, static_cast<int>(classes.size()), seed};
  detail::FitOutput out;
  switch (spec.family) {
    case Family::gaussian_nb: out = detail::fit_gaussian_nb(in, spec.hyperparams); break;
    case Family::knn: out = detail::fit_knn(in, spec.hyperparams); break;
    case Family::lda: out = detail::fit_lda(in, spec.hyperparams); break;
    case Family::sgd_linear: out = detail::fit_sgd_linear(in, spec.hyperparams); break;
    case Family::mlp: out = detail::fit_mlp(in, spec.hyperparams); break;
    case Family::random_forest: out = detail::fit_random_forest(in, spec.hyperparams); break;
    case Family::adaboost: out = detail::fit_adaboost(in, spec.hyperparams); break;
    case Family::gradient_boost: out = detail::fit_gradient_boost(in, spec.hyperparams); break;
  }
  return Model(spec.family, x.cols(), std::move(classes), seed, out.converged, std::move(out.model));
}

Model fit(const AlgorithmSpec& spec, const LabeledFeatureSet& train, std::uint64_t seed) {
  const auto labels = train.labels();
  return fit(spec, train.features(), labels, seed);
}

std::vector<std::pair<std::size_t, ArtifactClass>> predict_epochs(const Model& m, std::span<const TimedFeature> feats,
                                                                  double window_s, double stride_s) {
  if (feats.empty()) throw UsageError("predict_epochs: no windows");
  if (!(window_s > 0.0) || !(stride_s > 0.0)) throw UsageError("predict_epochs: window and stride must be positive");
  for (std::size_t i = 1; i < feats.size(); ++i)
    if (feats[i].start_s < feats[i - 1].start_s) throw UsageError("predict_epochs: windows not ordered by start");

  const auto epochs = static_cast<std::size_t>(std::floor(feats.back().start_s + window_s + 1e-9));
  std::vector<std::pair<std::size_t, ArtifactClass>> out;
  out.reserve(epochs);
  std::size_t w = 0;
  ArtifactClass previous = ArtifactClass::null;
  for (std::size_t t = 0; t < epochs; ++t) {
    const double hi = static_cast<double>(t + 1);
    ClassScores sum{};
    std::size_t n = 0;
    while (w < feats.size() && feats[w].start_s < hi - 1e-9) {
      if (feats[w].start_s >= static_cast<double>(t) - 1e-9) {
        const auto s = m.predict_scores(feats[w].values);
        for (int c = 0; c < kNumClasses; ++c) sum[c] += s[c];
        ++n;
      }
      ++w;
    }
    if (n > 0) {
      for (auto& v : sum) v /= static_cast<double>(n);
      previous = argmax_class(sum);
    }
    out.emplace_back(t, previous);
  }
  return out;
}

std::vector<std::uint8_t> save_model(const Model& m) {
  BinaryWriter w;
  w.magic("EAM1");
  w.u32(kModelVersion);
  const bool constant = dynamic_cast<const ConstantClassifier*>(&m.impl()) != nullptr;
  w.u8(static_cast<std::uint8_t>(m.family()));
  w.u8(constant ? kConstantTag : 0);
  w.u64(m.dim());
  w.u32(static_cast<std::uint32_t>(m.classes().size()));
  for (ArtifactClass c : m.classes()) w.u8(static_cast<std::uint8_t>(code(c)));
  w.u64(m.seed());
  w.u8(m.converged() ? 1 : 0);
  m.impl().save(w);
  return w.take();
}

Model load_model(std::span<const std::uint8_t> bytes) {
  BinaryReader r(bytes);
  r.expect_magic("EAM1");
  if (r.u32() != kModelVersion) throw DataError("model: unsupported version");
  const std::uint8_t tag = r.u8();
  if (tag >= kFamilies.size()) throw DataError("model: unknown family tag");
  const auto family = static_cast<Family>(tag);
  const bool constant = r.u8() == kConstantTag;
  const std::uint64_t dim = r.u64();
  const std::uint32_t nclasses = r.u32();
  if (nclasses == 0 || nclasses > kNumClasses) throw DataError("model: bad class count");
  std::vector<ArtifactClass> classes;
  for (std::uint32_t i = 0; i < nclasses; ++i) classes.push_back(class_from_code(r.u8()));
  const std::uint64_t seed = r.u64();
  const bool converged = r.u8() != 0;
  std::shared_ptr<const FittedClassifier> impl;
  if (constant) {
    impl = std::make_shared<ConstantClassifier>();
  } else {
    switch (family) {
      case Family::gaussian_nb: impl = detail::load_gaussian_nb(r); break;
      case Family::knn: impl = detail::load_knn(r); break;
      case Family::lda: impl = detail::load_lda(r); break;
      case Family::sgd_linear: impl = detail::load_sgd_linear(r); break;
      case Family::mlp: impl = detail::load_mlp(r); break;
      case Family::random_forest: impl = detail::load_random_forest(r); break;
      case Family::adaboost: impl = detail::load_adaboost(r); break;
      case Family::gradient_boost: impl = detail::load_gradient_boost(r); break;
    }
  }
  if (!r.at_end()) throw DataError("model: trailing bytes");
  return Model(family, dim, std::move(classes), seed, converged, std::move(impl));
}

namespace detail {

void check_keys(const Hyperparams& hp, std::initializer_list<std::string_view> allowed, std::string_view family) {
  for (const auto& [key, value] : hp)
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw UsageError("unknown hyperparameter '" + key + "' for " + std::string(family));
}

double real_param(const Hyperparams& hp, const std::string& name, double fallback) {
  const auto it = hp.find(name);
  if (it == hp.end()) return fallback;
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  const auto& s = std::get<std::string>(it->second);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw UsageError("hyperparameter " + name + " must be numeric, got '" + s + "'");
  return v;
}

long int_param(const Hyperparams& hp, const std::string& name, long fallback) {
  const auto it = hp.find(name);
  if (it == hp.end()) return fallback;
  if (const auto* s = std::get_if<std::string>(&it->second); s && *s == "none") return 0;
  const double v = real_param(hp, name, static_cast<double>(fallback));
  if (v != std::floor(v)) throw UsageError("hyperparameter " + name + " must be an integer");
  return static_cast<long>(v);
}

std::string choice_param(const Hyperparams& hp, const std::string& name, const std::string& fallback) {
  const auto it = hp.find(name);
  if (it == hp.end()) return fallback;
  return param_to_string(it->second);
}

Standardizer Standardizer::fit(const Matrix& x) {
  Standardizer s;
  const std::size_t n = x.rows(), d = x.cols();
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += x(i, j);
  for (auto& m : s.mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) s.scale[j] += (x(i, j) - s.mean[j]) * (x(i, j) - s.mean[j]);
  for (auto& v : s.scale) {
    v = std::sqrt(v / static_cast<double>(n));
    if (!(v > 1e-12)) v = 1.0;
  }
  return s;
}

void Standardizer::apply(std::span<const double> in, std::span<double> out) const {
  for (std::size_t j = 0; j < in.size(); ++j) out[j] = (in[j] - mean[j]) / scale[j];
}

Matrix Standardizer::apply(const Matrix& x) const {
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) apply(x.row(i), out.row(i));
  return out;
}

void Standardizer::save(BinaryWriter& w) const {
  w.f64s(mean);
  w.f64s(scale);
}

Standardizer Standardizer::load(BinaryReader& r) {
  Standardizer s;
  s.mean = r.f64s();
  s.scale = r.f64s();
  if (s.mean.size() != s.scale.size()) throw DataError("model: malformed standardizer");
  return s;
}

void softmax_inplace(std::span<double> v) {
  double mx = v[0];
  for (double x : v) mx = std::max(mx, x);
  double sum = 0.0;
  for (auto& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (auto& x : v) x /= sum;
}

}  // namespace detail

}  // namespace eegart
