#pragma once

// Per-family training entry points shared by classifiers.cpp.

#include <initializer_list>
#include <memory>
#include <span>
#include <string_view>

#include "eegart/binary_io.hpp"
#include "eegart/classifiers.hpp"

namespace eegart::detail {

struct FitInput {
  const Matrix& x;
  std::span<const int> y;  // 0..num_classes-1
  int num_classes;
  std::uint64_t seed;
};

struct FitOutput {
  std::shared_ptr<const FittedClassifier> model;
  bool converged = true;
};

void check_keys(const Hyperparams& hp, std::initializer_list<std::string_view> allowed, std::string_view family);
double real_param(const Hyperparams& hp, const std::string& name, double fallback);
long int_param(const Hyperparams& hp, const std::string& name, long fallback);
std::string choice_param(const Hyperparams& hp, const std::string& name, const std::string& fallback);

// Column means and standard deviations (1 where a column is constant).
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Matrix& x);
  void apply(std::span<const double> in, std::span<double> out) const;
  Matrix apply(const Matrix& x) const;
  void save(BinaryWriter& w) const;
  static Standardizer load(BinaryReader& r);
};

void softmax_inplace(std::span<double> v);

FitOutput fit_gaussian_nb(const FitInput& in, const Hyperparams& hp);
FitOutput fit_knn(const FitInput& in, const Hyperparams& hp);
FitOutput fit_lda(const FitInput& in, const Hyperparams& hp);
FitOutput fit_sgd_linear(const FitInput& in, const Hyperparams& hp);
FitOutput fit_mlp(const FitInput& in, const Hyperparams& hp);
FitOutput fit_random_forest(const FitInput& in, const Hyperparams& hp);
FitOutput fit_adaboost(const FitInput& in, const Hyperparams& hp);
FitOutput fit_gradient_boost(const FitInput& in, const Hyperparams& hp);

std::shared_ptr<const FittedClassifier> load_gaussian_nb(BinaryReader& r);
std::shared_ptr<const FittedClassifier> load_knn(BinaryReader& r);
std::shared_ptr<const FittedClassifier> load_lda(BinaryReader& r);
std::shared_ptr<const FittedClassifier> load_sgd_linear(BinaryReader& r);
std::shared_ptr<const FittedClassifier> load_mlp(BinaryReader& r);
std::shared_ptr<const FittedClassifier> load_random_forest(BinaryReader& r);
std::shared_ptr<const FittedClassifier> load_adaboost(BinaryReader& r);
std::shared_ptr<const FittedClassifier> load_gradient_boost(BinaryReader& r);

}  // namespace eegart::detail
