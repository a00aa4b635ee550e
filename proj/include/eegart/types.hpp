#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eegart {

/// Per-second annotation classes. Integer codes are stable and used on disk.
enum class ArtifactClass : int { eyem = 0, chew = 1, shiv = 2, elpp = 3, musc = 4, null = 5 };

inline constexpr int kNumClasses = 6;
inline constexpr std::array<ArtifactClass, kNumClasses> kAllClasses = {
    ArtifactClass::eyem, ArtifactClass::chew, ArtifactClass::shiv,
    ArtifactClass::elpp, ArtifactClass::musc, ArtifactClass::null};

constexpr int code(ArtifactClass c) { return static_cast<int>(c); }

std::string_view class_name(ArtifactClass c);

// Accepts the five artifact names and "null".
std::optional<ArtifactClass> parse_class(std::string_view name);

ArtifactClass class_from_code(int code);

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  static Matrix identity(std::size_t n);

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace eegart
