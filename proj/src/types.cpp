#include "eegart/types.hpp"

#include "eegart/error.hpp"

namespace eegart {

namespace {
constexpr std::array<std::string_view, kNumClasses> kNames = {"eyem", "chew", "shiv",
                                                              "elpp", "musc", "null"};
}

std::string_view class_name(ArtifactClass c) { return kNames.at(static_cast<std::size_t>(c)); }

std::optional<ArtifactClass> parse_class(std::string_view name) {
  for (int i = 0; i < kNumClasses; ++i) {
    if (kNames[i] == name) return static_cast<ArtifactClass>(i);
  }
  return std::nullopt;
}

ArtifactClass class_from_code(int c) {
  if (c < 0 || c >= kNumClasses) throw DataError("invalid class code " + std::to_string(c));
  return static_cast<ArtifactClass>(c);
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

}  // namespace eegart
