#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "eegart/classifiers.hpp"
#include "eegart/random.hpp"
#include "eegart/types.hpp"

namespace testing {

// Fresh, empty directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(EEGART_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct Blobs {
  eegart::Matrix x;
  std::vector<eegart::ArtifactClass> y;
};

// Isotropic unit-variance Gaussian blobs centred on the vertices of an
// equilateral triangle with side `separation` in the first two coordinates.
inline Blobs gaussian_blobs(std::size_t per_class, double separation, std::uint64_t seed, std::size_t dim = 2) {
  static const eegart::ArtifactClass labels[3] = {eegart::ArtifactClass::eyem, eegart::ArtifactClass::elpp,
                                                  eegart::ArtifactClass::null};
  const double cx[3] = {0.0, separation, separation / 2.0};
  const double cy[3] = {0.0, 0.0, separation * std::sqrt(3.0) / 2.0};
  eegart::Rng rng(seed);
  Blobs b;
  b.x = eegart::Matrix(3 * per_class, dim);
  for (std::size_t i = 0; i < 3 * per_class; ++i) {
    const std::size_t c = i % 3;
    for (std::size_t d = 0; d < dim; ++d) b.x(i, d) = rng.normal();
    b.x(i, 0) += cx[c];
    if (dim > 1) b.x(i, 1) += cy[c];
    b.y.push_back(labels[c]);
  }
  return b;
}

inline double accuracy(const eegart::Model& m, const Blobs& b) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < b.x.rows(); ++i) ok += m.predict(b.x.row(i)) == b.y[i] ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(b.x.rows());
}

}  // namespace testing
