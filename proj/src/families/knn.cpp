#include <algorithm>
#include <cmath>

#include "../families.hpp"
#include "eegart/error.hpp"

namespace eegart::detail {

namespace {

class Knn final : public FittedClassifier {
 public:
  std::size_t k = 5;
  int num_classes = 0;
  Matrix x;
  std::vector<int> y;

  void scores(std::span<const double> q, std::span<double> out) const override {
    std::vector<std::pair<double, std::size_t>> dist(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const auto row = x.row(i);
      double s = 0.0;
      for (std::size_t j = 0; j < q.size(); ++j) s += (row[j] - q[j]) * (row[j] - q[j]);
      dist[i] = {s, i};
    }
    // Equal distances resolve to the earlier training row.
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < k; ++i) out[static_cast<std::size_t>(y[dist[i].second])] += 1.0;
    for (auto& v : out) v /= static_cast<double>(k);
  }

  void save(BinaryWriter& w) const override {
    w.u64(k);
    w.u64(x.cols());
    w.f64s(x.data());
    w.u64(y.size());
    for (int c : y) w.u8(static_cast<std::uint8_t>(c));
  }
};

}  // namespace

FitOutput fit_knn(const FitInput& in, const Hyperparams& hp) {
  check_keys(hp, {"k"}, "knn");
  const long k = int_param(hp, "k", 5);
  if (k < 1) throw UsageError("knn: k must be >= 1");
  if (static_cast<std::size_t>(k) > in.x.rows())
    throw DataError("k-NN with k = " + std::to_string(k) + " > train size " + std::to_string(in.x.rows()));
  auto m = std::make_shared<Knn>();
  m->k = static_cast<std::size_t>(k);
  m->num_classes = in.num_classes;
  m->x = in.x;
  m->y.assign(in.y.begin(), in.y.end());
  return {m, true};
}

std::shared_ptr<const FittedClassifier> load_knn(BinaryReader& r) {
  auto m = std::make_shared<Knn>();
  m->k = r.u64();
  const std::uint64_t d = r.u64();
  auto data = r.f64s();
  const std::uint64_t n = r.u64();
  if (d == 0 || data.size() != n * d || m->k == 0 || m->k > n) throw DataError("model: malformed knn");
  m->x = Matrix(n, d);
  m->x.data() = std::move(data);
  for (std::uint64_t i = 0; i < n; ++i) m->y.push_back(r.u8());
  return m;
}

}  // namespace eegart::detail
