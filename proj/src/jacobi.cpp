#include "eegart/jacobi.hpp"

#include <cmath>

#include "eegart/error.hpp"

namespace eegart {

EigenDecomposition jacobi_eigen(const Matrix& input, int max_sweeps) {
  const std::size_t n = input.rows();
  if (n != input.cols()) throw UsageError("jacobi_eigen: matrix is not square");
  double scale = 0.0;
  for (double x : input.data()) {
    if (!std::isfinite(x)) throw NumericalError("jacobi_eigen: non-finite entry");
    scale = std::max(scale, std::abs(x));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(input(i, j) - input(j, i)) > 1e-12 * std::max(1.0, scale))
        throw UsageError("jacobi_eigen: matrix is not symmetric");

  Matrix a = input;
  Matrix v = Matrix::identity(n);
  EigenDecomposition out;

  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::abs(a(p, q));
    if (off == 0.0) {
      out.sweeps = sweep - 1;
      out.values.resize(n);
      for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
      out.vectors = std::move(v);
      return out;
    }
    // Rotations below this size are skipped during the first sweeps.
    const double threshold = sweep < 4 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        const double g = 100.0 * std::abs(apq);
        // Negligible relative to both diagonal entries: annihilate outright.
        if (sweep > 4 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        if (std::abs(apq) <= threshold || apq == 0.0) continue;
        const double diff = a(q, q) - a(p, p);
        double t;
        if (std::abs(diff) + g == std::abs(diff)) {
          t = apq / diff;
        } else {
          const double theta = 0.5 * diff / apq;
          t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double h = t * apq;
        a(p, p) -= h;
        a(q, q) += h;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (j == p || j == q) continue;
          const double ajp = a(j, p);
          const double ajq = a(j, q);
          a(j, p) = a(p, j) = ajp - s * (ajq + ajp * tau);
          a(j, q) = a(q, j) = ajq + s * (ajp - ajq * tau);
        }
        for (std::size_t j = 0; j < n; ++j) {
          const double vjp = v(j, p);
          const double vjq = v(j, q);
          v(j, p) = vjp - s * (vjq + vjp * tau);
          v(j, q) = vjq + s * (vjp - vjq * tau);
        }
      }
    }
  }
  throw NumericalError("jacobi_eigen: no convergence after " + std::to_string(max_sweeps) + " sweeps");
}

}  // namespace eegart
