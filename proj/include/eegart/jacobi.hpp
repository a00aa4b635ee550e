#pragma once

#include <vector>

#include "eegart/types.hpp"

namespace eegart {

struct EigenDecomposition {
  std::vector<double> values;  // unsorted, matching columns of `vectors`
  Matrix vectors;              // column k is the unit eigenvector of values[k]
  int sweeps = 0;
};

/// Cyclic Jacobi rotations for a real symmetric matrix. Throws UsageError for
/// non-square or non-symmetric input and NumericalError when the off-diagonal
/// mass has not vanished after `max_sweeps` sweeps.
EigenDecomposition jacobi_eigen(const Matrix& a, int max_sweeps = 100);

}  // namespace eegart
