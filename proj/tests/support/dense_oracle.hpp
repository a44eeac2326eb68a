#pragma once

// Brute-force ridge oracle, deliberately independent of the library's solve
// path: plain std::vector matrices and Gauss-Jordan inversion, no Eigen.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle {

// Row-major n x n inverse by Gauss-Jordan with partial pivoting.
inline std::vector<double> invert(std::vector<double> a, int n) {
  std::vector<double> inv(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(i) * n + i] = 1.0;

  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[static_cast<std::size_t>(r) * n + col]) >
          std::abs(a[static_cast<std::size_t>(pivot) * n + col]))
        pivot = r;
    if (a[static_cast<std::size_t>(pivot) * n + col] == 0.0)
      throw std::runtime_error("oracle: singular matrix");
    if (pivot != col) {
      for (int c = 0; c < n; ++c) {
        std::swap(a[static_cast<std::size_t>(col) * n + c],
                  a[static_cast<std::size_t>(pivot) * n + c]);
        std::swap(inv[static_cast<std::size_t>(col) * n + c],
                  inv[static_cast<std::size_t>(pivot) * n + c]);
      }
    }
    const double d = a[static_cast<std::size_t>(col) * n + col];
    for (int c = 0; c < n; ++c) {
      a[static_cast<std::size_t>(col) * n + c] /= d;
      inv[static_cast<std::size_t>(col) * n + c] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[static_cast<std::size_t>(r) * n + col];
      if (f == 0.0) continue;
      for (int c = 0; c < n; ++c) {
        a[static_cast<std::size_t>(r) * n + c] -=
            f * a[static_cast<std::size_t>(col) * n + c];
        inv[static_cast<std::size_t>(r) * n + c] -=
            f * inv[static_cast<std::size_t>(col) * n + c];
      }
    }
  }
  return inv;
}

// theta = (X'X + I)^{-1} X'y with X row-major n x d.
inline std::vector<double> ridge_solve(const std::vector<double>& x,
                                       const std::vector<double>& y, int n,
                                       int d) {
  std::vector<double> gram(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) gram[static_cast<std::size_t>(i) * d + i] = 1.0;
  std::vector<double> xty(static_cast<std::size_t>(d), 0.0);
  for (int r = 0; r < n; ++r) {
    for (int i = 0; i < d; ++i) {
      const double xi = x[static_cast<std::size_t>(r) * d + i];
      xty[static_cast<std::size_t>(i)] += xi * y[static_cast<std::size_t>(r)];
      for (int j = 0; j < d; ++j)
        gram[static_cast<std::size_t>(i) * d + j] +=
            xi * x[static_cast<std::size_t>(r) * d + j];
    }
  }
  const std::vector<double> inv = invert(gram, d);
  std::vector<double> theta(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      theta[static_cast<std::size_t>(i)] +=
          inv[static_cast<std::size_t>(i) * d + j] * xty[static_cast<std::size_t>(j)];
  return theta;
}

// x' (X'X + I)^{-1} x via the same inverse, for cross-checking the
// standard-error path.
inline double quadratic_form(const std::vector<double>& gram_inv, int d,
                             const std::vector<double>& v) {
  double acc = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      acc += v[static_cast<std::size_t>(i)] *
             gram_inv[static_cast<std::size_t>(i) * d + j] *
             v[static_cast<std::size_t>(j)];
  return acc;
}

}  // namespace oracle
