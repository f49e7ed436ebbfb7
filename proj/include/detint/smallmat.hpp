#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "detint/jet.hpp"

namespace detint {

namespace detail {

/// Determinant of a row-major n x n buffer with row stride `stride`.
/// Cofactor expansion along the first column for n <= 4, LU with partial
/// pivoting above. An exact zero pivot yields exactly 0.
inline double det_buffer(const double* a, int n, int stride) {
  switch (n) {
    case 1:
      return a[0];
    case 2:
      return a[0] * a[stride + 1] - a[1] * a[stride];
    case 3:
    case 4: {
      double acc = 0.0;
      double sign = 1.0;
      std::array<double, 9> sub{};
      for (int drop = 0; drop < n; ++drop) {
        int k = 0;
        for (int r = 0; r < n; ++r) {
          if (r == drop) continue;
          for (int c = 1; c < n; ++c) sub[k++] = a[r * stride + c];
        }
        acc += sign * a[drop * stride] * det_buffer(sub.data(), n - 1, n - 1);
        sign = -sign;
      }
      return acc;
    }
    default: {
      std::array<double, 64> lu{};
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) lu[r * n + c] = a[r * stride + c];
      double det = 1.0;
      for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
          if (std::abs(lu[r * n + col]) > std::abs(lu[pivot * n + col])) pivot = r;
        if (lu[pivot * n + col] == 0.0) return 0.0;
        if (pivot != col) {
          for (int c = 0; c < n; ++c) std::swap(lu[col * n + c], lu[pivot * n + c]);
          det = -det;
        }
        det *= lu[col * n + col];
        for (int r = col + 1; r < n; ++r) {
          const double factor = lu[r * n + col] / lu[col * n + col];
          for (int c = col; c < n; ++c) lu[r * n + c] -= factor * lu[col * n + c];
        }
      }
      return det;
    }
  }
}

inline void require_finite(std::span<const double> entries, const char* what) {
  for (double e : entries)
    if (!std::isfinite(e)) throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SquareMatrix: dense n x n, 2 <= n <= 8, row-major. When it holds a Jacobian
// f'(x), row i is the gradient of component i.
// ---------------------------------------------------------------------------
class SquareMatrix {
 public:
  explicit SquareMatrix(int n) : n_(check_size(n)) {}

  SquareMatrix(int n, std::span<const double> entries) : n_(check_size(n)) {
    if (entries.size() != static_cast<std::size_t>(n * n))
      throw std::invalid_argument("SquareMatrix: entry count does not match n*n");
    detail::require_finite(entries, "SquareMatrix");
    std::copy(entries.begin(), entries.end(), a_.begin());
  }

  /// Row-major construction from nested braces, for literals in tests.
  SquareMatrix(std::initializer_list<std::initializer_list<double>> rows)
      : n_(check_size(static_cast<int>(rows.size()))) {
    int r = 0;
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != n_)
        throw std::invalid_argument("SquareMatrix: ragged initializer");
      int c = 0;
      for (double v : row) (*this)(r, c++) = v;
      ++r;
    }
    detail::require_finite(std::span<const double>(a_.data(), n_ * n_), "SquareMatrix");
  }

  static SquareMatrix identity(int n) {
    SquareMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int size() const { return n_; }
  double& operator()(int i, int j) {
    assert(i >= 0 && i < n_ && j >= 0 && j < n_);
    return a_[i * n_ + j];
  }
  double operator()(int i, int j) const {
    assert(i >= 0 && i < n_ && j >= 0 && j < n_);
    return a_[i * n_ + j];
  }
  const double* data() const { return a_.data(); }

 private:
  static int check_size(int n) {
    if (n < 2 || n > kMaxDim) throw std::invalid_argument("SquareMatrix: n must be in [2, 8]");
    return n;
  }

  int n_;
  std::array<double, kMaxDim * kMaxDim> a_{};
};

// ---------------------------------------------------------------------------
// RectMatrix: dense r x c, 1 <= r, c <= 8, row-major. Holds boundary-chart
// Jacobians (n rows, n-1 columns) and their transposed chain-rule partners.
// ---------------------------------------------------------------------------
class RectMatrix {
 public:
  RectMatrix(int rows, int cols) : r_(check(rows)), c_(check(cols)) {}

  RectMatrix(int rows, int cols, std::span<const double> entries)
      : r_(check(rows)), c_(check(cols)) {
    if (entries.size() != static_cast<std::size_t>(rows * cols))
      throw std::invalid_argument("RectMatrix: entry count does not match rows*cols");
    detail::require_finite(entries, "RectMatrix");
    std::copy(entries.begin(), entries.end(), a_.begin());
  }

  RectMatrix(std::initializer_list<std::initializer_list<double>> rows)
      : r_(check(static_cast<int>(rows.size()))),
        c_(check(static_cast<int>(rows.begin()->size()))) {
    int i = 0;
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != c_)
        throw std::invalid_argument("RectMatrix: ragged initializer");
      int j = 0;
      for (double v : row) (*this)(i, j++) = v;
      ++i;
    }
    detail::require_finite(std::span<const double>(a_.data(), r_ * c_), "RectMatrix");
  }

  int rows() const { return r_; }
  int cols() const { return c_; }
  double& operator()(int i, int j) {
    assert(i >= 0 && i < r_ && j >= 0 && j < c_);
    return a_[i * c_ + j];
  }
  double operator()(int i, int j) const {
    assert(i >= 0 && i < r_ && j >= 0 && j < c_);
    return a_[i * c_ + j];
  }

 private:
  static int check(int m) {
    if (m < 1 || m > kMaxDim) throw std::invalid_argument("RectMatrix: dims must be in [1, 8]");
    return m;
  }

  int r_, c_;
  std::array<double, kMaxDim * kMaxDim> a_{};
};

inline double determinant(const SquareMatrix& m) {
  return detail::det_buffer(m.data(), m.size(), m.size());
}

/// Determinant of the submatrix with row `drop_row` and column `drop_col`
/// removed (0-based). For n = 2 this is the remaining single entry.
inline double minor_det(const SquareMatrix& m, int drop_row, int drop_col) {
  const int n = m.size();
  if (drop_row < 0 || drop_row >= n || drop_col < 0 || drop_col >= n)
    throw std::invalid_argument("minor_det: index out of range");
  std::array<double, 49> sub{};
  int k = 0;
  for (int i = 0; i < n; ++i) {
    if (i == drop_row) continue;
    for (int j = 0; j < n; ++j) {
      if (j == drop_col) continue;
      sub[k++] = m(i, j);
    }
  }
  return detail::det_buffer(sub.data(), n - 1, n - 1);
}

/// Signed cofactors of the first row: component i is (-1)^i times the minor
/// complementing entry (0, i). Satisfies dot(row 0, result) = det(m), the
/// Laplace expansion.
inline std::vector<double> first_row_cofactors(const SquareMatrix& m) {
  const int n = m.size();
  std::vector<double> cof(n);
  for (int i = 0; i < n; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    cof[i] = sign * minor_det(m, 0, i);
  }
  return cof;
}

/// Result of the Cauchy-Binet identity evaluated both ways.
struct CauchyBinetResult {
  double minor_sum;    ///< sum over i of det(wide drop col i) * det(tall drop row i)
  double product_det;  ///< det(wide * tall), the other side of the identity
};

/// For wide (n-1) x n and tall n x (n-1), the sum of matched maximal minors
/// equals det(wide * tall). The paired signs (-1)^{i+1} from the cofactor and
/// normal formulas square away, so the sum is unsigned.
inline CauchyBinetResult cauchy_binet_product(const RectMatrix& wide, const RectMatrix& tall) {
  const int k = wide.rows();
  const int n = wide.cols();
  if (n != k + 1 || tall.rows() != n || tall.cols() != k)
    throw std::invalid_argument("cauchy_binet_product: shapes must be (n-1)xn and nx(n-1)");

  double minor_sum = 0.0;
  std::array<double, 49> sub{};
  for (int drop = 0; drop < n; ++drop) {
    int t = 0;
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < n; ++c)
        if (c != drop) sub[t++] = wide(r, c);
    const double wide_minor = detail::det_buffer(sub.data(), k, k);
    t = 0;
    for (int r = 0; r < n; ++r) {
      if (r == drop) continue;
      for (int c = 0; c < k; ++c) sub[t++] = tall(r, c);
    }
    const double tall_minor = detail::det_buffer(sub.data(), k, k);
    minor_sum += wide_minor * tall_minor;
  }

  std::array<double, 49> prod{};
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      double s = 0.0;
      for (int m = 0; m < n; ++m) s += wide(i, m) * tall(m, j);
      prod[i * k + j] = s;
    }
  return {minor_sum, detail::det_buffer(prod.data(), k, k)};
}

}  // namespace detint
