#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace detint {

/// Ambient dimensions are capped so jets and small matrices can live on the
/// stack and brute-force oracles stay feasible.
inline constexpr int kMaxDim = 8;

/// Thrown when jet arithmetic hits a domain violation (division by a zero
/// value part, sqrt of a non-positive value part, ...). The message names the
/// offending operation; integrators append node context on the way up.
class evaluation_error : public std::runtime_error {
 public:
  explicit evaluation_error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {
inline constexpr int tri_size(int n) { return n * (n + 1) / 2; }
inline constexpr int tri_index(int i, int j) {
  return i >= j ? i * (i + 1) / 2 + j : j * (j + 1) / 2 + i;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Jet1: value + gradient. First-order forward-mode scalar.
// ---------------------------------------------------------------------------
//
// The gradient length is the ambient dimension and is fixed when a point is
// seeded. Constants carry dim 0 and broadcast against any jet; binary ops on
// two seeded jets require equal dims.
class Jet1 {
 public:
  Jet1() = default;
  /*implicit*/ Jet1(double value) : val_(value) {}
  Jet1(double value, int dim) : val_(value), n_(check_dim(dim)) {}

  /// Coordinate seed: value x, gradient = unit vector along `axis`.
  static Jet1 variable(double value, int dim, int axis) {
    Jet1 j(value, dim);
    assert(axis >= 0 && axis < dim);
    j.g_[axis] = 1.0;
    return j;
  }

  double value() const { return val_; }
  int dim() const { return n_; }
  /// Reads beyond dim() return 0: constants have zero derivative everywhere.
  double grad(int i) const {
    assert(i >= 0 && i < kMaxDim);
    return g_[i];
  }

  Jet1& operator+=(const Jet1& o) {
    broadcast(o.n_);
    val_ += o.val_;
    for (int i = 0; i < n_; ++i) g_[i] += o.g_[i];
    return *this;
  }
  Jet1& operator-=(const Jet1& o) {
    broadcast(o.n_);
    val_ -= o.val_;
    for (int i = 0; i < n_; ++i) g_[i] -= o.g_[i];
    return *this;
  }
  Jet1& operator*=(const Jet1& o) { return *this = *this * o; }
  Jet1& operator/=(const Jet1& o) { return *this = *this / o; }

  friend Jet1 operator+(Jet1 a, const Jet1& b) { return a += b; }
  friend Jet1 operator-(Jet1 a, const Jet1& b) { return a -= b; }
  friend Jet1 operator-(const Jet1& a) {
    Jet1 r(-a.val_, a.n_);
    for (int i = 0; i < a.n_; ++i) r.g_[i] = -a.g_[i];
    return r;
  }
  friend Jet1 operator*(const Jet1& a, const Jet1& b) {
    Jet1 r(a.val_ * b.val_, std::max(a.n_, b.n_));
    for (int i = 0; i < r.n_; ++i) r.g_[i] = a.val_ * b.g_[i] + b.val_ * a.g_[i];
    return r;
  }
  friend Jet1 operator/(const Jet1& a, const Jet1& b) {
    if (b.val_ == 0.0) throw evaluation_error("jet division by zero value part");
    Jet1 r(a.val_ / b.val_, std::max(a.n_, b.n_));
    for (int i = 0; i < r.n_; ++i) r.g_[i] = (a.g_[i] - r.val_ * b.g_[i]) / b.val_;
    return r;
  }

  /// h(value) with first derivative dh; chain rule on the gradient.
  Jet1 compose(double h, double dh) const {
    Jet1 r(h, n_);
    for (int i = 0; i < n_; ++i) r.g_[i] = dh * g_[i];
    return r;
  }

 private:
  static int check_dim(int n) {
    assert(n >= 0 && n <= kMaxDim);
    return n;
  }
  void broadcast(int m) {
    assert(n_ == 0 || m == 0 || n_ == m);
    if (m > n_) n_ = m;
  }

  double val_ = 0.0;
  int n_ = 0;
  std::array<double, kMaxDim> g_{};
};

// ---------------------------------------------------------------------------
// Jet2: value + gradient + Hessian. The Hessian stores one triangle, so
// symmetry is exact by construction: hess(i,j) and hess(j,i) read the same
// slot.
// ---------------------------------------------------------------------------
class Jet2 {
 public:
  Jet2() = default;
  /*implicit*/ Jet2(double value) : val_(value) {}
  Jet2(double value, int dim) : val_(value), n_(check_dim(dim)) {}

  static Jet2 variable(double value, int dim, int axis) {
    Jet2 j(value, dim);
    assert(axis >= 0 && axis < dim);
    j.g_[axis] = 1.0;
    return j;
  }

  double value() const { return val_; }
  int dim() const { return n_; }
  /// Reads beyond dim() return 0: constants have zero derivative everywhere.
  double grad(int i) const {
    assert(i >= 0 && i < kMaxDim);
    return g_[i];
  }
  double hess(int i, int j) const {
    assert(i >= 0 && i < kMaxDim && j >= 0 && j < kMaxDim);
    return h_[detail::tri_index(i, j)];
  }

  Jet2& operator+=(const Jet2& o) {
    broadcast(o.n_);
    val_ += o.val_;
    for (int i = 0; i < n_; ++i) g_[i] += o.g_[i];
    for (int k = 0; k < detail::tri_size(n_); ++k) h_[k] += o.h_[k];
    return *this;
  }
  Jet2& operator-=(const Jet2& o) {
    broadcast(o.n_);
    val_ -= o.val_;
    for (int i = 0; i < n_; ++i) g_[i] -= o.g_[i];
    for (int k = 0; k < detail::tri_size(n_); ++k) h_[k] -= o.h_[k];
    return *this;
  }
  Jet2& operator*=(const Jet2& o) { return *this = *this * o; }
  Jet2& operator/=(const Jet2& o) { return *this = *this / o; }

  friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
  friend Jet2 operator-(const Jet2& a) {
    Jet2 r(-a.val_, a.n_);
    for (int i = 0; i < a.n_; ++i) r.g_[i] = -a.g_[i];
    for (int k = 0; k < detail::tri_size(a.n_); ++k) r.h_[k] = -a.h_[k];
    return r;
  }
  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    const int n = std::max(a.n_, b.n_);
    Jet2 r(a.val_ * b.val_, n);
    for (int i = 0; i < n; ++i) r.g_[i] = a.val_ * b.g_[i] + b.val_ * a.g_[i];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j)
        r.h_[detail::tri_index(i, j)] = a.val_ * b.h_[detail::tri_index(i, j)] +
                                        b.val_ * a.h_[detail::tri_index(i, j)] +
                                        a.g_[i] * b.g_[j] + a.g_[j] * b.g_[i];
    return r;
  }
  friend Jet2 operator/(const Jet2& a, const Jet2& b) {
    if (b.val_ == 0.0) throw evaluation_error("jet division by zero value part");
    const int n = std::max(a.n_, b.n_);
    Jet2 r(a.val_ / b.val_, n);
    for (int i = 0; i < n; ++i) r.g_[i] = (a.g_[i] - r.val_ * b.g_[i]) / b.val_;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j)
        r.h_[detail::tri_index(i, j)] =
            (a.h_[detail::tri_index(i, j)] - r.val_ * b.h_[detail::tri_index(i, j)] -
             r.g_[i] * b.g_[j] - r.g_[j] * b.g_[i]) /
            b.val_;
    return r;
  }

  /// h(value) with first and second derivatives; full second-order chain rule.
  Jet2 compose(double h, double dh, double d2h) const {
    Jet2 r(h, n_);
    for (int i = 0; i < n_; ++i) r.g_[i] = dh * g_[i];
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j <= i; ++j)
        r.h_[detail::tri_index(i, j)] =
            dh * h_[detail::tri_index(i, j)] + d2h * g_[i] * g_[j];
    return r;
  }

 private:
  static int check_dim(int n) {
    assert(n >= 0 && n <= kMaxDim);
    return n;
  }
  void broadcast(int m) {
    assert(n_ == 0 || m == 0 || n_ == m);
    if (m > n_) n_ = m;
  }

  double val_ = 0.0;
  int n_ = 0;
  std::array<double, kMaxDim> g_{};
  std::array<double, detail::tri_size(kMaxDim)> h_{};
};

// ---------------------------------------------------------------------------
// Elementary functions. `using std::...` makes the same unqualified spelling
// work for plain doubles inside scalar-generic map components.
// ---------------------------------------------------------------------------
using std::cos;
using std::exp;
using std::sin;
using std::sqrt;

inline Jet1 exp(const Jet1& a) {
  const double e = std::exp(a.value());
  return a.compose(e, e);
}
inline Jet1 sin(const Jet1& a) { return a.compose(std::sin(a.value()), std::cos(a.value())); }
inline Jet1 cos(const Jet1& a) { return a.compose(std::cos(a.value()), -std::sin(a.value())); }
inline Jet1 sqrt(const Jet1& a) {
  if (a.value() <= 0.0) throw evaluation_error("jet sqrt of non-positive value part");
  const double s = std::sqrt(a.value());
  return a.compose(s, 0.5 / s);
}

inline Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.value());
  return a.compose(e, e, e);
}
inline Jet2 sin(const Jet2& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.compose(s, c, -s);
}
inline Jet2 cos(const Jet2& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.compose(c, -s, -c);
}
inline Jet2 sqrt(const Jet2& a) {
  if (a.value() <= 0.0) throw evaluation_error("jet sqrt of non-positive value part");
  const double s = std::sqrt(a.value());
  return a.compose(s, 0.5 / s, -0.25 / (s * a.value()));
}

/// Integer power, valid for any scalar; negative exponents require a nonzero
/// value part. Computed by binary exponentiation so the double and jet paths
/// share the multiplication order.
template <class S>
S powi(const S& base, int exponent) {
  if (exponent < 0) return S(1.0) / powi(base, -exponent);
  S result(1.0);
  S acc = base;
  int e = exponent;
  while (e > 0) {
    if (e & 1) result = result * acc;
    acc = acc * acc;
    e >>= 1;
  }
  return result;
}

inline double value_of(double x) { return x; }
inline double value_of(const Jet1& x) { return x.value(); }
inline double value_of(const Jet2& x) { return x.value(); }

/// Seeds a point for first-order differentiation: coordinate i becomes the
/// i-th independent variable.
inline std::vector<Jet1> seed_jet1(std::span<const double> x) {
  std::vector<Jet1> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out.push_back(Jet1::variable(x[i], static_cast<int>(x.size()), static_cast<int>(i)));
  return out;
}

/// Seeds a point for second-order differentiation (zero Hessians).
inline std::vector<Jet2> seed_jet2(std::span<const double> x) {
  std::vector<Jet2> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out.push_back(Jet2::variable(x[i], static_cast<int>(x.size()), static_cast<int>(i)));
  return out;
}

}  // namespace detint
