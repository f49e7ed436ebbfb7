#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "detint/geometry.hpp"
#include "detint/smooth_map.hpp"

namespace detint {

namespace detail {

template <class Span>
using scalar_of = std::remove_cvref_t<decltype(std::declval<Span>()[0])>;

inline Smoothness min_smoothness(Smoothness a, Smoothness b) {
  return static_cast<Smoothness>(std::min(static_cast<int>(a), static_cast<int>(b)));
}

/// Deterministic uniform double in [-1, 1); independent of the standard
/// library's distribution internals so seeds reproduce across toolchains.
inline double canonical_pm1(std::mt19937_64& rng) {
  return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace detail

inline SmoothMap identity_map(int n) {
  return SmoothMap::make("identity", n, n, Smoothness::CInf, [](auto x) {
    using S = detail::scalar_of<decltype(x)>;
    return std::vector<S>(x.begin(), x.end());
  });
}

inline SmoothMap linear_map(const SquareMatrix& a, std::string name = "linear") {
  const int n = a.size();
  std::vector<double> entries(a.data(), a.data() + n * n);
  return SmoothMap::make(std::move(name), n, n, Smoothness::CInf, [entries, n](auto x) {
    using S = detail::scalar_of<decltype(x)>;
    std::vector<S> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
      S acc(0.0);
      for (int j = 0; j < n; ++j) acc += entries[i * n + j] * x[j];
      out.push_back(acc);
    }
    return out;
  });
}

inline SmoothMap affine_map(const SquareMatrix& a, std::span<const double> offset,
                            std::string name = "affine") {
  const int n = a.size();
  if (static_cast<int>(offset.size()) != n)
    throw std::invalid_argument("affine_map: offset size mismatch");
  std::vector<double> entries(a.data(), a.data() + n * n);
  std::vector<double> b(offset.begin(), offset.end());
  return SmoothMap::make(std::move(name), n, n, Smoothness::CInf, [entries, b, n](auto x) {
    using S = detail::scalar_of<decltype(x)>;
    std::vector<S> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
      S acc(b[i]);
      for (int j = 0; j < n; ++j) acc += entries[i * n + j] * x[j];
      out.push_back(acc);
    }
    return out;
  });
}

/// The running 2-d example (x, y) -> (x^2, x y).
inline SmoothMap quadratic2d_map() {
  return SmoothMap::make("quadratic2d", 2, 2, Smoothness::CInf, [](auto x) {
    using S = detail::scalar_of<decltype(x)>;
    return std::vector<S>{x[0] * x[0], x[0] * x[1]};
  });
}

/// Polynomial map with coefficients drawn uniformly from [-1, 1) by a seeded
/// generator: every monomial of total degree <= `degree` in n variables, in
/// each of the n components.
inline SmoothMap random_polynomial_map(int n, int degree, std::uint64_t seed) {
  if (n < 1 || n > kMaxDim) throw std::invalid_argument("random_polynomial_map: bad dimension");
  if (degree < 0 || degree > 6) throw std::invalid_argument("random_polynomial_map: bad degree");

  std::vector<std::array<int, kMaxDim>> exponents;
  std::array<int, kMaxDim> current{};
  auto enumerate = [&](auto&& self, int axis, int remaining) -> void {
    if (axis == n) {
      exponents.push_back(current);
      return;
    }
    for (int e = 0; e <= remaining; ++e) {
      current[axis] = e;
      self(self, axis + 1, remaining - e);
    }
    current[axis] = 0;
  };
  enumerate(enumerate, 0, degree);

  std::mt19937_64 rng(seed);
  std::vector<double> coeffs(exponents.size() * n);
  for (double& c : coeffs) c = detail::canonical_pm1(rng);

  std::ostringstream name;
  name << "random_poly(deg=" << degree << ",seed=" << seed << ")";
  return SmoothMap::make(name.str(), n, n, Smoothness::CInf, [exponents, coeffs, n](auto x) {
    using S = detail::scalar_of<decltype(x)>;
    std::vector<S> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
      S acc(0.0);
      for (std::size_t k = 0; k < exponents.size(); ++k) {
        S term(coeffs[i * exponents.size() + k]);
        for (int j = 0; j < n; ++j)
          if (exponents[k][j] > 0) term = term * powi(x[j], exponents[k][j]);
        acc += term;
      }
      out.push_back(acc);
    }
    return out;
  });
}

/// Compactly supported C-infinity field
///   x -> amplitude * exp(1 - 1/(1 - |x-center|^2/radius^2))
/// inside the ball of the given radius and exactly zero outside, peaking at
/// `amplitude` in the center. Both branches return zero jets on and beyond
/// the support sphere. The switch to the zero branch happens where the
/// profile underflows double precision, so the jet values are exact.
inline SmoothMap bump_field(std::span<const double> center, double radius,
                            std::span<const double> amplitude) {
  if (radius <= 0.0) throw std::invalid_argument("bump_field: radius must be positive");
  if (center.size() != amplitude.size())
    throw std::invalid_argument("bump_field: center/amplitude size mismatch");
  const int n = static_cast<int>(center.size());
  std::vector<double> c(center.begin(), center.end());
  std::vector<double> amp(amplitude.begin(), amplitude.end());
  const double inv_r2 = 1.0 / (radius * radius);

  std::ostringstream name;
  name << "bump(r=" << radius << ")";
  SmoothMap m = SmoothMap::make(name.str(), n, n, Smoothness::CInf, [c, amp, inv_r2, n](auto x) {
    using S = detail::scalar_of<decltype(x)>;
    S s(0.0);
    for (int i = 0; i < n; ++i) {
      S d = x[i] - c[i];
      s += d * d * inv_r2;
    }
    std::vector<S> out(n, S(0.0));
    // exp(1 - 1/(1-s)) underflows to exactly 0 before 1-s reaches 1e-3, so
    // cutting over to the zero branch here is exact and keeps 1/(1-s)^2
    // factors in the jet derivatives finite.
    if (value_of(s) < 0.999) {
      S w = exp(S(1.0) - S(1.0) / (S(1.0) - s));
      for (int i = 0; i < n; ++i) out[i] = amp[i] * w;
    }
    return out;
  });
  return m.mark_bump();
}

/// Pointwise sum. Inherits the weaker smoothness class; loses the
/// second-order path if either term lacks one.
inline SmoothMap map_sum(const SmoothMap& a, const SmoothMap& b) {
  if (a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out())
    throw std::invalid_argument("map_sum: dimension mismatch");
  const std::string name = a.name() + "+" + b.name();
  const Smoothness cls = detail::min_smoothness(a.smoothness(), b.smoothness());
  auto fn = [a, b](auto x) {
    auto ya = a.eval(x);
    const auto yb = b.eval(x);
    for (std::size_t i = 0; i < ya.size(); ++i) ya[i] += yb[i];
    return ya;
  };
  SmoothMap m = a.jet2_capable() && b.jet2_capable()
                    ? SmoothMap::make(name, a.dim_in(), a.dim_out(), cls, fn)
                    : SmoothMap::make_c1(name, a.dim_in(), a.dim_out(), cls, fn);
  if (a.has_bump() || b.has_bump()) m.mark_bump();
  return m;
}

/// Map assembled from components of other maps: output i is component
/// comps[i].component of comps[i].map. This is the column-replacement
/// construction behind the mixed determinant integrals.
inline SmoothMap mixed_map(std::span<const MapComponent> comps, std::string name = "mixed") {
  if (comps.empty()) throw std::invalid_argument("mixed_map: empty component list");
  const int n = comps[0].map.dim_in();
  bool j2 = true;
  bool bump = false;
  Smoothness cls = Smoothness::CInf;
  for (const auto& c : comps) {
    if (c.map.dim_in() != n) throw std::invalid_argument("mixed_map: input dimension mismatch");
    if (c.component < 0 || c.component >= c.map.dim_out())
      throw std::invalid_argument("mixed_map: component index out of range");
    j2 &= c.map.jet2_capable();
    bump |= c.map.has_bump();
    cls = detail::min_smoothness(cls, c.map.smoothness());
  }
  std::vector<MapComponent> owned(comps.begin(), comps.end());
  auto fn = [owned](auto x) {
    using S = detail::scalar_of<decltype(x)>;
    std::vector<S> out;
    out.reserve(owned.size());
    for (const auto& c : owned) out.push_back(c.map.eval(x)[c.component]);
    return out;
  };
  const int m_out = static_cast<int>(comps.size());
  SmoothMap m = j2 ? SmoothMap::make(std::move(name), n, m_out, cls, fn)
                   : SmoothMap::make_c1(std::move(name), n, m_out, cls, fn);
  if (bump) m.mark_bump();
  return m;
}

/// x -> g(x)/|g(x)|, a map with image in the unit sphere (hence everywhere
/// singular Jacobian). Requires g bounded away from zero on the closure,
/// verified by sampling the volume chart grid and the boundary atlas.
inline SmoothMap sphere_valued_map(const SmoothMap& g, const Domain& d) {
  if (g.dim_in() != d.dim() || g.dim_out() != d.dim())
    throw std::invalid_argument("sphere_valued_map: g must be n -> n on the domain");
  const int n = d.dim();

  double min_norm = std::numeric_limits<double>::infinity();
  auto visit = [&](std::span<const double> x) {
    const auto y = g.eval(x);
    double s = 0.0;
    for (double v : y) s += v * v;
    min_norm = std::min(min_norm, std::sqrt(s));
  };
  {
    const int per_axis = n <= 4 ? 10 : 4;
    std::vector<double> v(n);
    std::vector<int> idx(n, 0);
    while (true) {
      for (int a = 0; a < n; ++a) v[a] = (idx[a] + 0.5) / per_axis;
      visit(d.point(v));
      int a = 0;
      while (a < n && ++idx[a] == per_axis) idx[a++] = 0;
      if (a == n) break;
    }
  }
  for (const auto& chart : d.atlas()) {
    const int du = n - 1;
    std::vector<double> u(du);
    std::vector<int> idx(du, 0);
    while (true) {
      for (int a = 0; a < du; ++a)
        u[a] = chart.lo[a] + (chart.hi[a] - chart.lo[a]) * (idx[a] + 0.5) / 8;
      visit(chart.param.eval(u));
      int a = 0;
      while (a < du && ++idx[a] == 8) idx[a++] = 0;
      if (a == du) break;
    }
  }
  if (!(min_norm > 1.0e-6))
    throw std::domain_error("sphere_valued_map: |g| falls below 1e-6 on the domain");

  auto fn = [g, n](auto x) {
    using S = detail::scalar_of<decltype(x)>;
    auto y = g.eval(x);
    S s(0.0);
    for (int i = 0; i < n; ++i) s += y[i] * y[i];
    S norm = sqrt(s);
    for (int i = 0; i < n; ++i) y[i] = y[i] / norm;
    return y;
  };
  const std::string name = "sphere(" + g.name() + ")";
  return g.jet2_capable() ? SmoothMap::make(name, n, n, g.smoothness(), fn)
                          : SmoothMap::make_c1(name, n, n, g.smoothness(), fn);
}

}  // namespace detint
