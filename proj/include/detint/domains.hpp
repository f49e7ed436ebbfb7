#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "detint/geometry.hpp"
#include "detint/maps.hpp"
#include "detint/quadrature.hpp"
#include "detint/smooth_map.hpp"

namespace detint {
namespace detail {

/// Unit-ball volume via the two-step recurrence V_n = (2 pi / n) V_{n-2}.
inline double ball_volume(int n) {
  double v = (n % 2 == 0) ? std::numbers::pi : 2.0;
  for (int k = (n % 2 == 0) ? 4 : 3; k <= n; k += 2) v *= 2.0 * std::numbers::pi / k;
  return v;
}

/// Hyperspherical coordinates off the reference box. With the radius slot the
/// map covers the open unit ball; without it, the unit sphere. Angle k spans
/// (0,pi) for k < n-1 and (0,2pi) for the last:
///   x_i = r * sin(phi_1)...sin(phi_i) * cos(phi_{i+1})   (no cos for i = n-1)
/// With radius first, det of the volume-chart Jacobian is positive, which by
/// Laplace expansion along the radial column makes the raw minor normal of
/// the sphere chart outward (orientation +1).
inline SmoothMap hyperspherical_chart(int n, bool with_radius) {
  const int dim_in = with_radius ? n : n - 1;
  const char* label = with_radius ? "ball_chart" : "sphere_chart";
  return SmoothMap::make(label, dim_in, n, Smoothness::CInf, [n, with_radius](auto v) {
    using S = scalar_of<decltype(v)>;
    auto angle = [&](int k) {
      const double scale = (k == n - 1) ? 2.0 * std::numbers::pi : std::numbers::pi;
      return S(scale) * v[k - 1 + (with_radius ? 1 : 0)];
    };
    std::vector<S> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
      S prod = with_radius ? S(v[0]) : S(1.0);
      for (int k = 1; k <= i; ++k) prod = prod * sin(angle(k));
      if (i < n - 1) prod = prod * cos(angle(i + 1));
      out.push_back(prod);
    }
    return out;
  });
}

/// Face x_axis = side of the unit box, the other coordinates filled from the
/// chart parameters in increasing order.
inline SmoothMap box_face_chart(int n, int axis, int side) {
  std::ostringstream name;
  name << "box_face(axis=" << axis << ",side=" << side << ")";
  return SmoothMap::make(name.str(), n - 1, n, Smoothness::CInf, [n, axis, side](auto u) {
    using S = scalar_of<decltype(u)>;
    std::vector<S> out;
    out.reserve(n);
    int j = 0;
    for (int i = 0; i < n; ++i)
      out.push_back(i == axis ? S(static_cast<double>(side)) : S(u[j++]));
    return out;
  });
}

/// The raw minor normal of a box face chart is (-1)^axis e_axis; this sign
/// makes it point away from the box.
inline int box_face_orientation(int axis, int side) {
  return (side == 1) == (axis % 2 == 0) ? 1 : -1;
}

inline SmoothMap ellipse_volume_chart(double a, double b) {
  return SmoothMap::make("ellipse_chart", 2, 2, Smoothness::CInf, [a, b](auto v) {
    using S = scalar_of<decltype(v)>;
    const S angle = S(2.0 * std::numbers::pi) * v[1];
    return std::vector<S>{S(a) * v[0] * cos(angle), S(b) * v[0] * sin(angle)};
  });
}

inline SmoothMap ellipse_boundary_chart(double a, double b) {
  return SmoothMap::make("ellipse_boundary", 1, 2, Smoothness::CInf, [a, b](auto u) {
    using S = scalar_of<decltype(u)>;
    const S angle = S(2.0 * std::numbers::pi) * u[0];
    return std::vector<S>{S(a) * cos(angle), S(b) * sin(angle)};
  });
}

/// Enforces the atlas-coverage invariant: total |N| measure over the atlas
/// must reproduce the declared surface area.
inline void validate_surface_area(const Domain& d) {
  if (!d.has_atlas() || !d.reference_surface_area()) return;
  const QuadratureRule rule = gauss_rule(d.dim() <= 3 ? 16 : 10, d.dim() - 1);
  const double area = surface_integral(
      [](std::span<const double>, std::span<const double> normal) {
        double s = 0.0;
        for (double c : normal) s += c * c;
        return std::sqrt(s);
      },
      d, rule);
  if (std::abs(area - *d.reference_surface_area()) > 1.0e-6) {
    std::ostringstream msg;
    msg << "domain '" << d.name() << "': atlas measure " << area
        << " does not match the reference surface area " << *d.reference_surface_area();
    throw std::logic_error(msg.str());
  }
}

}  // namespace detail

/// Open unit ball in R^n. Boundary atlas (one hyperspherical chart) for
/// n <= 4; volume chart only above that.
inline Domain ball_domain(int n) {
  if (n < 2 || n > kMaxDim) throw std::invalid_argument("ball_domain: n must be in [2, 8]");
  std::vector<BoundaryChart> atlas;
  if (n <= 4)
    atlas.push_back({detail::hyperspherical_chart(n, false), std::vector<double>(n - 1, 0.0),
                     std::vector<double>(n - 1, 1.0), 1});
  std::ostringstream name;
  name << "unit_ball(n=" << n << ")";
  Domain d(name.str(), detail::hyperspherical_chart(n, true), std::move(atlas),
           std::vector<double>(n, 0.0),
           n <= 4 ? std::optional<double>(n * detail::ball_volume(n)) : std::nullopt,
           detail::ball_volume(n));
  detail::validate_surface_area(d);
  return d;
}

/// Open unit box (0,1)^n. 2n face charts for n <= 4; the corner set is
/// measure zero and the Gauss nodes never touch it.
inline Domain box_domain(int n) {
  if (n < 2 || n > kMaxDim) throw std::invalid_argument("box_domain: n must be in [2, 8]");
  std::vector<BoundaryChart> atlas;
  if (n <= 4)
    for (int axis = 0; axis < n; ++axis)
      for (int side = 0; side <= 1; ++side)
        atlas.push_back({detail::box_face_chart(n, axis, side), std::vector<double>(n - 1, 0.0),
                         std::vector<double>(n - 1, 1.0),
                         detail::box_face_orientation(axis, side)});
  std::ostringstream name;
  name << "unit_box(n=" << n << ")";
  Domain d(name.str(), identity_map(n), std::move(atlas), std::vector<double>(n, 0.5),
           n <= 4 ? std::optional<double>(2.0 * n) : std::nullopt, 1.0);
  detail::validate_surface_area(d);
  return d;
}

/// Ellipse with semi-axes a, b centered at the origin. The perimeter has no
/// elementary closed form, so the reference area is only set when a = b.
inline Domain ellipse_domain(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("ellipse_domain: semi-axes must be positive");
  std::vector<BoundaryChart> atlas;
  atlas.push_back({detail::ellipse_boundary_chart(a, b), {0.0}, {1.0}, 1});
  std::ostringstream name;
  name << "ellipse(a=" << a << ",b=" << b << ")";
  Domain d(name.str(), detail::ellipse_volume_chart(a, b), std::move(atlas),
           std::vector<double>{0.0, 0.0},
           a == b ? std::optional<double>(2.0 * std::numbers::pi * a) : std::nullopt,
           std::numbers::pi * a * b);
  detail::validate_surface_area(d);
  return d;
}

}  // namespace detint
