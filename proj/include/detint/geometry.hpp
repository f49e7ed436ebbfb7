#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "detint/smallmat.hpp"
#include "detint/smooth_map.hpp"

namespace detint {

/// A parametrized piece of a domain boundary: a map from an (n-1)-dimensional
/// rectangle into R^n, plus the sign making the alternating-minor normal point
/// outward. The intrinsic sign of the minor formula depends on the parameter
/// ordering, so it has to be fixed per chart.
struct BoundaryChart {
  SmoothMap param;         ///< eta: rectangle -> boundary patch in R^n
  std::vector<double> lo;  ///< rectangle bounds, size n-1
  std::vector<double> hi;
  int orientation = 1;  ///< +1 or -1; orientation * raw minor normal is outward
};

namespace detail {

/// The alternating-minor normal of a chart Jacobian (n rows, n-1 columns):
/// component i is (-1)^i det(J with row i deleted), 0-based. Orthogonal to all
/// columns of J; its length is the surface-measure density.
inline std::vector<double> raw_minor_normal(const RectMatrix& chart_jacobian) {
  const int n = chart_jacobian.rows();
  if (chart_jacobian.cols() != n - 1)
    throw std::invalid_argument("raw_minor_normal: expected n x (n-1) Jacobian");
  std::vector<double> normal(n);
  std::array<double, 49> sub{};
  for (int drop = 0; drop < n; ++drop) {
    int t = 0;
    for (int r = 0; r < n; ++r) {
      if (r == drop) continue;
      for (int c = 0; c < n - 1; ++c) sub[t++] = chart_jacobian(r, c);
    }
    const double sign = (drop % 2 == 0) ? 1.0 : -1.0;
    normal[drop] = sign * det_buffer(sub.data(), n - 1, n - 1);
  }
  return normal;
}

inline void check_in_rectangle(const BoundaryChart& chart, std::span<const double> u) {
  if (u.size() != chart.lo.size())
    throw std::invalid_argument("chart parameter has wrong dimension");
  for (std::size_t k = 0; k < u.size(); ++k)
    if (u[k] < chart.lo[k] || u[k] > chart.hi[k])
      throw std::invalid_argument("chart parameter outside rectangle");
}

}  // namespace detail

/// Unnormalized outward normal at chart parameter u. |N| is the surface
/// Jacobian, so integrating integrand(eta(u), N) du over the rectangle
/// realizes integrand weighted by dsigma without dividing by |N|.
inline std::vector<double> chart_normal(const BoundaryChart& chart, std::span<const double> u) {
  detail::check_in_rectangle(chart, u);
  const RectMatrix jac = jacobian_rect(chart.param, u);
  std::vector<double> normal = detail::raw_minor_normal(jac);
  bool all_zero = true;
  for (double c : normal) all_zero &= (c == 0.0);
  if (all_zero)
    throw std::domain_error("chart_normal: degenerate chart Jacobian (all minors vanish)");
  for (double& c : normal) c *= chart.orientation;
  return normal;
}

/// A bounded domain: a diffeomorphic chart from the open reference box onto
/// the interior, and an oriented boundary atlas (possibly empty for n >= 5,
/// where only volume integration is supported).
class Domain {
 public:
  Domain(std::string name, SmoothMap volume_chart, std::vector<BoundaryChart> atlas,
         std::optional<std::vector<double>> star_center = std::nullopt,
         std::optional<double> reference_surface_area = std::nullopt,
         std::optional<double> reference_volume = std::nullopt)
      : name_(std::move(name)),
        dim_(volume_chart.dim_out()),
        volume_chart_(std::move(volume_chart)),
        atlas_(std::move(atlas)),
        star_center_(std::move(star_center)),
        reference_surface_area_(reference_surface_area),
        reference_volume_(reference_volume) {
    if (dim_ < 2 || dim_ > kMaxDim) throw std::invalid_argument("Domain: dim must be in [2, 8]");
    if (volume_chart_.dim_in() != dim_)
      throw std::invalid_argument("Domain: volume chart must map (0,1)^n -> R^n");
    for (const auto& chart : atlas_) {
      if (chart.param.dim_in() != dim_ - 1 || chart.param.dim_out() != dim_)
        throw std::invalid_argument("Domain: boundary chart must map (n-1)-rectangle -> R^n");
      if (static_cast<int>(chart.lo.size()) != dim_ - 1 ||
          static_cast<int>(chart.hi.size()) != dim_ - 1)
        throw std::invalid_argument("Domain: chart rectangle bounds have wrong dimension");
      if (chart.orientation != 1 && chart.orientation != -1)
        throw std::invalid_argument("Domain: chart orientation must be +1 or -1");
    }
    validate_chart_sign();
    validate_outwardness();
  }

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const SmoothMap& volume_chart() const { return volume_chart_; }
  std::span<const BoundaryChart> atlas() const { return atlas_; }
  bool has_atlas() const { return !atlas_.empty(); }
  const std::optional<std::vector<double>>& star_center() const { return star_center_; }
  std::optional<double> reference_surface_area() const { return reference_surface_area_; }
  std::optional<double> reference_volume() const { return reference_volume_; }

  /// Point of the closure, pulled through the volume chart.
  std::vector<double> point(std::span<const double> reference) const {
    return volume_chart_.eval(reference);
  }

 private:
  // No folding: det of the volume-chart Jacobian keeps one sign across an
  // interior sample grid. The grid is 10 per axis up to n = 4 and budgeted to
  // about 1e4 points above that.
  void validate_chart_sign() {
    const int per_axis = dim_ <= 4 ? 10 : std::max(2, static_cast<int>(std::floor(
                                              std::pow(1.0e4, 1.0 / dim_))));
    std::vector<double> v(dim_);
    std::vector<int> idx(dim_, 0);
    int sign = 0;
    while (true) {
      for (int a = 0; a < dim_; ++a) v[a] = (idx[a] + 0.5) / per_axis;
      const double det = determinant(jacobian(volume_chart_, v));
      const int s = det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
      if (s == 0) throw std::invalid_argument("Domain '" + name_ + "': volume chart folds (zero Jacobian)");
      if (sign == 0) sign = s;
      if (s != sign)
        throw std::invalid_argument("Domain '" + name_ + "': volume chart Jacobian changes sign");
      int a = 0;
      while (a < dim_ && ++idx[a] == per_axis) idx[a++] = 0;
      if (a == dim_) break;
    }
  }

  // Star-shape test: the oriented normal must point away from the center at
  // every grid sample of every chart.
  void validate_outwardness() {
    if (!star_center_ || atlas_.empty()) return;
    const auto& center = *star_center_;
    const int d = dim_ - 1;
    const int per_axis = 5;
    for (const auto& chart : atlas_) {
      std::vector<double> u(d);
      std::vector<int> idx(d, 0);
      while (true) {
        for (int a = 0; a < d; ++a)
          u[a] = chart.lo[a] + (chart.hi[a] - chart.lo[a]) * (idx[a] + 0.5) / per_axis;
        const auto normal = chart_normal(chart, u);
        const auto x = chart.param.eval(u);
        double dot = 0.0;
        for (int i = 0; i < dim_; ++i) dot += normal[i] * (x[i] - center[i]);
        if (!(dot > 0.0))
          throw std::invalid_argument("Domain '" + name_ +
                                      "': chart normal is not outward at a sample point");
        int a = 0;
        while (a < d && ++idx[a] == per_axis) idx[a++] = 0;
        if (a == d) break;
      }
    }
  }

  std::string name_;
  int dim_;
  SmoothMap volume_chart_;
  std::vector<BoundaryChart> atlas_;
  std::optional<std::vector<double>> star_center_;
  std::optional<double> reference_surface_area_;
  std::optional<double> reference_volume_;
};

/// Max sup-norm discrepancy |fa - fb| over a quasi-uniform grid of boundary
/// points, about `samples` in total spread across the atlas. This is the gate
/// for the boundary-equality hypothesis.
inline double boundary_agreement(const SmoothMap& fa, const SmoothMap& fb, const Domain& d,
                                 int samples = 1024) {
  if (fa.dim_in() != d.dim() || fb.dim_in() != d.dim() || fa.dim_out() != fb.dim_out())
    throw std::invalid_argument("boundary_agreement: dimension mismatch");
  if (!d.has_atlas())
    throw std::invalid_argument("boundary_agreement: domain has no boundary atlas");

  const int n_charts = static_cast<int>(d.atlas().size());
  const int per_chart = std::max(1, samples / n_charts);
  const int dim_u = d.dim() - 1;
  const int per_axis =
      std::max(1, static_cast<int>(std::ceil(std::pow(double(per_chart), 1.0 / dim_u))));

  double gap = 0.0;
  std::vector<double> u(dim_u);
  for (const auto& chart : d.atlas()) {
    std::vector<int> idx(dim_u, 0);
    while (true) {
      for (int a = 0; a < dim_u; ++a)
        u[a] = chart.lo[a] + (chart.hi[a] - chart.lo[a]) * (idx[a] + 0.5) / per_axis;
      const auto x = chart.param.eval(u);
      const auto ya = fa.eval(x);
      const auto yb = fb.eval(x);
      for (std::size_t i = 0; i < ya.size(); ++i) gap = std::max(gap, std::abs(ya[i] - yb[i]));
      int a = 0;
      while (a < dim_u && ++idx[a] == per_axis) idx[a++] = 0;
      if (a == dim_u) break;
    }
  }
  return gap;
}

}  // namespace detint
