#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "detint/domains.hpp"
#include "detint/geometry.hpp"
#include "detint/jet.hpp"
#include "detint/maps.hpp"
#include "detint/quadrature.hpp"
#include "detint/smallmat.hpp"
#include "detint/smooth_map.hpp"

namespace detint {

/// Pinned acceptance tolerances. `integral` governs polynomial integrands,
/// `integral_bump` the compactly supported perturbations whose effective
/// frequency content is higher.
struct Tolerances {
  double integral = 1.0e-8;
  double integral_bump = 1.0e-6;
  double pointwise = 1.0e-10;
  double boundary_gate = 1.0e-12;
  int boundary_samples = 1024;

  double integral_for(bool bump) const { return bump ? integral_bump : integral; }
};

/// Default points per axis: enough for the acceptance tolerances with runtime
/// in seconds. Bump ingredients push the order up.
inline int default_order(int dim, bool bump) {
  if (dim <= 3) return bump ? 32 : 16;
  return bump ? 12 : 10;
}

enum class Verdict { pass, fail, hypothesis_violation };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    default:
      return "hypothesis-violation";
  }
}

/// The central quantity computed three independent ways: direct quadrature of
/// det f', the divergence-theorem flux route, and the boundary-form route.
struct IntegralTriple {
  double via_volume = 0.0;
  double via_flux = 0.0;
  double via_form = 0.0;

  /// Pairwise gaps |vol-flux|, |flux-form|, |vol-form|, recomputed on demand.
  std::array<double, 3> spreads() const {
    return {std::abs(via_volume - via_flux), std::abs(via_flux - via_form),
            std::abs(via_volume - via_form)};
  }
  double max_spread() const {
    const auto s = spreads();
    return std::max({s[0], s[1], s[2]});
  }
};

// ---------------------------------------------------------------------------
// Pointwise fields
// ---------------------------------------------------------------------------

/// x -> det f'(x).
inline auto jacobian_determinant_field(const SmoothMap& f) {
  if (f.dim_in() != f.dim_out())
    throw std::invalid_argument("jacobian_determinant_field: map must be n -> n");
  return [f](std::span<const double> x) { return determinant(jacobian(f, x)); };
}

/// x -> A(x), the first-row cofactors of f'(x). Row 1 of the Jacobian never
/// enters, so the field depends on components 2..n only.
inline auto cofactor_row_field(const SmoothMap& f) {
  if (f.dim_in() != f.dim_out())
    throw std::invalid_argument("cofactor_row_field: map must be n -> n");
  return [f](std::span<const double> x) { return first_row_cofactors(jacobian(f, x)); };
}

/// Residual of the product-rule identity dot(grad f1, A) = det f', relative
/// to the largest participating term. Numerator and denominator come from
/// different determinant expansions (minors vs full).
inline double gradient_cofactor_residual(const SmoothMap& f, std::span<const double> x) {
  const SquareMatrix jac = jacobian(f, x);
  const std::vector<double> a = first_row_cofactors(jac);
  const double det = determinant(jac);
  double dot = 0.0;
  double scale = std::abs(det);
  for (int i = 0; i < jac.size(); ++i) {
    const double term = jac(0, i) * a[i];
    dot += term;
    scale = std::max(scale, std::abs(term));
  }
  if (scale == 0.0) return 0.0;
  return std::abs(dot - det) / scale;
}

/// div A(x) by analytic expansion: each cofactor minor is a determinant of
/// first partials, so its derivative is the column-replacement sum with a
/// column of second partials from one Jet2 pass. The value is the residual
/// that the Jacobi identity asserts to be zero.
inline double piola_divergence_residual(const SmoothMap& f, std::span<const double> x) {
  if (f.dim_in() != f.dim_out())
    throw std::invalid_argument("piola_divergence_residual: map must be n -> n");
  if (!f.jet2_capable())
    throw std::logic_error("piola_divergence_residual: map '" + f.name() +
                           "' has no second-order evaluation path");
  const int n = f.dim_in();
  const auto jets = f.eval(std::span<const Jet2>(seed_jet2(x)));

  const int m = n - 1;
  double divergence = 0.0;
  std::array<double, 49> sub{};
  for (int i = 0; i < n; ++i) {
    std::array<int, kMaxDim> axes{};
    int t = 0;
    for (int k = 0; k < n; ++k)
      if (k != i) axes[t++] = k;
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    for (int c = 0; c < m; ++c) {
      for (int r = 0; r < m; ++r)
        for (int q = 0; q < m; ++q)
          sub[r * m + q] =
              q == c ? jets[r + 1].hess(axes[q], i) : jets[r + 1].grad(axes[q]);
      divergence += sign * detail::det_buffer(sub.data(), m, m);
    }
  }
  return divergence;
}

/// The slow independent route: central differences of the cofactor row.
inline double piola_divergence_fd(const SmoothMap& f, std::span<const double> x,
                                  double step = 1.0e-5) {
  if (f.dim_in() != f.dim_out())
    throw std::invalid_argument("piola_divergence_fd: map must be n -> n");
  const int n = f.dim_in();
  double divergence = 0.0;
  std::vector<double> p(x.begin(), x.end());
  for (int i = 0; i < n; ++i) {
    p[i] = x[i] + step;
    const double hi = first_row_cofactors(jacobian(f, p))[i];
    p[i] = x[i] - step;
    const double lo = first_row_cofactors(jacobian(f, p))[i];
    p[i] = x[i];
    divergence += (hi - lo) / (2.0 * step);
  }
  return divergence;
}

// ---------------------------------------------------------------------------
// The three evaluators of the determinant integral
// ---------------------------------------------------------------------------

/// Direct quadrature of det f' over the domain.
inline double integral_volume(const SmoothMap& f, const Domain& d, const QuadratureRule& rule) {
  if (f.dim_in() != d.dim())
    throw std::invalid_argument("integral_volume: map and domain dimensions differ");
  return volume_integral(jacobian_determinant_field(f), d, rule);
}

/// Divergence-theorem route: the boundary flux of f1 * A against the outward
/// normal. A and N keep their unnormalized forms throughout.
inline double integral_flux(const SmoothMap& f, const Domain& d, const QuadratureRule& rule) {
  if (f.dim_in() != d.dim() || f.dim_in() != f.dim_out())
    throw std::invalid_argument("integral_flux: map must be n -> n on the domain");
  const int n = d.dim();
  auto integrand = [&f, n](std::span<const double> x, std::span<const double> normal) {
    const auto jets = f.eval(std::span<const Jet1>(seed_jet1(x)));
    SquareMatrix jac(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) jac(i, j) = jets[i].grad(j);
    const std::vector<double> a = first_row_cofactors(jac);
    double flux = 0.0;
    for (int i = 0; i < n; ++i) flux += a[i] * normal[i];
    return jets[0].value() * flux;
  };
  return surface_integral(integrand, d, rule);
}

/// Boundary-form route: sum over charts of
///   s * integral of f1(eta(u)) * det[ d(f_j o eta)/du_k ]_{j=2..n} du.
/// The pullback determinant comes from evaluating f at the jet image of the
/// chart, so the chain rule happens inside the jets; A and N are never
/// assembled here.
inline double integral_form(const SmoothMap& f, const Domain& d, const QuadratureRule& rule) {
  if (f.dim_in() != d.dim() || f.dim_in() != f.dim_out())
    throw std::invalid_argument("integral_form: map must be n -> n on the domain");
  if (!d.has_atlas())
    throw std::invalid_argument("integral_form: domain has no boundary atlas");
  if (rule.dim != d.dim() - 1)
    throw std::invalid_argument("integral_form: rule dimension must be n-1");
  const int n = d.dim();
  const int m = n - 1;
  double acc = 0.0;
  std::vector<double> u(m);
  std::array<double, 49> sub{};
  for (const auto& chart : d.atlas()) {
    double scale = chart.orientation;
    for (int a = 0; a < m; ++a) scale *= chart.hi[a] - chart.lo[a];
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const auto v = rule.node(k);
      for (int a = 0; a < m; ++a) u[a] = chart.lo[a] + (chart.hi[a] - chart.lo[a]) * v[a];
      try {
        const auto eta = chart.param.eval(std::span<const Jet1>(seed_jet1(u)));
        const auto pulled = f.eval(std::span<const Jet1>(eta));
        for (int r = 0; r < m; ++r)
          for (int c = 0; c < m; ++c) sub[r * m + c] = pulled[r + 1].grad(c);
        acc += rule.weights[k] * scale * pulled[0].value() *
               detail::det_buffer(sub.data(), m, m);
      } catch (const evaluation_error& e) {
        throw evaluation_error(e.what() + detail::node_context(u) + " on chart '" +
                               chart.param.name() + "'");
      }
    }
  }
  return acc;
}

/// All three evaluators on one map. The volume rule has dimension n, the
/// boundary rule n-1.
inline IntegralTriple integral_triple(const SmoothMap& f, const Domain& d,
                                      const QuadratureRule& volume_rule,
                                      const QuadratureRule& boundary_rule) {
  return {integral_volume(f, d, volume_rule), integral_flux(f, d, boundary_rule),
          integral_form(f, d, boundary_rule)};
}

// ---------------------------------------------------------------------------
// Cauchy-Binet at a boundary point
// ---------------------------------------------------------------------------

struct CauchyBinetCheck {
  double lhs = 0.0;  ///< dot(A(eta(u)), raw minor normal), assembled from minors
  double rhs = 0.0;  ///< det of the composed Jacobian d(Phi o eta)/du
};

/// The identity dot(A, N) = det (Phi o eta)' at one chart point, with the
/// raw (orientation-free) normal: the alternating signs of A and N square
/// away, so both sides match the chart's intrinsic orientation.
inline CauchyBinetCheck cauchy_binet_check(const SmoothMap& f, const BoundaryChart& chart,
                                           std::span<const double> u) {
  if (f.dim_in() != f.dim_out() || f.dim_in() != chart.param.dim_out())
    throw std::invalid_argument("cauchy_binet_check: map must be n -> n on the chart's space");
  detail::check_in_rectangle(chart, u);
  const int n = f.dim_in();
  const int m = n - 1;

  const auto eta = chart.param.eval(std::span<const Jet1>(seed_jet1(u)));
  std::vector<double> x(n);
  RectMatrix tall(n, m);
  for (int i = 0; i < n; ++i) {
    x[i] = eta[i].value();
    for (int j = 0; j < m; ++j) tall(i, j) = eta[i].grad(j);
  }

  const std::vector<double> a = first_row_cofactors(jacobian(f, x));
  const std::vector<double> normal = detail::raw_minor_normal(tall);
  double lhs = 0.0;
  for (int i = 0; i < n; ++i) lhs += a[i] * normal[i];

  const auto pulled = f.eval(std::span<const Jet1>(eta));
  std::array<double, 49> sub{};
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) sub[r * m + c] = pulled[r + 1].grad(c);
  return {lhs, detail::det_buffer(sub.data(), m, m)};
}

// ---------------------------------------------------------------------------
// Theorem-level checks
// ---------------------------------------------------------------------------

struct TheoremCheck {
  std::string scenario;
  double boundary_gap = 0.0;
  IntegralTriple plus;
  IntegralTriple minus;
  double discrepancy = 0.0;  ///< |I+ - I-| between the via_volume values
  double tolerance = 0.0;
  Verdict verdict = Verdict::fail;
};

/// Boundary-equality gate plus both integral triples. A gap beyond the gate
/// classifies as hypothesis-violation, a first-class result: the integrals
/// are still computed so negative controls can show a real discrepancy.
inline TheoremCheck theorem1_check(const SmoothMap& f_plus, const SmoothMap& f_minus,
                                   const Domain& d, const QuadratureRule& volume_rule,
                                   const QuadratureRule& boundary_rule,
                                   const Tolerances& tol = {}) {
  TheoremCheck check;
  check.scenario = f_plus.name() + " vs " + f_minus.name();
  check.boundary_gap = boundary_agreement(f_plus, f_minus, d, tol.boundary_samples);
  check.plus = integral_triple(f_plus, d, volume_rule, boundary_rule);
  check.minus = integral_triple(f_minus, d, volume_rule, boundary_rule);
  check.discrepancy = std::abs(check.plus.via_volume - check.minus.via_volume);
  check.tolerance = tol.integral_for(f_plus.has_bump() || f_minus.has_bump());
  if (check.boundary_gap > tol.boundary_gate)
    check.verdict = Verdict::hypothesis_violation;
  else
    check.verdict = check.discrepancy <= check.tolerance ? Verdict::pass : Verdict::fail;
  return check;
}

/// Integral of the determinant of a mixed Jacobian whose row i comes from
/// component comps[i] (possibly of different maps).
inline double kulpa_mixed_integral(std::span<const MapComponent> comps, const Domain& d,
                                   const QuadratureRule& rule) {
  if (static_cast<int>(comps.size()) != d.dim())
    throw std::invalid_argument("kulpa_mixed_integral: need one component per dimension");
  for (const auto& c : comps)
    if (c.map.dim_in() != d.dim())
      throw std::invalid_argument("kulpa_mixed_integral: component dimension mismatch");
  return integral_volume(mixed_map(comps, "kulpa_mixed"), d, rule);
}

struct KulpaChain {
  std::vector<double> integrals;  ///< I_0 .. I_n, rows swapped one at a time
  double max_step = 0.0;          ///< largest |I_{k+1} - I_k|
  double total = 0.0;             ///< |I_n - I_0|, the full swap discrepancy
};

/// Telescoping row replacement: I_k integrates the Jacobian with the first k
/// rows from f_plus and the rest from f_minus; successive integrals must
/// agree when the swapped components agree on the boundary.
inline KulpaChain kulpa_telescoping(const SmoothMap& f_plus, const SmoothMap& f_minus,
                                    const Domain& d, const QuadratureRule& rule) {
  if (f_plus.dim_in() != d.dim() || f_minus.dim_in() != d.dim())
    throw std::invalid_argument("kulpa_telescoping: map and domain dimensions differ");
  const int n = d.dim();
  KulpaChain chain;
  for (int k = 0; k <= n; ++k) {
    std::vector<MapComponent> comps;
    comps.reserve(n);
    for (int i = 0; i < n; ++i) comps.push_back({i < k ? f_plus : f_minus, i});
    chain.integrals.push_back(kulpa_mixed_integral(comps, d, rule));
  }
  for (int k = 0; k < n; ++k)
    chain.max_step = std::max(chain.max_step, std::abs(chain.integrals[k + 1] - chain.integrals[k]));
  chain.total = std::abs(chain.integrals[n] - chain.integrals[0]);
  return chain;
}

struct KrylovCheck {
  std::vector<double> coeffs_plus;   ///< polynomial coefficients, degree 0..n
  std::vector<double> coeffs_minus;
  double leading_gap = 0.0;  ///< |difference of the degree-n coefficients|
};

namespace detail {

/// Small dense solve with partial pivoting, for the Vandermonde systems of
/// the coefficient check (at most 9 x 9).
inline std::vector<double> solve_dense(std::vector<double> m, std::vector<double> rhs) {
  const int k = static_cast<int>(rhs.size());
  for (int col = 0; col < k; ++col) {
    int pivot = col;
    for (int r = col + 1; r < k; ++r)
      if (std::abs(m[r * k + col]) > std::abs(m[pivot * k + col])) pivot = r;
    if (m[pivot * k + col] == 0.0)
      throw std::runtime_error("solve_dense: singular system");
    if (pivot != col) {
      for (int c = 0; c < k; ++c) std::swap(m[col * k + c], m[pivot * k + c]);
      std::swap(rhs[col], rhs[pivot]);
    }
    for (int r = col + 1; r < k; ++r) {
      const double factor = m[r * k + col] / m[col * k + col];
      for (int c = col; c < k; ++c) m[r * k + c] -= factor * m[col * k + c];
      rhs[r] -= factor * rhs[col];
    }
  }
  std::vector<double> sol(k);
  for (int r = k - 1; r >= 0; --r) {
    double acc = rhs[r];
    for (int c = r + 1; c < k; ++c) acc -= m[r * k + c] * sol[c];
    sol[r] = acc / m[r * k + r];
  }
  return sol;
}

}  // namespace detail

/// Coefficients of P(t) = integral of det(I + t f'(x)): P is a polynomial of
/// degree n in t, sampled at the fixed points t_k = (k+1)/(n+1) and resolved
/// through a Vandermonde solve. The degree-n coefficient is the determinant
/// integral itself.
inline std::vector<double> krylov_coefficients(const SmoothMap& f, const Domain& d,
                                               const QuadratureRule& rule) {
  if (f.dim_in() != d.dim() || f.dim_in() != f.dim_out())
    throw std::invalid_argument("krylov_coefficients: map must be n -> n on the domain");
  const int n = d.dim();
  std::vector<double> samples(n + 1), vand((n + 1) * (n + 1));
  for (int k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k + 1) / static_cast<double>(n + 1);
    auto integrand = [&f, n, t](std::span<const double> x) {
      const SquareMatrix jac = jacobian(f, x);
      SquareMatrix shifted(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) shifted(i, j) = (i == j ? 1.0 : 0.0) + t * jac(i, j);
      return determinant(shifted);
    };
    samples[k] = volume_integral(integrand, d, rule);
    double power = 1.0;
    for (int j = 0; j <= n; ++j) {
      vand[k * (n + 1) + j] = power;
      power *= t;
    }
  }
  return detail::solve_dense(std::move(vand), std::move(samples));
}

inline KrylovCheck krylov_leading_coefficient_check(const SmoothMap& f_plus,
                                                    const SmoothMap& f_minus, const Domain& d,
                                                    const QuadratureRule& rule) {
  KrylovCheck check;
  check.coeffs_plus = krylov_coefficients(f_plus, d, rule);
  check.coeffs_minus = krylov_coefficients(f_minus, d, rule);
  check.leading_gap = std::abs(check.coeffs_plus.back() - check.coeffs_minus.back());
  return check;
}

// ---------------------------------------------------------------------------
// The no-retraction contradiction
// ---------------------------------------------------------------------------

struct NoRetractionReport {
  std::string domain;
  double reference_volume = 0.0;
  int det_samples = 0;        ///< grid points per sphere-valued map
  double max_abs_det = 0.0;   ///< largest |det f'| over the sphere-valued family
  IntegralTriple boundary_fixing;  ///< evaluators on a boundary-fixing map
  double max_volume_error = 0.0;   ///< worst |evaluator - Vol| of the triple
  bool obstruction_confirmed = false;
  bool volume_confirmed = false;

  std::string statement() const {
    std::ostringstream os;
    os << "On " << domain << ": boundary-fixing maps integrate det f' to the volume "
       << reference_volume << " (worst evaluator error " << max_volume_error
       << "), while sphere-valued maps have det f' = 0 everywhere (largest sampled |det| "
       << max_abs_det << " over " << det_samples
       << " points). No map can do both, so no smooth retraction onto the boundary exists.";
    return os.str();
  }
};

/// Demonstrates the two incompatible facts behind the retraction argument:
/// sphere-valued maps have vanishing Jacobian determinant, and maps fixing
/// the boundary integrate it to the (positive) domain volume.
inline NoRetractionReport no_retraction_demo(const Domain& d, const QuadratureRule& volume_rule,
                                             const QuadratureRule& boundary_rule,
                                             const Tolerances& tol = {}) {
  if (!d.has_atlas())
    throw std::invalid_argument("no_retraction_demo: domain needs a boundary atlas");
  if (!d.reference_volume())
    throw std::invalid_argument("no_retraction_demo: domain needs a reference volume");
  const int n = d.dim();

  NoRetractionReport report;
  report.domain = d.name();
  report.reference_volume = *d.reference_volume();

  // A small family of sphere-valued maps: normalized translates that stay
  // away from zero on the closure.
  std::vector<SmoothMap> family;
  {
    std::vector<double> offset(n, 0.0);
    offset[0] = 2.0;
    family.push_back(sphere_valued_map(affine_map(SquareMatrix::identity(n), offset), d));
    std::fill(offset.begin(), offset.end(), 0.0);
    offset[n - 1] = -2.0;
    family.push_back(sphere_valued_map(affine_map(SquareMatrix::identity(n), offset), d));
    std::fill(offset.begin(), offset.end(), 1.5);
    family.push_back(sphere_valued_map(affine_map(SquareMatrix::identity(n), offset), d));
  }

  const int per_axis =
      std::max(2, static_cast<int>(std::ceil(std::pow(1.0e4, 1.0 / n))));
  int samples = 1;
  for (int a = 0; a < n; ++a) samples *= per_axis;
  report.det_samples = samples;
  std::vector<double> v(n);
  for (const auto& map : family) {
    std::vector<int> idx(n, 0);
    while (true) {
      for (int a = 0; a < n; ++a) v[a] = (idx[a] + 0.5) / per_axis;
      const auto x = d.point(v);
      report.max_abs_det =
          std::max(report.max_abs_det, std::abs(determinant(jacobian(map, x))));
      int a = 0;
      while (a < n && ++idx[a] == per_axis) idx[a++] = 0;
      if (a == n) break;
    }
  }

  // Boundary-fixing map: identity plus an interior bump, well inside the
  // domain so the boundary values are untouched.
  std::vector<double> center = d.star_center() ? *d.star_center() : std::vector<double>(n, 0.0);
  std::vector<double> amplitude(n, 0.05);
  const SmoothMap fixer = map_sum(identity_map(n), bump_field(center, 0.5, amplitude));
  report.boundary_fixing = integral_triple(fixer, d, volume_rule, boundary_rule);
  report.max_volume_error = std::max(
      {std::abs(report.boundary_fixing.via_volume - report.reference_volume),
       std::abs(report.boundary_fixing.via_flux - report.reference_volume),
       std::abs(report.boundary_fixing.via_form - report.reference_volume)});

  report.obstruction_confirmed = report.max_abs_det <= 1.0e-10;
  report.volume_confirmed = report.max_volume_error <= tol.integral_bump;
  return report;
}

}  // namespace detint
