#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "detint/geometry.hpp"
#include "detint/jet.hpp"
#include "detint/smallmat.hpp"
#include "detint/smooth_map.hpp"

namespace detint {

/// Thrown when a requested rule would exceed the evaluation budget.
class resource_error : public std::runtime_error {
 public:
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

/// Tensorized Gauss-Legendre nodes and weights on (0,1)^dim. Weights sum to
/// the reference box volume 1; nodes are strictly interior, so chart seams
/// and pole degeneracies on the box faces are never sampled.
struct QuadratureRule {
  int order = 0;  ///< points per axis
  int dim = 0;
  std::vector<double> nodes;    ///< node k occupies [k*dim, (k+1)*dim)
  std::vector<double> weights;  ///< product weights

  std::size_t size() const { return weights.size(); }
  std::span<const double> node(std::size_t k) const {
    return {nodes.data() + k * dim, static_cast<std::size_t>(dim)};
  }
};

namespace detail {

/// Gauss-Legendre abscissas and weights on (0,1), ascending: Newton on the
/// Legendre three-term recurrence, roots mirrored in pairs.
inline void gauss_axis(int order, std::vector<double>& x, std::vector<double>& w) {
  x.assign(order, 0.0);
  w.assign(order, 0.0);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 64; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < order; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
      }
      pp = order * (p1 - z * p0) / (1.0 - z * z);
      const double step = p0 / pp;
      z -= step;
      if (std::abs(step) < 1.0e-15) break;
    }
    x[i] = 0.5 * (1.0 - z);
    x[order - 1 - i] = 0.5 * (1.0 + z);
    const double wi = 1.0 / ((1.0 - z * z) * pp * pp);
    w[i] = wi;
    w[order - 1 - i] = wi;
  }
}

inline std::string node_context(std::span<const double> v) {
  std::ostringstream os;
  os << " [at reference node (";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ")]";
  return os.str();
}

/// One first-order jet pass through the volume chart: writes the image point
/// into `x` and returns |det| of the chart Jacobian.
inline double chart_point_and_density(const SmoothMap& psi, std::span<const double> v,
                                      std::vector<double>& x) {
  const int n = psi.dim_out();
  const auto jets = psi.eval(std::span<const Jet1>(seed_jet1(v)));
  SquareMatrix jac(n);
  for (int i = 0; i < n; ++i) {
    x[i] = jets[i].value();
    for (int j = 0; j < n; ++j) jac(i, j) = jets[i].grad(j);
  }
  return std::abs(determinant(jac));
}

/// Uniform double in the open interval (0,1), built from the top 53 bits of
/// the generator so seeds reproduce across standard libraries.
inline double canonical01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

inline QuadratureRule gauss_rule(int order, int dim) {
  if (order < 1 || order > 64) throw std::invalid_argument("gauss_rule: order must be in [1, 64]");
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("gauss_rule: dim must be in [1, 8]");
  double total_d = 1.0;
  for (int a = 0; a < dim; ++a) total_d *= order;
  if (total_d > 1.0e8)
    throw resource_error("gauss_rule: order^dim exceeds the 1e8 node budget");
  const std::size_t total = static_cast<std::size_t>(total_d);

  std::vector<double> ax, aw;
  detail::gauss_axis(order, ax, aw);

  QuadratureRule rule;
  rule.order = order;
  rule.dim = dim;
  rule.nodes.resize(total * dim);
  rule.weights.resize(total);
  std::vector<int> idx(dim, 0);
  for (std::size_t k = 0; k < total; ++k) {
    double w = 1.0;
    for (int a = 0; a < dim; ++a) {
      rule.nodes[k * dim + a] = ax[idx[a]];
      w *= aw[idx[a]];
    }
    rule.weights[k] = w;
    int a = dim - 1;  // lexicographic enumeration: the last axis runs fastest
    while (a >= 0 && ++idx[a] == order) idx[a--] = 0;
  }

  double sum = 0.0, comp = 0.0;  // Kahan, so the check is meaningful at 1e8 terms
  for (double w : rule.weights) {
    const double y = w - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  if (std::abs(sum - 1.0) > 1.0e-14)
    throw std::logic_error("gauss_rule: weights do not sum to the box volume");
  return rule;
}

/// Integral of a scalar field over the domain: sum of
/// w * integrand(psi(v)) * |det psi'(v)| with psi the volume chart.
template <class F>
double volume_integral(F&& integrand, const Domain& d, const QuadratureRule& rule) {
  if (rule.dim != d.dim())
    throw std::invalid_argument("volume_integral: rule dimension does not match domain");
  double acc = 0.0;
  std::vector<double> x(d.dim());
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const auto v = rule.node(k);
    try {
      const double density = detail::chart_point_and_density(d.volume_chart(), v, x);
      acc += rule.weights[k] * integrand(std::span<const double>(x)) * density;
    } catch (const evaluation_error& e) {
      throw evaluation_error(e.what() + detail::node_context(v));
    }
  }
  return acc;
}

/// Boundary integral driven by the atlas: charts in atlas order, nodes in
/// lexicographic order, each chart rectangle rescaled from the (0,1)^{n-1}
/// rule. The integrand receives the boundary point and the unnormalized
/// outward normal N; dsigma = |N| du is absorbed, nothing divides by |N|.
template <class F>
double surface_integral(F&& integrand, const Domain& d, const QuadratureRule& rule) {
  if (!d.has_atlas())
    throw std::invalid_argument("surface_integral: domain has no boundary atlas");
  if (rule.dim != d.dim() - 1)
    throw std::invalid_argument("surface_integral: rule dimension must be n-1");
  const int n = d.dim();
  double acc = 0.0;
  std::vector<double> u(n - 1), x(n);
  for (const auto& chart : d.atlas()) {
    double scale = 1.0;
    for (int a = 0; a < n - 1; ++a) scale *= chart.hi[a] - chart.lo[a];
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const auto v = rule.node(k);
      for (int a = 0; a < n - 1; ++a) u[a] = chart.lo[a] + (chart.hi[a] - chart.lo[a]) * v[a];
      try {
        const auto jets = chart.param.eval(std::span<const Jet1>(seed_jet1(u)));
        RectMatrix jac(n, n - 1);
        for (int i = 0; i < n; ++i) {
          x[i] = jets[i].value();
          for (int j = 0; j < n - 1; ++j) jac(i, j) = jets[i].grad(j);
        }
        std::vector<double> normal = detail::raw_minor_normal(jac);
        for (double& c : normal) c *= chart.orientation;
        acc += rule.weights[k] * scale *
               integrand(std::span<const double>(x), std::span<const double>(normal));
      } catch (const evaluation_error& e) {
        throw evaluation_error(e.what() + detail::node_context(u) + " on chart '" +
                               chart.param.name() + "'");
      }
    }
  }
  return acc;
}

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Seeded Monte Carlo volume integral for dimensions where tensor rules blow
/// the budget: uniform open-box samples pushed through the volume chart.
/// Same seed, same sample count: bit-identical result.
template <class F>
McEstimate monte_carlo_volume_integral(F&& integrand, const Domain& d, std::int64_t samples,
                                       std::uint64_t seed) {
  if (samples < 1000)
    throw std::invalid_argument("monte_carlo_volume_integral: needs at least 1000 samples");
  std::mt19937_64 rng(seed);
  const int n = d.dim();
  std::vector<double> v(n), x(n);
  double mean = 0.0, m2 = 0.0;  // Welford running moments
  for (std::int64_t s = 0; s < samples; ++s) {
    for (int a = 0; a < n; ++a) v[a] = detail::canonical01(rng);
    const double density = detail::chart_point_and_density(d.volume_chart(), v, x);
    const double y = integrand(std::span<const double>(x)) * density;
    const double delta = y - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (y - mean);
  }
  const double variance = m2 / static_cast<double>(samples - 1);
  return {mean, std::sqrt(variance / static_cast<double>(samples))};
}

}  // namespace detint
