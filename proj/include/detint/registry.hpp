#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "detint/domains.hpp"
#include "detint/maps.hpp"

namespace detint {
namespace detail {

inline int param_int(double v, const std::string& what) {
  const long long k = std::llround(v);
  if (std::abs(v - static_cast<double>(k)) > 1.0e-9)
    throw std::invalid_argument(what + " must be an integer");
  return static_cast<int>(k);
}

inline std::uint64_t param_seed(double v, const std::string& what) {
  const long long k = std::llround(v);
  if (k < 0 || std::abs(v - static_cast<double>(k)) > 1.0e-9)
    throw std::invalid_argument(what + " must be a non-negative integer");
  return static_cast<std::uint64_t>(k);
}

/// Shared tail parser for bump parameters: c_1..c_n, radius, a_1..a_n.
inline SmoothMap parse_bump(int n, std::span<const double> p, const std::string& who) {
  if (static_cast<int>(p.size()) != 2 * n + 1)
    throw std::invalid_argument(who + ": expected c_1..c_n, radius, a_1..a_n after the prefix");
  return bump_field(p.first(n), p[n], p.subspan(n + 1, n));
}

}  // namespace detail

/// Name + numeric-parameter factories behind scenario references. Ships with
/// the library domains and map zoo; embedders can register more.
class Registry {
 public:
  using DomainFactory = std::function<Domain(std::span<const double>)>;
  using MapFactory = std::function<SmoothMap(std::span<const double>)>;

  void add_domain(const std::string& name, std::string signature, DomainFactory factory) {
    domains_[name] = {std::move(signature), std::move(factory)};
  }
  void add_map(const std::string& name, std::string signature, MapFactory factory) {
    maps_[name] = {std::move(signature), std::move(factory)};
  }

  bool has_domain(const std::string& name) const { return domains_.count(name) > 0; }
  bool has_map(const std::string& name) const { return maps_.count(name) > 0; }

  Domain make_domain(const std::string& name, std::span<const double> params) const {
    const auto it = domains_.find(name);
    if (it == domains_.end()) throw std::invalid_argument("unknown domain '" + name + "'");
    return it->second.factory(params);
  }
  SmoothMap make_map(const std::string& name, std::span<const double> params) const {
    const auto it = maps_.find(name);
    if (it == maps_.end()) throw std::invalid_argument("unknown map '" + name + "'");
    return it->second.factory(params);
  }

  /// Human-readable inventory: domains, maps, and checks with parameter
  /// signatures, each section sorted by name.
  std::string listing() const {
    std::ostringstream os;
    os << "domains:\n";
    for (const auto& [name, entry] : domains_) os << "  " << entry.signature << "\n";
    os << "maps:\n";
    for (const auto& [name, entry] : maps_) os << "  " << entry.signature << "\n";
    os << "checks:\n";
    for (const auto& [name, text] : check_descriptions())
      os << "  " << name << ": " << text << "\n";
    return os.str();
  }

  static const std::map<std::string, std::string>& check_descriptions() {
    static const std::map<std::string, std::string> checks = {
        {"cauchy_binet", "dot(A, N) vs the chain-rule determinant at every boundary node"},
        {"krylov", "degree-n coefficients of t -> integral of det(I + t f')"},
        {"kulpa", "single-row replacement equality and the telescoping chain"},
        {"no_retraction", "sphere-valued determinant obstruction vs boundary-fixing volume"},
        {"piola", "div A residual at random interior points, jet and finite-difference"},
        {"theorem1", "boundary-equality gate plus determinant-integral equality"},
        {"triple", "agreement of the volume, flux, and form evaluators"},
    };
    return checks;
  }

  static Registry with_builtins() {
    Registry reg;

    reg.add_domain("ellipse", "ellipse(a, b)",
                   [](std::span<const double> p) {
                     if (p.size() != 2)
                       throw std::invalid_argument("ellipse: expected semi-axes a, b");
                     return ellipse_domain(p[0], p[1]);
                   });
    reg.add_domain("unit_ball", "unit_ball(n)  [n in 2..8; boundary atlas for n <= 4]",
                   [](std::span<const double> p) {
                     if (p.size() != 1) throw std::invalid_argument("unit_ball: expected n");
                     return ball_domain(detail::param_int(p[0], "unit_ball: n"));
                   });
    reg.add_domain("unit_box", "unit_box(n)  [n in 2..8; boundary atlas for n <= 4]",
                   [](std::span<const double> p) {
                     if (p.size() != 1) throw std::invalid_argument("unit_box: expected n");
                     return box_domain(detail::param_int(p[0], "unit_box: n"));
                   });

    reg.add_map("identity", "identity(n)", [](std::span<const double> p) {
      if (p.size() != 1) throw std::invalid_argument("identity: expected n");
      return identity_map(detail::param_int(p[0], "identity: n"));
    });
    reg.add_map("linear", "linear(n, a_11..a_nn row-major)", [](std::span<const double> p) {
      if (p.empty()) throw std::invalid_argument("linear: expected n, then n*n entries");
      const int n = detail::param_int(p[0], "linear: n");
      if (static_cast<int>(p.size()) != 1 + n * n)
        throw std::invalid_argument("linear: expected n, then n*n entries");
      return linear_map(SquareMatrix(n, p.subspan(1)));
    });
    reg.add_map("affine", "affine(n, a_11..a_nn row-major, b_1..b_n)",
                [](std::span<const double> p) {
                  if (p.empty())
                    throw std::invalid_argument("affine: expected n, n*n entries, n offsets");
                  const int n = detail::param_int(p[0], "affine: n");
                  if (static_cast<int>(p.size()) != 1 + n * n + n)
                    throw std::invalid_argument("affine: expected n, n*n entries, n offsets");
                  return affine_map(SquareMatrix(n, p.subspan(1, n * n)),
                                    p.subspan(1 + n * n, n));
                });
    reg.add_map("quadratic2d", "quadratic2d()  [(x, y) -> (x^2, x y)]",
                [](std::span<const double> p) {
                  if (!p.empty()) throw std::invalid_argument("quadratic2d: takes no parameters");
                  return quadratic2d_map();
                });
    reg.add_map("random_poly", "random_poly(n, degree, seed)", [](std::span<const double> p) {
      if (p.size() != 3)
        throw std::invalid_argument("random_poly: expected n, degree, seed");
      return random_polynomial_map(detail::param_int(p[0], "random_poly: n"),
                                   detail::param_int(p[1], "random_poly: degree"),
                                   detail::param_seed(p[2], "random_poly: seed"));
    });
    reg.add_map("bump", "bump(n, c_1..c_n, radius, a_1..a_n)", [](std::span<const double> p) {
      if (p.empty()) throw std::invalid_argument("bump: expected n, then c, radius, a");
      const int n = detail::param_int(p[0], "bump: n");
      return detail::parse_bump(n, p.subspan(1), "bump");
    });
    reg.add_map("identity_bump", "identity_bump(n, c_1..c_n, radius, a_1..a_n)",
                [](std::span<const double> p) {
                  if (p.empty())
                    throw std::invalid_argument("identity_bump: expected n, then c, radius, a");
                  const int n = detail::param_int(p[0], "identity_bump: n");
                  return map_sum(identity_map(n),
                                 detail::parse_bump(n, p.subspan(1), "identity_bump"));
                });
    reg.add_map("linear_bump", "linear_bump(n, a_11..a_nn, c_1..c_n, radius, a_1..a_n)",
                [](std::span<const double> p) {
                  if (p.empty())
                    throw std::invalid_argument(
                        "linear_bump: expected n, n*n entries, then c, radius, a");
                  const int n = detail::param_int(p[0], "linear_bump: n");
                  if (static_cast<int>(p.size()) != 1 + n * n + 2 * n + 1)
                    throw std::invalid_argument(
                        "linear_bump: expected n, n*n entries, then c, radius, a");
                  return map_sum(linear_map(SquareMatrix(n, p.subspan(1, n * n))),
                                 detail::parse_bump(n, p.subspan(1 + n * n), "linear_bump"));
                });
    reg.add_map("affine_bump",
                "affine_bump(n, a_11..a_nn, b_1..b_n, c_1..c_n, radius, a_1..a_n)",
                [](std::span<const double> p) {
                  if (p.empty())
                    throw std::invalid_argument(
                        "affine_bump: expected n, n*n entries, n offsets, then c, radius, a");
                  const int n = detail::param_int(p[0], "affine_bump: n");
                  if (static_cast<int>(p.size()) != 1 + n * n + n + 2 * n + 1)
                    throw std::invalid_argument(
                        "affine_bump: expected n, n*n entries, n offsets, then c, radius, a");
                  return map_sum(
                      affine_map(SquareMatrix(n, p.subspan(1, n * n)), p.subspan(1 + n * n, n)),
                      detail::parse_bump(n, p.subspan(1 + n * n + n), "affine_bump"));
                });
    reg.add_map("quadratic2d_bump", "quadratic2d_bump(c_1, c_2, radius, a_1, a_2)",
                [](std::span<const double> p) {
                  if (p.size() != 5)
                    throw std::invalid_argument("quadratic2d_bump: expected c, radius, a");
                  return map_sum(quadratic2d_map(), detail::parse_bump(2, p, "quadratic2d_bump"));
                });
    reg.add_map("random_poly_bump",
                "random_poly_bump(n, degree, seed, c_1..c_n, radius, a_1..a_n)",
                [](std::span<const double> p) {
                  if (p.size() < 3)
                    throw std::invalid_argument(
                        "random_poly_bump: expected n, degree, seed, then c, radius, a");
                  const int n = detail::param_int(p[0], "random_poly_bump: n");
                  return map_sum(
                      random_polynomial_map(n, detail::param_int(p[1], "random_poly_bump: degree"),
                                            detail::param_seed(p[2], "random_poly_bump: seed")),
                      detail::parse_bump(n, p.subspan(3), "random_poly_bump"));
                });

    return reg;
  }

 private:
  struct DomainEntry {
    std::string signature;
    DomainFactory factory;
  };
  struct MapEntry {
    std::string signature;
    MapFactory factory;
  };

  std::map<std::string, DomainEntry> domains_;
  std::map<std::string, MapEntry> maps_;
};

}  // namespace detint
