#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "detint/jet.hpp"
#include "detint/smallmat.hpp"

namespace detint {

enum class Smoothness { C1, C2, CInf };

/// A map R^n -> R^m whose components are written once, generically over the
/// scalar type, and evaluated over plain doubles, Jet1, or Jet2. Because all
/// three paths instantiate the same component code, the value parts of a jet
/// evaluation are bit-identical to the plain evaluation.
class SmoothMap {
 public:
  SmoothMap() = default;

  /// `fn` must be callable as fn(std::span<const S>) -> std::vector<S> for
  /// S in {double, Jet1, Jet2} (a generic lambda fits).
  template <class F>
  static SmoothMap make(std::string name, int dim_in, int dim_out, Smoothness cls, F fn) {
    SmoothMap m = make_c1(std::move(name), dim_in, dim_out, cls, fn);
    m.jet2_ = [fn](std::span<const Jet2> x) { return fn(x); };
    return m;
  }

  /// Variant without a second-order path, for components whose code cannot
  /// run on Jet2 scalars. Consumers needing second derivatives reject it.
  template <class F>
  static SmoothMap make_c1(std::string name, int dim_in, int dim_out, Smoothness cls, F fn) {
    SmoothMap m;
    m.name_ = std::move(name);
    m.dim_in_ = dim_in;
    m.dim_out_ = dim_out;
    m.smoothness_ = cls;
    m.real_ = [fn](std::span<const double> x) { return fn(x); };
    m.jet1_ = [fn](std::span<const Jet1> x) { return fn(x); };
    return m;
  }

  const std::string& name() const { return name_; }
  int dim_in() const { return dim_in_; }
  int dim_out() const { return dim_out_; }
  Smoothness smoothness() const { return smoothness_; }
  bool jet2_capable() const { return static_cast<bool>(jet2_); }
  bool valid() const { return static_cast<bool>(real_); }

  /// True if any ingredient is a compactly supported bump; integrators use
  /// this to pick a finer default quadrature order.
  bool has_bump() const { return has_bump_; }
  SmoothMap& mark_bump() {
    has_bump_ = true;
    return *this;
  }

  std::vector<double> eval(std::span<const double> x) const {
    check_input(x.size());
    return real_(x);
  }
  std::vector<Jet1> eval(std::span<const Jet1> x) const {
    check_input(x.size());
    return jet1_(x);
  }
  std::vector<Jet2> eval(std::span<const Jet2> x) const {
    check_input(x.size());
    if (!jet2_)
      throw std::logic_error("SmoothMap '" + name_ + "' has no second-order evaluation path");
    return jet2_(x);
  }

 private:
  void check_input(std::size_t got) const {
    if (!real_) throw std::logic_error("SmoothMap: evaluating a default-constructed map");
    if (static_cast<int>(got) != dim_in_)
      throw std::invalid_argument("SmoothMap '" + name_ + "': wrong input dimension");
  }

  std::string name_;
  int dim_in_ = 0;
  int dim_out_ = 0;
  Smoothness smoothness_ = Smoothness::CInf;
  bool has_bump_ = false;
  std::function<std::vector<double>(std::span<const double>)> real_;
  std::function<std::vector<Jet1>(std::span<const Jet1>)> jet1_;
  std::function<std::vector<Jet2>(std::span<const Jet2>)> jet2_;
};

/// One scalar component of a map, for assembling mixed Jacobians.
struct MapComponent {
  SmoothMap map;
  int component = 0;
};

/// Jacobian of an n -> n map at x: row i is the gradient of component i.
inline SquareMatrix jacobian(const SmoothMap& f, std::span<const double> x) {
  if (f.dim_in() != f.dim_out())
    throw std::invalid_argument("jacobian: map must have square Jacobian (n -> n)");
  const int n = f.dim_in();
  const auto jets = f.eval(std::span<const Jet1>(seed_jet1(x)));
  SquareMatrix jac(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double g = jets[i].grad(j);
      if (!std::isfinite(g))
        throw evaluation_error("jacobian: non-finite derivative in map '" + f.name() + "'");
      jac(i, j) = g;
    }
  return jac;
}

/// Jacobian of an m -> k map (rows = components, cols = input axes). Used for
/// boundary-chart Jacobians, where it is n x (n-1).
inline RectMatrix jacobian_rect(const SmoothMap& f, std::span<const double> x) {
  const auto jets = f.eval(std::span<const Jet1>(seed_jet1(x)));
  RectMatrix jac(f.dim_out(), f.dim_in());
  for (int i = 0; i < f.dim_out(); ++i)
    for (int j = 0; j < f.dim_in(); ++j) jac(i, j) = jets[i].grad(j);
  return jac;
}

}  // namespace detint
