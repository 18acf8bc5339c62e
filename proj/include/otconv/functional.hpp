#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "errors.hpp"
#include "geometry.hpp"
#include "measure.hpp"

namespace otconv {

/// Evaluation interface for F: P_2(R^d) -> R. The gradient, when present,
/// returns the Wasserstein gradient of F at atom i of the measure; leave it
/// empty for non-differentiable functionals.
struct Functional {
  std::string name;
  std::function<double(const DiscreteMeasure&)> evaluate;
  std::function<Point(const DiscreteMeasure&, std::size_t)> gradient;
  std::optional<double> claimed_lambda;

  bool has_gradient() const { return static_cast<bool>(gradient); }
};

/// Symmetric pairwise kernel w(x, y); grad_w is the derivative in the first
/// argument and may be empty.
struct Kernel {
  std::string name;
  std::function<double(const Point&, const Point&)> w;
  std::function<Point(const Point&, const Point&)> grad_w;
};

/// McCann potential energy: F(mu) = sum a_i V(x_i).
inline Functional potential_energy(std::function<double(const Point&)> V,
                                   std::function<Point(const Point&)> grad_V = {},
                                   std::string name = "potential") {
  Functional f;
  f.name = std::move(name);
  f.evaluate = [V = std::move(V)](const DiscreteMeasure& mu) {
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) s += mu.weight(i) * V(mu.atom(i));
    return s;
  };
  if (grad_V)
    f.gradient = [grad_V = std::move(grad_V)](const DiscreteMeasure& mu,
                                              std::size_t i) {
      return grad_V(mu.atom(i));
    };
  return f;
}

/// Interaction energy: F(mu) = sum_i sum_j a_i a_j w(x_i, x_j). The double
/// sum keeps the diagonal i = j terms; dropping them would change the value
/// on measures whose atoms merge along a curve.
inline Functional interaction_energy(Kernel kernel) {
  Functional f;
  f.name = kernel.name.empty() ? "interaction" : kernel.name;
  f.evaluate = [w = kernel.w](const DiscreteMeasure& mu) {
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
      for (std::size_t j = 0; j < mu.size(); ++j)
        s += mu.weight(i) * mu.weight(j) * w(mu.atom(i), mu.atom(j));
    return s;
  };
  if (kernel.grad_w)
    f.gradient = [grad_w = kernel.grad_w](const DiscreteMeasure& mu,
                                          std::size_t i) {
      Point g(mu.atom(i).size(), 0.0);
      for (std::size_t j = 0; j < mu.size(); ++j) {
        const Point gj = grad_w(mu.atom(i), mu.atom(j));
        for (std::size_t c = 0; c < g.size(); ++c) g[c] += 2.0 * mu.weight(j) * gj[c];
      }
      return g;
    };
  return f;
}

/// Tent kernel w_eps(x, y) = eps - |x-y| inside |x-y| <= eps, zero outside.
/// Continuous, bounded, and not differentiable; no gradient is exposed.
inline Kernel w_epsilon_kernel(double eps) {
  if (!(eps > 0.0))
    throw NonpositiveEpsilon("kernel width must be positive, got " +
                             std::to_string(eps));
  Kernel k;
  k.name = "weps";
  k.w = [eps](const Point& x, const Point& y) {
    const double d = distance(x, y);
    return d <= eps ? eps - d : 0.0;
  };
  return k;
}

/// Smooth bounded kernel exp(-|x-y|^2). Its interaction energy is lambda-convex
/// along acceleration-free curves for lambda = -4.
inline Kernel gaussian_kernel() {
  Kernel k;
  k.name = "gauss";
  k.w = [](const Point& x, const Point& y) {
    return std::exp(-squared_distance(x, y));
  };
  k.grad_w = [](const Point& x, const Point& y) {
    const double e = std::exp(-squared_distance(x, y));
    Point g(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) g[c] = -2.0 * (x[c] - y[c]) * e;
    return g;
  };
  return k;
}

/// F(mu) = integral of |x|^2; 2-convex along acceleration-free curves with
/// exact equality.
inline Functional second_moment_functional() {
  Functional f;
  f.name = "second-moment";
  f.evaluate = [](const DiscreteMeasure& mu) { return second_moment(mu); };
  f.gradient = [](const DiscreteMeasure& mu, std::size_t i) {
    Point g = mu.atom(i);
    for (double& c : g) c *= 2.0;
    return g;
  };
  f.claimed_lambda = 2.0;
  return f;
}

/// mu -> F(mu) - (lambda/2) * second_moment(mu). Zero-convexity of the result
/// along a curve family is equivalent to lambda-convexity of F along it.
inline Functional shift_lambda(const Functional& f, double lambda) {
  Functional shifted;
  shifted.name = f.name + "-shifted";
  shifted.evaluate = [inner = f.evaluate, lambda](const DiscreteMeasure& mu) {
    return inner(mu) - 0.5 * lambda * second_moment(mu);
  };
  if (f.gradient)
    shifted.gradient = [inner = f.gradient, lambda](const DiscreteMeasure& mu,
                                                    std::size_t i) {
      Point g = inner(mu, i);
      for (std::size_t c = 0; c < g.size(); ++c) g[c] -= lambda * mu.atom(i)[c];
      return g;
    };
  if (f.claimed_lambda) shifted.claimed_lambda = *f.claimed_lambda - lambda;
  return shifted;
}

}  // namespace otconv
