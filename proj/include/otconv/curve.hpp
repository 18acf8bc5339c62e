#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "measure.hpp"
#include "transport.hpp"

namespace otconv {

/// Candidate crossing times are accepted when all components of the two
/// particle lines agree this closely.
inline constexpr double kCrossingTolerance = 1e-9;
/// Verified radii below this bound signal numerical degeneracy.
inline constexpr double kMinRadius = 1e-9;

enum class CurveKind { FromPlan, Geodesic, GeneralizedGeodesic };

enum class Direction { Forward, Backward };

/// Straight-line particle: position w + t*z carrying mass theta.
struct Particle {
  Point start;         // w
  Point displacement;  // z
  double mass = 0.0;   // theta
};

/// Particle representation of t -> ((1-t) pi^1 + t pi^2)_# gamma. The kind is
/// Geodesic only when the generating plan passed an optimality certificate;
/// use the factories below rather than assembling particles by hand.
class AccelerationFreeCurve {
 public:
  AccelerationFreeCurve(int dim, std::vector<Particle> particles, CurveKind kind)
      : dim_(dim), kind_(kind) {
    // Particles sharing both start and displacement trace the same line for
    // every t; fold them together. Particles that merely coincide at one
    // instant are kept apart, they separate again.
    for (Particle& p : particles) {
      if (static_cast<int>(p.start.size()) != dim_ ||
          static_cast<int>(p.displacement.size()) != dim_)
        throw DimensionMismatch("particle dimension does not match curve");
      bool merged = false;
      for (Particle& q : particles_) {
        if (distance(p.start, q.start) <= kMergeTolerance &&
            distance(p.displacement, q.displacement) <= kMergeTolerance) {
          q.mass += p.mass;
          merged = true;
          break;
        }
      }
      if (!merged) particles_.push_back(std::move(p));
    }

    double total = 0.0;
    for (const Particle& p : particles_) {
      if (!(p.mass > 0.0)) throw InvalidPlan("particle mass must be positive");
      total += p.mass;
      plan_cost_ += p.mass * squared_norm(p.displacement);
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw InvalidTotalMass("particle masses sum to " + std::to_string(total));
  }

  int dim() const { return dim_; }
  const std::vector<Particle>& particles() const { return particles_; }
  CurveKind kind() const { return kind_; }
  /// Cost of the generating plan, sum theta_k |z_k|^2.
  double plan_cost() const { return plan_cost_; }

 private:
  int dim_ = 0;
  std::vector<Particle> particles_;
  CurveKind kind_ = CurveKind::FromPlan;
  double plan_cost_ = 0.0;
};

/// One particle per plan entry: w = x_i, z = y_j - x_i, theta = mass. When
/// certify_optimal is set, a full-length cyclical-monotonicity certificate is
/// run and a passing plan upgrades the curve to Geodesic kind.
inline AccelerationFreeCurve curve_from_plan(const TransportPlan& plan,
                                             bool certify_optimal = false) {
  std::vector<Particle> particles;
  particles.reserve(plan.entries().size());
  for (const PlanEntry& e : plan.entries()) {
    const Point& x = plan.source().atom(e.source_index);
    const Point& y = plan.target().atom(e.target_index);
    particles.push_back({x, subtract(y, x), e.mass});
  }
  CurveKind kind = CurveKind::FromPlan;
  if (certify_optimal && is_cyclically_monotone(plan, plan.support_size()))
    kind = CurveKind::Geodesic;
  return AccelerationFreeCurve(plan.source().dim(), std::move(particles), kind);
}

/// Geodesic between mu and nu from a solver plan; the simplex already
/// re-verified optimality through its reduced-cost certificate.
inline AccelerationFreeCurve geodesic(const DiscreteMeasure& mu,
                                      const DiscreteMeasure& nu) {
  const W2Solution sol = solve_w2(mu, nu);
  std::vector<Particle> particles;
  particles.reserve(sol.plan.entries().size());
  for (const PlanEntry& e : sol.plan.entries()) {
    const Point& x = sol.plan.source().atom(e.source_index);
    const Point& y = sol.plan.target().atom(e.target_index);
    particles.push_back({x, subtract(y, x), e.mass});
  }
  return AccelerationFreeCurve(mu.dim(), std::move(particles), CurveKind::Geodesic);
}

/// Measure at time t; coincident particle positions merge into single atoms.
inline DiscreteMeasure eval(const AccelerationFreeCurve& curve, double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw OutOfRange("curve parameter " + std::to_string(t) + " outside [0,1]");
  std::vector<Point> points;
  std::vector<double> weights;
  points.reserve(curve.particles().size());
  weights.reserve(curve.particles().size());
  for (const Particle& p : curve.particles()) {
    points.push_back(line_at(p.start, p.displacement, t));
    weights.push_back(p.mass);
  }
  return DiscreteMeasure(std::move(points), std::move(weights));
}

/// All t in [0,1] at which two distinct particle lines coincide, sorted and
/// deduplicated. The candidate is solved from the largest-magnitude component
/// of z_p - z_q to limit cancellation, then accepted only if every component
/// agrees within tolerance.
inline std::vector<double> crossing_times(const AccelerationFreeCurve& curve) {
  const auto& particles = curve.particles();
  std::vector<double> times;
  for (std::size_t p = 0; p + 1 < particles.size(); ++p) {
    for (std::size_t q = p + 1; q < particles.size(); ++q) {
      const Point dz = subtract(particles[p].displacement, particles[q].displacement);
      std::size_t pivot = 0;
      for (std::size_t c = 1; c < dz.size(); ++c)
        if (std::abs(dz[c]) > std::abs(dz[pivot])) pivot = c;
      if (dz[pivot] == 0.0) continue;  // parallel lines never cross
      double t = (particles[q].start[pivot] - particles[p].start[pivot]) / dz[pivot];
      if (std::abs(t) <= kMergeTolerance) t = 0.0;
      if (std::abs(t - 1.0) <= kMergeTolerance) t = 1.0;
      if (t < 0.0 || t > 1.0) continue;
      const Point at_p = line_at(particles[p].start, particles[p].displacement, t);
      const Point at_q = line_at(particles[q].start, particles[q].displacement, t);
      bool agree = true;
      for (std::size_t c = 0; c < at_p.size() && agree; ++c)
        agree = std::abs(at_p[c] - at_q[c]) <= kCrossingTolerance;
      if (agree) times.push_back(t);
    }
  }
  std::sort(times.begin(), times.end());
  std::vector<double> unique;
  for (double t : times)
    if (unique.empty() || t - unique.back() > kMergeTolerance) unique.push_back(t);
  return unique;
}

/// True iff the restriction of the curve to [s, r] travels at the linear
/// speed of Wasserstein geodesics: W2(mu_s, mu_r) = (r-s) sqrt(plan_cost),
/// with the same identity re-checked at the midpoint against both endpoints.
inline bool restriction_is_geodesic(const AccelerationFreeCurve& curve, double s,
                                    double r) {
  if (!(0.0 <= s && s < r && r <= 1.0))
    throw OutOfRange("restriction interval must satisfy 0 <= s < r <= 1");
  const double speed = std::sqrt(std::max(curve.plan_cost(), 0.0));
  const auto matches = [](double w2, double expected) {
    return std::abs(w2 - expected) <= std::max(1e-7 * expected, 1e-12);
  };
  const DiscreteMeasure at_s = eval(curve, s);
  const DiscreteMeasure at_r = eval(curve, r);
  if (!matches(solve_w2(at_s, at_r).w2, (r - s) * speed)) return false;
  const double mid = 0.5 * (s + r);
  const DiscreteMeasure at_mid = eval(curve, mid);
  return matches(solve_w2(at_s, at_mid).w2, (mid - s) * speed) &&
         matches(solve_w2(at_mid, at_r).w2, (r - mid) * speed);
}

/// A certified radius eps > 0 such that the curve restricted to [s, s+eps]
/// (or [s-eps, s]) is a geodesic: half the distance to the next crossing time
/// strictly beyond s (or the interval endpoint), verified by
/// restriction_is_geodesic and halved further while verification fails. This
/// is a lower bound for the maximal radius; crossings need not break
/// optimality, and in dimension two or higher optimality can also fail before
/// the first crossing, which the verification loop absorbs.
inline double local_geodesic_radius(const AccelerationFreeCurve& curve, double s,
                                    Direction direction) {
  const bool forward = direction == Direction::Forward;
  if (forward && !(0.0 <= s && s < 1.0))
    throw OutOfRange("forward radius requires 0 <= s < 1");
  if (!forward && !(0.0 < s && s <= 1.0))
    throw OutOfRange("backward radius requires 0 < s <= 1");

  const std::vector<double> times = crossing_times(curve);
  double gap;
  if (forward) {
    gap = 1.0 - s;
    for (double q : times)
      if (q > s + kMergeTolerance) {
        gap = q - s;
        break;
      }
  } else {
    gap = s;
    for (auto it = times.rbegin(); it != times.rend(); ++it)
      if (*it < s - kMergeTolerance) {
        gap = s - *it;
        break;
      }
  }

  for (double eps = 0.5 * gap; eps >= kMinRadius; eps *= 0.5) {
    const bool verified = forward ? restriction_is_geodesic(curve, s, s + eps)
                                  : restriction_is_geodesic(curve, s - eps, s);
    if (verified) return eps;
  }
  throw NoRadius("no geodesic radius verified at " + std::to_string(s));
}

/// Generalized geodesic from mu2 to mu3 with base mu1: glue the optimal plans
/// mu1->mu2 and mu1->mu3 and follow the x2 -> x3 lines.
inline AccelerationFreeCurve generalized_geodesic(const DiscreteMeasure& mu1,
                                                  const DiscreteMeasure& mu2,
                                                  const DiscreteMeasure& mu3) {
  if (mu1.dim() != mu2.dim() || mu1.dim() != mu3.dim())
    throw DimensionMismatch("measures live in different dimensions");
  const ThreePlan glued =
      glue_plans(solve_w2(mu1, mu2).plan, solve_w2(mu1, mu3).plan);
  std::vector<Particle> particles;
  particles.reserve(glued.entries().size());
  for (const ThreePlanEntry& e : glued.entries())
    particles.push_back({e.x2, subtract(e.x3, e.x2), e.mass});
  return AccelerationFreeCurve(mu1.dim(), std::move(particles),
                               CurveKind::GeneralizedGeodesic);
}

}  // namespace otconv
