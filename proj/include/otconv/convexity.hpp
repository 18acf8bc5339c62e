#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "curve.hpp"
#include "errors.hpp"
#include "functional.hpp"
#include "measure.hpp"
#include "sampler.hpp"
#include "transport.hpp"

namespace otconv {

/// Default absolute tolerance on convexity slacks.
inline constexpr double kSlackTolerance = 1e-9;

enum class Verdict { Satisfied, Violated, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Satisfied: return "Satisfied";
    case Verdict::Violated: return "Violated";
    default: return "Inconclusive";
  }
}

/// Location of the worst slack found by a check.
struct Witness {
  std::string description;
  std::optional<double> t;
  std::optional<std::array<double, 3>> t_triple;
};

/// Outcome of a convexity or monotonicity check. The verdict is Violated
/// exactly when worst_slack < -tolerance, and a witness is recorded whenever
/// a worst location exists.
struct ConvexityReport {
  Verdict verdict = Verdict::Satisfied;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::optional<Witness> witness;
  std::int64_t checks_run = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline void record_slack(ConvexityReport& report, double slack, Witness witness) {
  if (slack < report.worst_slack) {
    report.worst_slack = slack;
    report.witness = std::move(witness);
  }
  ++report.checks_run;
}

inline void finalize(ConvexityReport& report, double tol) {
  report.verdict =
      report.worst_slack < -tol ? Verdict::Violated : Verdict::Satisfied;
}

/// Fold `other` into `report`, keeping the most negative slack.
inline void merge_min_slack(ConvexityReport& report, const ConvexityReport& other) {
  if (other.worst_slack < report.worst_slack) {
    report.worst_slack = other.worst_slack;
    report.witness = other.witness;
  }
  report.checks_run += other.checks_run;
  if (other.verdict == Verdict::Violated) report.verdict = Verdict::Violated;
}

}  // namespace detail

/// Check lambda-convexity of F along a curve on a uniform grid. Two families
/// of inequalities are tested with the curve's own cost term:
///   (a) the endpoint chord, F(mu_t) <= (1-t)F(mu_0) + tF(mu_1)
///                                       - (lambda/2) t(1-t) plan_cost;
///   (b) local midpoint convexity over consecutive grid triples,
///       F(mu_mid) <= (F(mu_t1) + F(mu_t3))/2 - (lambda/8)(t3-t1)^2 plan_cost.
/// Chord checks use the exact endpoint values, never interpolated ones.
inline ConvexityReport check_convex_along_curve(const Functional& functional,
                                                const AccelerationFreeCurve& curve,
                                                double lambda, int grid_size = 101,
                                                double tol = kSlackTolerance) {
  if (grid_size < 3) throw OutOfRange("grid_size must be at least 3");
  const std::size_t grid = static_cast<std::size_t>(grid_size);
  const double cost = curve.plan_cost();

  std::vector<double> ts(grid), values(grid);
  for (std::size_t k = 0; k < grid; ++k) {
    ts[k] = static_cast<double>(k) / static_cast<double>(grid - 1);
    values[k] = functional.evaluate(eval(curve, ts[k]));
  }
  const double left = values.front(), right = values.back();

  ConvexityReport report;
  for (std::size_t k = 0; k < grid; ++k) {
    const double t = ts[k];
    const double bound =
        (1.0 - t) * left + t * right - 0.5 * lambda * t * (1.0 - t) * cost;
    detail::record_slack(report, bound - values[k],
                         {functional.name + " chord inequality", t, std::nullopt});
  }
  for (std::size_t k = 1; k + 1 < grid; ++k) {
    const double width = ts[k + 1] - ts[k - 1];
    const double bound = 0.5 * (values[k - 1] + values[k + 1]) -
                         0.125 * lambda * width * width * cost;
    detail::record_slack(report, bound - values[k],
                         {functional.name + " midpoint inequality", ts[k],
                          std::array<double, 3>{ts[k - 1], ts[k], ts[k + 1]}});
  }
  detail::finalize(report, tol);
  return report;
}

/// First-order criterion: integral of
/// (grad F[mu2](x2) - grad F[mu1](x1)) . (x2 - x1) against an optimal plan,
/// compared with lambda * W2^2(mu1, mu2).
inline ConvexityReport check_displacement_monotonicity(
    const Functional& functional, const DiscreteMeasure& mu1,
    const DiscreteMeasure& mu2, double lambda, double tol = kSlackTolerance) {
  if (!functional.has_gradient())
    throw GradientUnavailable(functional.name + " exposes no gradient");
  const W2Solution sol = solve_w2(mu1, mu2);

  double lhs = 0.0;
  for (const PlanEntry& e : sol.plan.entries()) {
    const Point& x = mu1.atom(e.source_index);
    const Point& y = mu2.atom(e.target_index);
    const Point gx = functional.gradient(mu1, e.source_index);
    const Point gy = functional.gradient(mu2, e.target_index);
    double dot_term = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c)
      dot_term += (gy[c] - gx[c]) * (y[c] - x[c]);
    lhs += e.mass * dot_term;
  }

  ConvexityReport report;
  detail::record_slack(report, lhs - lambda * sol.cost,
                       {functional.name + " displacement monotonicity",
                        std::nullopt, std::nullopt});
  detail::finalize(report, tol);
  return report;
}

/// d/dt F(mu_t) = sum_k theta_k grad F[mu_t](z_k t + w_k) . z_k. When
/// particles coincide at t, the merged atom's gradient is applied to each
/// coincident particle separately: the formula integrates against the plan,
/// not against mu_t.
inline double derivative_along_curve(const Functional& functional,
                                     const AccelerationFreeCurve& curve, double t) {
  if (!functional.has_gradient())
    throw GradientUnavailable(functional.name + " exposes no gradient");
  const DiscreteMeasure mu_t = eval(curve, t);
  double result = 0.0;
  for (const Particle& p : curve.particles()) {
    const Point position = line_at(p.start, p.displacement, t);
    const Point g = functional.gradient(mu_t, mu_t.nearest_atom(position));
    result += p.mass * dot(g, p.displacement);
  }
  return result;
}

/// Central-difference proxy for the Hessian quadratic form along the curve:
/// (F(mu_{t+h}) - 2 F(mu_t) + F(mu_{t-h})) / h^2.
inline double second_derivative_fd(const Functional& functional,
                                   const AccelerationFreeCurve& curve, double t,
                                   double h = 1e-3) {
  if (!(h > 0.0) || t - h < 0.0 || t + h > 1.0)
    throw OutOfRange("finite-difference stencil leaves [0,1]");
  const double fm = functional.evaluate(eval(curve, t - h));
  const double f0 = functional.evaluate(eval(curve, t));
  const double fp = functional.evaluate(eval(curve, t + h));
  return (fp - 2.0 * f0 + fm) / (h * h);
}

/// Maximum gap between the closed-form derivative and a central finite
/// difference over interior grid points, skipping points within 1e-3 of a
/// crossing time where one-sided limits may differ for non-smooth
/// functionals.
inline double gradient_consistency(const Functional& functional,
                                   const AccelerationFreeCurve& curve,
                                   int grid_size, double h = 1e-5) {
  if (!functional.has_gradient())
    throw GradientUnavailable(functional.name + " exposes no gradient");
  if (grid_size < 1 || !(h > 0.0))
    throw OutOfRange("grid_size and h must be positive");
  const std::vector<double> crossings = crossing_times(curve);
  double worst = 0.0;
  for (int k = 1; k <= grid_size; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(grid_size + 1);
    if (t - h < 0.0 || t + h > 1.0) continue;
    bool near_crossing = false;
    for (double q : crossings)
      if (std::abs(t - q) < 1e-3) {
        near_crossing = true;
        break;
      }
    if (near_crossing) continue;
    const double fd = (functional.evaluate(eval(curve, t + h)) -
                       functional.evaluate(eval(curve, t - h))) /
                      (2.0 * h);
    worst = std::max(worst,
                     std::abs(derivative_along_curve(functional, curve, t) - fd));
  }
  return worst;
}

/// Displacement monotonicity over sampled measure pairs, merged by the most
/// negative slack.
inline ConvexityReport check_displacement_monotonicity_sampled(
    const Functional& functional, double lambda, const SamplerConfig& config,
    int budget, double tol = kSlackTolerance) {
  if (budget < 1) throw OutOfRange("budget must be at least 1");
  if (!functional.has_gradient())
    throw GradientUnavailable(functional.name + " exposes no gradient");
  ConvexityReport report;
  report.seed = config.seed;
  for (int sample = 0; sample < budget; ++sample) {
    SampleRng rng(derive_seed(config.seed, static_cast<std::uint64_t>(sample)));
    const int dim = rng.uniform_int(config.min_dim, config.max_dim);
    const DiscreteMeasure mu1 =
        random_measure(rng, rng.uniform_int(config.min_atoms, config.max_atoms),
                       dim, config.coord_range);
    const DiscreteMeasure mu2 =
        random_measure(rng, rng.uniform_int(config.min_atoms, config.max_atoms),
                       dim, config.coord_range);
    detail::merge_min_slack(
        report, check_displacement_monotonicity(functional, mu1, mu2, lambda, tol));
  }
  detail::finalize(report, tol);
  return report;
}

/// Aggregated verdicts of the chord checks over the three curve families of
/// the three-way equivalence. For a differentiable functional all three agree;
/// geodesics Satisfied with plan curves Violated flags a non-differentiability
/// witness.
struct EquivalenceReport {
  ConvexityReport geodesics;       // curves from optimal plans
  ConvexityReport generalized;     // generalized geodesics from random anchors
  ConvexityReport plan_curves;     // curves from random feasible plans
  std::uint64_t seed = 0;
  int budget = 0;

  bool verdicts_agree() const {
    return geodesics.verdict == generalized.verdict &&
           generalized.verdict == plan_curves.verdict;
  }

  bool suggests_nondifferentiable() const {
    return geodesics.verdict == Verdict::Satisfied &&
           plan_curves.verdict == Verdict::Violated;
  }

  ConvexityReport combined() const {
    ConvexityReport all;
    detail::merge_min_slack(all, geodesics);
    detail::merge_min_slack(all, generalized);
    detail::merge_min_slack(all, plan_curves);
    all.seed = seed;
    return all;
  }
};

/// Sample random measure pairs and plans and run the chord check along
/// (a) geodesics, (b) generalized geodesics from random third anchors, and
/// (c) acceleration-free curves from random non-optimal plans. Per-sample
/// seeds derive from config.seed, so reports replay exactly. When
/// config.include_paper_pair is set, sample 0 is the tent-kernel crossing
/// configuration (dimension 1) instead of a random draw.
inline EquivalenceReport check_equivalence_suite(const Functional& functional,
                                                 double lambda,
                                                 const SamplerConfig& config,
                                                 int budget, int grid_size = 101,
                                                 double tol = kSlackTolerance) {
  if (budget < 1) throw OutOfRange("budget must be at least 1");
  EquivalenceReport suite;
  suite.seed = config.seed;
  suite.budget = budget;
  suite.geodesics.seed = config.seed;
  suite.generalized.seed = config.seed;
  suite.plan_curves.seed = config.seed;

  for (int sample = 0; sample < budget; ++sample) {
    SampleRng rng(derive_seed(config.seed, static_cast<std::uint64_t>(sample)));

    DiscreteMeasure mu1 = [&] {
      if (sample == 0 && config.include_paper_pair) {
        const double e = config.pair_eps;
        return DiscreteMeasure({{e}, {0.0}}, {0.5, 0.5});
      }
      const int dim = rng.uniform_int(config.min_dim, config.max_dim);
      return random_measure(rng, rng.uniform_int(config.min_atoms, config.max_atoms),
                            dim, config.coord_range);
    }();
    DiscreteMeasure mu2 = [&] {
      if (sample == 0 && config.include_paper_pair) {
        const double e = config.pair_eps;
        return DiscreteMeasure({{0.0}, {e}}, {0.5, 0.5});
      }
      return random_measure(rng, rng.uniform_int(config.min_atoms, config.max_atoms),
                            mu1.dim(), config.coord_range);
    }();

    const AccelerationFreeCurve geo = geodesic(mu1, mu2);
    detail::merge_min_slack(
        suite.geodesics,
        check_convex_along_curve(functional, geo, lambda, grid_size, tol));

    const DiscreteMeasure anchor =
        random_measure(rng, rng.uniform_int(config.min_atoms, config.max_atoms),
                       mu1.dim(), config.coord_range);
    detail::merge_min_slack(
        suite.generalized,
        check_convex_along_curve(functional,
                                 generalized_geodesic(anchor, mu1, mu2), lambda,
                                 grid_size, tol));

    const TransportPlan plan = [&] {
      if (sample == 0 && config.include_paper_pair) {
        // Pair x -> y = eps -> 0 and x' -> y' = 0 -> eps: the crossing plan.
        return TransportPlan(mu1, mu2, {{0, 0, 0.5}, {1, 1, 0.5}});
      }
      return random_feasible_plan(rng, mu1, mu2);
    }();
    detail::merge_min_slack(
        suite.plan_curves,
        check_convex_along_curve(functional, curve_from_plan(plan), lambda,
                                 grid_size, tol));
  }

  detail::finalize(suite.geodesics, tol);
  detail::finalize(suite.generalized, tol);
  detail::finalize(suite.plan_curves, tol);
  return suite;
}

}  // namespace otconv
