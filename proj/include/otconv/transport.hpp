#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "measure.hpp"

namespace otconv {

/// Row/column sums of a plan must match the marginals this closely.
inline constexpr double kMarginalTolerance = 1e-9;
/// Entries at or below this mass are dropped from emitted plans.
inline constexpr double kMassFloor = 1e-15;
/// Slack allowed when testing cycle inequalities and optimality certificates.
inline constexpr double kCycleSlack = 1e-9;

struct PlanEntry {
  std::size_t source_index = 0;
  std::size_t target_index = 0;
  double mass = 0.0;
};

/// Coupling between two discrete measures with prescribed marginals.
class TransportPlan {
 public:
  TransportPlan(DiscreteMeasure source, DiscreteMeasure target,
                std::vector<PlanEntry> entries)
      : source_(std::move(source)),
        target_(std::move(target)),
        entries_(std::move(entries)) {
    if (source_.dim() != target_.dim())
      throw DimensionMismatch("plan marginals live in different dimensions");

    std::vector<double> row(source_.size(), 0.0), col(target_.size(), 0.0);
    std::vector<char> seen(source_.size() * target_.size(), 0);
    for (const PlanEntry& e : entries_) {
      if (e.source_index >= source_.size() || e.target_index >= target_.size())
        throw InvalidPlan("plan entry index out of range");
      if (!(e.mass > 0.0)) throw InvalidPlan("plan entry mass must be positive");
      char& flag = seen[e.source_index * target_.size() + e.target_index];
      if (flag) throw InvalidPlan("duplicate plan entry");
      flag = 1;
      row[e.source_index] += e.mass;
      col[e.target_index] += e.mass;
    }
    for (std::size_t i = 0; i < source_.size(); ++i)
      if (std::abs(row[i] - source_.weight(i)) > kMarginalTolerance)
        throw InvalidPlan("row sums do not match the source marginal");
    for (std::size_t j = 0; j < target_.size(); ++j)
      if (std::abs(col[j] - target_.weight(j)) > kMarginalTolerance)
        throw InvalidPlan("column sums do not match the target marginal");
  }

  const DiscreteMeasure& source() const { return source_; }
  const DiscreteMeasure& target() const { return target_; }
  const std::vector<PlanEntry>& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }

 private:
  DiscreteMeasure source_;
  DiscreteMeasure target_;
  std::vector<PlanEntry> entries_;
};

/// Quadratic transport cost of a plan.
inline double transport_cost(const TransportPlan& plan) {
  double cost = 0.0;
  for (const PlanEntry& e : plan.entries())
    cost += e.mass * squared_distance(plan.source().atom(e.source_index),
                                      plan.target().atom(e.target_index));
  return cost;
}

/// Plan that keeps every atom of mu in place.
inline TransportPlan identity_plan(const DiscreteMeasure& mu) {
  std::vector<PlanEntry> entries;
  entries.reserve(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    entries.push_back({i, i, mu.weight(i)});
  return TransportPlan(mu, mu, std::move(entries));
}

struct W2Solution {
  TransportPlan plan;
  double w2 = 0.0;
  double cost = 0.0;
};

namespace detail {

// State of the transportation simplex over the dense bipartite cost matrix.
// Nodes 0..n-1 are source rows, n..n+m-1 are target columns; the basis is a
// spanning tree with n+m-1 cells.
class TransportationSimplex {
 public:
  TransportationSimplex(const DiscreteMeasure& mu, const DiscreteMeasure& nu)
      : n_(mu.size()), m_(nu.size()), cost_(n_ * m_), basic_mass_(n_ * m_, 0.0),
        is_basic_(n_ * m_, 0) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < m_; ++j)
        cost_[i * m_ + j] = squared_distance(mu.atom(i), nu.atom(j));
    scale_ = 1.0;
    for (double c : cost_) scale_ = std::max(scale_, std::abs(c));
    northwest_corner(mu.weights(), nu.weights());
  }

  void run() {
    const double enter_tol = 1e-12 * scale_;
    const std::size_t max_iters = 1000 * (n_ * m_ + n_ + m_) + 1000;
    std::vector<double> u(n_), v(m_);
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
      compute_potentials(u, v);
      // Bland's rule: first cell in row-major order with negative reduced cost.
      std::size_t enter_i = n_, enter_j = m_;
      for (std::size_t i = 0; i < n_ && enter_i == n_; ++i)
        for (std::size_t j = 0; j < m_; ++j) {
          if (is_basic_[i * m_ + j]) continue;
          if (cost_[i * m_ + j] - u[i] - v[j] < -enter_tol) {
            enter_i = i;
            enter_j = j;
            break;
          }
        }
      if (enter_i == n_) return;  // optimal
      pivot(enter_i, enter_j);
    }
    throw SolverFailure("transportation simplex did not converge");
  }

  // Certificate: all reduced costs nonnegative up to tolerance.
  double min_reduced_cost() const {
    std::vector<double> u(n_), v(m_);
    compute_potentials(u, v);
    double worst = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < m_; ++j)
        worst = std::min(worst, cost_[i * m_ + j] - u[i] - v[j]);
    return worst;
  }

  std::vector<PlanEntry> emit_entries() const {
    std::vector<PlanEntry> entries;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < m_; ++j)
        if (is_basic_[i * m_ + j] && basic_mass_[i * m_ + j] > kMassFloor)
          entries.push_back({i, j, basic_mass_[i * m_ + j]});
    return entries;
  }

 private:
  void northwest_corner(const std::vector<double>& a_in,
                        const std::vector<double>& b_in) {
    std::vector<double> a = a_in, b = b_in;
    std::size_t i = 0, j = 0;
    while (true) {
      const double q = std::min(a[i], b[j]);
      set_basic(i, j, q);
      a[i] -= q;
      b[j] -= q;
      if (i == n_ - 1 && j == m_ - 1) break;
      if (a[i] <= b[j]) {
        if (i + 1 < n_) ++i;
        else ++j;
      } else {
        if (j + 1 < m_) ++j;
        else ++i;
      }
    }
  }

  void set_basic(std::size_t i, std::size_t j, double mass) {
    is_basic_[i * m_ + j] = 1;
    basic_mass_[i * m_ + j] = mass;
  }

  // Solve u_i + v_j = c_ij over the basis tree, rooted at row 0 with u_0 = 0.
  void compute_potentials(std::vector<double>& u, std::vector<double>& v) const {
    const std::size_t nodes = n_ + m_;
    std::vector<char> done(nodes, 0);
    std::deque<std::size_t> queue;
    u.assign(n_, 0.0);
    v.assign(m_, 0.0);
    done[0] = 1;
    queue.push_back(0);
    std::size_t visited = 1;
    while (!queue.empty()) {
      const std::size_t node = queue.front();
      queue.pop_front();
      if (node < n_) {
        const std::size_t i = node;
        for (std::size_t j = 0; j < m_; ++j)
          if (is_basic_[i * m_ + j] && !done[n_ + j]) {
            v[j] = cost_[i * m_ + j] - u[i];
            done[n_ + j] = 1;
            queue.push_back(n_ + j);
            ++visited;
          }
      } else {
        const std::size_t j = node - n_;
        for (std::size_t i = 0; i < n_; ++i)
          if (is_basic_[i * m_ + j] && !done[i]) {
            u[i] = cost_[i * m_ + j] - v[j];
            done[i] = 1;
            queue.push_back(i);
            ++visited;
          }
      }
    }
    if (visited != nodes)
      throw SolverFailure("basis does not span the bipartite graph");
  }

  // Unique cycle created by the entering cell: path from row enter_i to
  // column enter_j through the basis tree, closed by the entering cell.
  void pivot(std::size_t enter_i, std::size_t enter_j) {
    const std::size_t nodes = n_ + m_;
    std::vector<std::size_t> parent(nodes, nodes);
    std::vector<char> seen(nodes, 0);
    std::deque<std::size_t> queue;
    seen[enter_i] = 1;
    queue.push_back(enter_i);
    while (!queue.empty() && !seen[n_ + enter_j]) {
      const std::size_t node = queue.front();
      queue.pop_front();
      if (node < n_) {
        const std::size_t i = node;
        for (std::size_t j = 0; j < m_; ++j)
          if (is_basic_[i * m_ + j] && !seen[n_ + j]) {
            seen[n_ + j] = 1;
            parent[n_ + j] = i;
            queue.push_back(n_ + j);
          }
      } else {
        const std::size_t j = node - n_;
        for (std::size_t i = 0; i < n_; ++i)
          if (is_basic_[i * m_ + j] && !seen[i]) {
            seen[i] = 1;
            parent[i] = n_ + j;
            queue.push_back(i);
          }
      }
    }
    if (!seen[n_ + enter_j])
      throw SolverFailure("entering cell closes no cycle");

    // Cells along the path, alternating signs; entering cell carries +.
    std::vector<std::pair<std::size_t, std::size_t>> plus{{enter_i, enter_j}};
    std::vector<std::pair<std::size_t, std::size_t>> minus;
    std::size_t node = n_ + enter_j;
    bool negative = true;
    while (node != enter_i) {
      const std::size_t up = parent[node];
      const std::size_t i = std::min(node, up);
      const std::size_t j = std::max(node, up) - n_;
      (negative ? minus : plus).push_back({i, j});
      negative = !negative;
      node = up;
    }

    double theta = std::numeric_limits<double>::infinity();
    for (const auto& [i, j] : minus) theta = std::min(theta, basic_mass_[i * m_ + j]);
    std::pair<std::size_t, std::size_t> leaving{n_, m_};
    for (const auto& [i, j] : minus)
      if (basic_mass_[i * m_ + j] == theta &&
          (leaving.first == n_ || std::make_pair(i, j) < leaving))
        leaving = {i, j};

    for (const auto& [i, j] : plus) basic_mass_[i * m_ + j] += theta;
    for (const auto& [i, j] : minus)
      basic_mass_[i * m_ + j] = std::max(0.0, basic_mass_[i * m_ + j] - theta);

    is_basic_[leaving.first * m_ + leaving.second] = 0;
    basic_mass_[leaving.first * m_ + leaving.second] = 0.0;
    set_basic(enter_i, enter_j, theta);
  }

  std::size_t n_, m_;
  std::vector<double> cost_;
  std::vector<double> basic_mass_;
  std::vector<char> is_basic_;
  double scale_ = 1.0;
};

}  // namespace detail

/// Exact W2 optimal transport between discrete measures via the
/// transportation simplex. The returned plan is a basic solution (support
/// size <= n+m-1) whose optimality is re-verified through nonnegative
/// reduced costs before emission.
inline W2Solution solve_w2(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != nu.dim())
    throw DimensionMismatch("measures live in different dimensions");
  detail::TransportationSimplex simplex(mu, nu);
  simplex.run();
  if (simplex.min_reduced_cost() < -kCycleSlack)
    throw SolverFailure("optimality certificate failed after convergence");
  TransportPlan plan(mu, nu, simplex.emit_entries());
  const double cost = transport_cost(plan);
  return {std::move(plan), std::sqrt(std::max(cost, 0.0)), cost};
}

/// True iff no cyclic reassignment of up to max_cycle_len support points
/// lowers the cost by more than the slack tolerance. With max_cycle_len equal
/// to the support size this is a complete optimality certificate on finite
/// supports, since every permutation decomposes into cycles.
inline bool is_cyclically_monotone(const TransportPlan& plan,
                                   std::size_t max_cycle_len) {
  const std::size_t s = plan.support_size();
  max_cycle_len = std::min(max_cycle_len, s);
  if (max_cycle_len < 2) return true;

  // Pairwise costs between support sources and support targets.
  std::vector<double> d(s * s);
  for (std::size_t p = 0; p < s; ++p)
    for (std::size_t q = 0; q < s; ++q)
      d[p * s + q] = squared_distance(
          plan.source().atom(plan.entries()[p].source_index),
          plan.target().atom(plan.entries()[q].target_index));

  // DFS over directed cycles whose smallest member comes first. `shifted`
  // accumulates sum_k d(e_k, e_{k+1}) along the open path, `diagonal` the
  // matched sum_k d(e_k, e_k).
  std::vector<std::size_t> path;
  std::vector<char> used(s, 0);
  bool monotone = true;

  auto extend = [&](auto&& self, double shifted, double diagonal) -> void {
    if (!monotone) return;
    const std::size_t last = path.back();
    const std::size_t start = path.front();
    if (path.size() >= 2) {
      const double cycle_shifted = shifted + d[last * s + start];
      const double cycle_diagonal = diagonal + d[last * s + last];
      if (cycle_shifted < cycle_diagonal - kCycleSlack) {
        monotone = false;
        return;
      }
    }
    if (path.size() == max_cycle_len) return;
    for (std::size_t q = start + 1; q < s; ++q) {
      if (used[q]) continue;
      used[q] = 1;
      path.push_back(q);
      self(self, shifted + d[last * s + q], diagonal + d[last * s + last]);
      path.pop_back();
      used[q] = 0;
      if (!monotone) return;
    }
  };

  for (std::size_t start = 0; start + 1 < s && monotone; ++start) {
    used[start] = 1;
    path.assign(1, start);
    extend(extend, 0.0, 0.0);
    used[start] = 0;
  }
  return monotone;
}

/// Default cycle bound: complete certificate for small supports, length 6
/// otherwise. Completeness requires max_cycle_len = support size.
inline bool is_cyclically_monotone(const TransportPlan& plan) {
  return is_cyclically_monotone(plan, std::min<std::size_t>(plan.support_size(), 6));
}

struct ThreePlanEntry {
  std::size_t base_index = 0;  // atom of the base measure (x1)
  Point x2;
  Point x3;
  double mass = 0.0;
};

/// Coupling on (R^d)^3 with a discrete first marginal, used to build
/// generalized geodesics. Stores the (x2, x3) legs as explicit points.
class ThreePlan {
 public:
  ThreePlan(DiscreteMeasure base, std::vector<ThreePlanEntry> entries)
      : base_(std::move(base)), entries_(std::move(entries)) {
    std::vector<double> first(base_.size(), 0.0);
    for (const ThreePlanEntry& e : entries_) {
      if (e.base_index >= base_.size())
        throw InvalidPlan("three-plan entry index out of range");
      if (!(e.mass > 0.0)) throw InvalidPlan("three-plan mass must be positive");
      if (static_cast<int>(e.x2.size()) != base_.dim() ||
          static_cast<int>(e.x3.size()) != base_.dim())
        throw DimensionMismatch("three-plan legs have inconsistent dimension");
      first[e.base_index] += e.mass;
    }
    for (std::size_t i = 0; i < base_.size(); ++i)
      if (std::abs(first[i] - base_.weight(i)) > kMarginalTolerance)
        throw InvalidPlan("three-plan first marginal does not match base");
  }

  const DiscreteMeasure& base() const { return base_; }
  const std::vector<ThreePlanEntry>& entries() const { return entries_; }

  /// Pushforward through (x1, x2).
  TransportPlan project12() const { return project(&ThreePlanEntry::x2); }
  /// Pushforward through (x1, x3).
  TransportPlan project13() const { return project(&ThreePlanEntry::x3); }

 private:
  TransportPlan project(Point ThreePlanEntry::*leg) const {
    std::vector<Point> points;
    std::vector<double> masses;
    for (const ThreePlanEntry& e : entries_) {
      points.push_back(e.*leg);
      masses.push_back(e.mass);
    }
    DiscreteMeasure target(points, masses);
    // Accumulate entry masses per (base atom, merged target atom).
    std::vector<double> cell(base_.size() * target.size(), 0.0);
    for (const ThreePlanEntry& e : entries_)
      cell[e.base_index * target.size() + target.nearest_atom(e.*leg)] += e.mass;
    std::vector<PlanEntry> plan_entries;
    for (std::size_t i = 0; i < base_.size(); ++i)
      for (std::size_t j = 0; j < target.size(); ++j)
        if (cell[i * target.size() + j] > kMassFloor)
          plan_entries.push_back({i, j, cell[i * target.size() + j]});
    return TransportPlan(base_, std::move(target), std::move(plan_entries));
  }

  DiscreteMeasure base_;
  std::vector<ThreePlanEntry> entries_;
};

/// Glue two plans sharing a source measure by conditional independence given
/// the source atom: mass(i, j, k) = g12(i,j) * g13(i,k) / a_i.
inline ThreePlan glue_plans(const TransportPlan& g12, const TransportPlan& g13) {
  if (!g12.source().same_support(g13.source()))
    throw SourceMismatch("plans do not share a source measure");
  const DiscreteMeasure& base = g12.source();

  std::vector<std::vector<const PlanEntry*>> by_source12(base.size()),
      by_source13(base.size());
  for (const PlanEntry& e : g12.entries()) by_source12[e.source_index].push_back(&e);
  for (const PlanEntry& e : g13.entries()) by_source13[e.source_index].push_back(&e);

  std::vector<ThreePlanEntry> entries;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double a = base.weight(i);
    for (const PlanEntry* e12 : by_source12[i])
      for (const PlanEntry* e13 : by_source13[i]) {
        const double mass = e12->mass * e13->mass / a;
        if (mass > kMassFloor)
          entries.push_back({i, g12.target().atom(e12->target_index),
                             g13.target().atom(e13->target_index), mass});
      }
  }
  return ThreePlan(base, std::move(entries));
}

}  // namespace otconv
