#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace otconv {

/// Euclidean distance below which two atoms are considered coincident and merged.
inline constexpr double kMergeTolerance = 1e-12;
/// Accepted deviation of the input weight sum from 1.
inline constexpr double kWeightSumTolerance = 1e-9;

/// Finitely supported probability measure on R^d: pairwise-distinct atoms with
/// positive weights summing to one. Immutable after construction.
class DiscreteMeasure {
 public:
  /// Validates, merges coincident points (weights summed), drops zero-weight
  /// points and renormalizes the weights to an exact unit sum.
  DiscreteMeasure(std::vector<Point> points, std::vector<double> weights) {
    if (points.size() != weights.size())
      throw DimensionMismatch("points and weights differ in length");
    for (double w : weights)
      if (w < 0.0) throw NegativeWeight("negative weight " + std::to_string(w));

    double total = 0.0;
    for (double w : weights) total += w;
    if (points.empty() || total <= 0.0)
      throw NonpositiveTotalMass("total input mass is not positive");
    if (std::abs(total - 1.0) > kWeightSumTolerance)
      throw InvalidTotalMass("input weights sum to " + std::to_string(total));

    dim_ = static_cast<int>(points.front().size());
    if (dim_ < 1) throw DimensionMismatch("atoms must have positive dimension");
    for (const Point& p : points)
      if (static_cast<int>(p.size()) != dim_)
        throw DimensionMismatch("atom dimensions are inconsistent");

    // Merge points that coincide within tolerance, first occurrence wins.
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (weights[i] == 0.0) continue;
      bool merged = false;
      for (std::size_t k = 0; k < atoms_.size(); ++k) {
        if (distance(points[i], atoms_[k]) <= kMergeTolerance) {
          weights_[k] += weights[i];
          merged = true;
          break;
        }
      }
      if (!merged) {
        atoms_.push_back(std::move(points[i]));
        weights_.push_back(weights[i]);
      }
    }
    if (atoms_.empty()) throw NonpositiveTotalMass("all weights are zero");

    normalize_exactly();
  }

  int dim() const { return dim_; }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<Point>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  const Point& atom(std::size_t i) const { return atoms_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  /// Index of the atom nearest to p. The caller is expected to pass positions
  /// that lie within merge distance of an actual atom.
  std::size_t nearest_atom(const Point& p) const {
    std::size_t best = 0;
    double best_d = squared_distance(p, atoms_[0]);
    for (std::size_t k = 1; k < atoms_.size(); ++k) {
      const double d = squared_distance(p, atoms_[k]);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    return best;
  }

  bool same_support(const DiscreteMeasure& other, double tol = kMergeTolerance) const {
    if (dim_ != other.dim_ || size() != other.size()) return false;
    for (std::size_t i = 0; i < size(); ++i) {
      if (distance(atoms_[i], other.atoms_[i]) > tol) return false;
      if (std::abs(weights_[i] - other.weights_[i]) > tol) return false;
    }
    return true;
  }

 private:
  void normalize_exactly() {
    double total = 0.0;
    for (double w : weights_) total += w;
    for (double& w : weights_) w /= total;
    // Push the floating-point residue onto the heaviest atom until the
    // recomputed sum sits at 1 within a few ulps.
    for (int round = 0; round < 8; ++round) {
      double s = 0.0;
      for (double w : weights_) s += w;
      const double residue = s - 1.0;
      if (std::abs(residue) <= 1e-16) break;
      const auto heaviest =
          std::max_element(weights_.begin(), weights_.end()) - weights_.begin();
      weights_[static_cast<std::size_t>(heaviest)] -= residue;
    }
  }

  int dim_ = 0;
  std::vector<Point> atoms_;
  std::vector<double> weights_;
};

/// Dirac mass at x.
inline DiscreteMeasure dirac(Point x) {
  std::vector<Point> pts;
  pts.push_back(std::move(x));
  return DiscreteMeasure(std::move(pts), {1.0});
}

/// Integral of |x|^2 against the measure.
inline double second_moment(const DiscreteMeasure& mu) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    s += mu.weight(i) * squared_norm(mu.atom(i));
  return s;
}

}  // namespace otconv
