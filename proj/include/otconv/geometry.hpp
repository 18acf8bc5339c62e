#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace otconv {

/// A point in R^d.
using Point = std::vector<double>;

inline double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += a[c] * b[c];
  return s;
}

inline double squared_norm(const Point& x) { return dot(x, x); }

inline double norm(const Point& x) { return std::sqrt(squared_norm(x)); }

inline double squared_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    s += d * d;
  }
  return s;
}

inline double distance(const Point& a, const Point& b) {
  return std::sqrt(squared_distance(a, b));
}

inline Point subtract(const Point& a, const Point& b) {
  Point r(a.size());
  for (std::size_t c = 0; c < a.size(); ++c) r[c] = a[c] - b[c];
  return r;
}

/// Position w + t*z of a straight-line path at time t.
inline Point line_at(const Point& w, const Point& z, double t) {
  Point r(w.size());
  for (std::size_t c = 0; c < w.size(); ++c) r[c] = w[c] + t * z[c];
  return r;
}

}  // namespace otconv
