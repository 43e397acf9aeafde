#include "polyrobin/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace polyrobin::shapes {

namespace {

HalfSpace hs2(double nx, double ny, double b) {
  Point n(2);
  n << nx, ny;
  return {n, b};
}

}  // namespace

Polytope box(const Point& lo, const Point& hi) {
  const auto d = lo.size();
  std::vector<HalfSpace> hs;
  for (Eigen::Index k = 0; k < d; ++k) {
    Point e = Point::Zero(d);
    e(k) = 1.0;
    hs.push_back({e, hi(k)});
    hs.push_back({-e, -lo(k)});
  }
  return build_polytope(std::move(hs));
}

Polytope unit_square() { return rectangle(1.0, 1.0); }

Polytope rectangle(double width, double height) {
  return build_polytope({hs2(1, 0, width), hs2(-1, 0, 0), hs2(0, 1, height), hs2(0, -1, 0)});
}

Polytope regular_polygon(int n, double inradius, double phase) {
  std::vector<HalfSpace> hs;
  for (int k = 0; k < n; ++k) {
    const double a = phase + 2.0 * M_PI * k / n;
    hs.push_back(hs2(std::cos(a), std::sin(a), inradius));
  }
  return build_polytope(std::move(hs));
}

Polytope equilateral_triangle() { return regular_polygon(3, 1.0, M_PI / 2); }

Polytope right_trapezoid() {
  return build_polytope({hs2(0, 1, 1), hs2(0, -1, 0), hs2(-1, 0, 0), hs2(1, 1, 3)});
}

Polytope clipped_square(double eps) {
  const double s = 1.0 / std::sqrt(2.0);
  // corner chamfers: x + y >= eps, (1-x) + y >= eps, ...
  return build_polytope({hs2(1, 0, 1), hs2(-1, 0, 0), hs2(0, 1, 1), hs2(0, -1, 0),
                         hs2(-s, -s, -eps * s), hs2(s, -s, (1.0 - eps) * s),
                         hs2(s, s, (2.0 - eps) * s), hs2(-s, s, (1.0 - eps) * s)});
}

Polytope random_polygon(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> jitter(0.15, 1.0);
  // angular gaps strictly below pi keep the polygon bounded
  std::vector<double> angles;
  double a = std::uniform_real_distribution<double>(0.0, 2.0 * M_PI)(rng);
  const double step = 2.0 * M_PI / n;
  for (int k = 0; k < n; ++k) {
    angles.push_back(a);
    a += step * jitter(rng) + step * 0.2;
  }
  const double total = a - angles.front();
  std::vector<HalfSpace> hs;
  for (double t : angles) {
    const double theta = angles.front() + (t - angles.front()) * 2.0 * M_PI / total;
    hs.push_back(hs2(std::cos(theta), std::sin(theta), 1.0));
  }
  return build_polytope(std::move(hs));
}

}  // namespace polyrobin::shapes
