#pragma once

#include "polyrobin/polytope.hpp"

namespace polyrobin::shapes {

/// Axis-aligned box [lo_1, hi_1] x ... x [lo_d, hi_d].
Polytope box(const Point& lo, const Point& hi);

Polytope unit_square();
Polytope rectangle(double width, double height);

/// Regular n-gon with incenter at the origin and the given inradius; the first
/// outward normal points at angle `phase` (radians).
Polytope regular_polygon(int n, double inradius = 1.0, double phase = M_PI / 2);

/// Equilateral triangle, incenter at origin, inradius 1, normals at 90/210/330 degrees.
Polytope equilateral_triangle();

/// Right trapezoid {0 <= y <= 1, x >= 0, x + y <= 3}; its corner (2,1) has opening 3*pi/4.
Polytope right_trapezoid();

/// Unit square with each corner cut off by a 45-degree chamfer of leg length eps.
Polytope clipped_square(double eps);

/// Random convex polygon: `n` tangent lines to the unit circle at sorted random angles.
Polytope random_polygon(int n, unsigned seed);

}  // namespace polyrobin::shapes
