#pragma once

#include "polyrobin/fem.hpp"
#include "polyrobin/polytope.hpp"

#include <array>
#include <vector>

namespace polyrobin {

/// Planar sector {vertex + r (cos t, sin t)} with opening theta0 <= pi.
///
/// Angular convention: theta is measured counterclockwise from the inward
/// bisector, theta in [-theta0/2, theta0/2]. Odd modes are sin(beta theta), even
/// modes cos(beta theta); the sign of odd-mode coefficients depends on this choice.
struct Sector {
  Vec2 vertex;
  double theta0 = 0.0;
  Vec2 bisector;                     ///< unit, pointing into the sector
  std::array<Vec2, 2> face_normals;  ///< outward unit normals of the two edges
};

/// Sector bounded by two lines through `vertex` with the given outward normals.
Sector make_sector(const Vec2& vertex, const Vec2& normal_a, const Vec2& normal_b);

/// Tangent cone of a polygon vertex (index into P.vertices()).
Sector sector_at_vertex(const Polytope& P, int vertex_index);

/// Largest r with B_r(vertex) cut by no plane other than the two incident ones.
double cone_radius(const Polytope& P, int vertex_index);

struct SectorExponent {
  double beta = 0.0;
  bool critical = false;  ///< i = 1 and 1 < beta < 2, i.e. theta0 in (pi/2, pi)
};

/// beta_i = i pi / theta0. Throws InvalidAngle outside (0, pi].
SectorExponent sector_exponent(double theta0, int i);

/// Angle of `point` from the bisector; throws PointOutsideSector.
double sector_angle(const Sector& S, const Vec2& point);

/// psi_i = r^beta_i cos(beta_i theta) for even i, r^beta_i sin(beta_i theta) for odd i.
double sector_eigenfunction(const Sector& S, int i, const Vec2& point);

/// gamma = bisector / sin(theta0/2), so that gamma . n = -1 on both edges.
Vec2 degree_one_solution(const Sector& S);

struct ExpansionOptions {
  double mu = 0.0;                   ///< coefficient of the -(mu/4)|x|^2 term removed first
  bool subtract_degree_one = true;   ///< remove gamma . x before projecting
  int samples_per_mode = 8;
};

struct ModeCoefficient {
  int index = 0;
  double beta = 0.0;
  double f = 0.0;          ///< estimate on the arc of radius r
  double f_half = 0.0;     ///< estimate on the arc of radius r/2
  double spread = 0.0;     ///< |f - f_half| / max(|f|, |f_half|)
};

struct CornerExpansion {
  Sector sector;
  double sample_radius = 0.0;
  double constant = 0.0;      ///< v(vertex)
  double mean_remainder = 0.0;
  Vec2 linear_part = Vec2::Zero();  ///< gamma plus any folded beta = 1 mode
  std::vector<ModeCoefficient> coefficients;  ///< i = 1..N without folded modes
  int samples = 0;
};

/// Projects v(vertex + x) - v(vertex) + (mu/4)|x|^2 - gamma . x onto the angular
/// modes on arcs of radius r and r/2 (trapezoidal rule, barycentric sampling).
/// Throws RadiusTooLarge (r above `max_radius`) or MeshTooCoarse (h > r/4).
CornerExpansion corner_expansion(const Field& v, const Sector& S, double r, int modes, double max_radius,
                                 const ExpansionOptions& opts = {});

/// Convenience overload for polygon vertices; uses cone_radius() as the bound.
CornerExpansion corner_expansion(const Field& v, const Polytope& P, int vertex_index, double r, int modes,
                                 const ExpansionOptions& opts = {});

}  // namespace polyrobin
