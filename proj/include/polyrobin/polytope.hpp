#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace polyrobin {

using Point = Eigen::VectorXd;

/// Closed half-space {x : normal . x <= offset}. The domain itself is the open
/// intersection; closures are used wherever boundary points matter.
struct HalfSpace {
  Point normal;
  double offset = 0.0;
};

struct Vertex {
  Point point;
  std::vector<int> active;  ///< indices of half-spaces whose boundary contains the vertex
};

/// Bounded convex polyhedron given by a minimal list of half-spaces.
///
/// Construction normalizes the normals, drops redundant half-spaces and
/// enumerates the vertices by solving every d-subset of boundary planes. The
/// object is immutable afterwards.
class Polytope {
 public:
  int dim() const noexcept { return dim_; }
  std::span<const HalfSpace> halfspaces() const noexcept { return halfspaces_; }
  std::span<const Vertex> vertices() const noexcept { return vertices_; }
  const HalfSpace& halfspace(int i) const { return halfspaces_.at(static_cast<std::size_t>(i)); }
  int face_count() const noexcept { return static_cast<int>(halfspaces_.size()); }

  double diameter() const noexcept { return diameter_; }
  /// Absolute tolerance used for active sets: rel_tol * diameter.
  double tolerance() const noexcept { return tol_; }
  double relative_tolerance() const noexcept { return rel_tol_; }

  /// Indices of the vertices lying on face i.
  std::vector<int> face_vertices(int i) const;

  /// Signed slack b_i - normal_i . x for every half-space.
  Eigen::VectorXd slack(const Point& x) const;
  bool contains(const Point& x, double tol) const;

  Point vertex_centroid() const;

 private:
  friend Polytope build_polytope(std::vector<HalfSpace>, double);

  int dim_ = 0;
  std::vector<HalfSpace> halfspaces_;
  std::vector<Vertex> vertices_;
  double diameter_ = 0.0;
  double tol_ = 0.0;
  double rel_tol_ = 1e-10;
};

/// Builds a polytope; throws Error(UnboundedDomain | EmptyDomain | DegenerateInput).
/// `rel_tol` scales with the diameter and decides which planes are active.
Polytope build_polytope(std::vector<HalfSpace> halfspaces, double rel_tol = 1e-10);

/// Active set I(x): indices i with |x . n_i - b_i| <= tol. Empty iff x is interior.
/// Throws PointOutsideDomain when x is not in the closure.
std::vector<int> tangent_cone(const Polytope& P, const Point& x);

/// Normals of the active set at x, in the same order as tangent_cone().
std::vector<Point> tangent_cone_normals(const Polytope& P, const Point& x);

struct GeometrySummary {
  double volume = 0.0;
  double surface_area = 0.0;
  std::vector<double> face_areas;
  double diameter = 0.0;
  Point chebyshev_center;
  double inradius = 0.0;
};

/// Volume, face measures, diameter and the largest inscribed ball (d <= 3).
GeometrySummary measures(const Polytope& P);

/// Largest inscribed ball; valid in any dimension.
std::pair<Point, double> chebyshev_ball(const Polytope& P);

/// Euclidean distance from x to the closure of P (0 inside).
double distance_to(const Polytope& P, const Point& x);

/// Hausdorff distance between two convex polytopes, attained at a vertex of one of them.
double hausdorff_distance(const Polytope& P, const Polytope& Q);

/// Image of P under x -> R x + t with R orthogonal.
Polytope rigid_transform(const Polytope& P, const Eigen::MatrixXd& R, const Point& t);

/// Image of P under x -> s x, s > 0.
Polytope scaled(const Polytope& P, double s);

}  // namespace polyrobin
