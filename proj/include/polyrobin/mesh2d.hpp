#pragma once

#include "polyrobin/polytope.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace polyrobin {

using Vec2 = Eigen::Vector2d;

struct BoundaryEdge {
  std::array<int, 2> nodes{};
  int face = -1;  ///< index into the polytope's half-space list
};

/// Conforming triangulation of a convex polygon. Triangles are counterclockwise;
/// every polygon vertex is a node (listed in `corners`, in counterclockwise order).
struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<int> corners;
  double h = 0.0;

  std::size_t node_count() const { return nodes.size(); }
  double triangle_area(std::size_t t) const;
  double total_area() const;
  double boundary_length() const;
  double min_angle() const;
  std::size_t edge_count() const;
};

/// Fan from the vertex centroid to the polygon corners, then uniform
/// refinement until h <= target_h. Throws DimensionUnsupported for d != 2.
Mesh triangulate(const Polytope& P, double target_h);

/// Fan mesh refined exactly `levels` times.
Mesh triangulate_levels(const Polytope& P, int levels);

/// Red refinement: every triangle split into four through its edge midpoints.
Mesh refine(const Mesh& M);

/// Target edge length as a function of position.
using SizeField = std::function<double(const Vec2&)>;

/// min(h_max, max(h_min, grading * distance to the nearest focus point)).
SizeField graded_size(std::vector<Vec2> focus, double h_max, double h_min, double grading = 0.3);

/// Conforming longest-edge bisection until no triangle has a longest edge
/// above the size field at any of its vertices. Keeps boundary tags; the
/// result's h is its longest edge. Throws Config for a non-positive size.
Mesh refine_adaptive(const Mesh& M, const SizeField& size);

/// Uniform fan mesh refined to target_h, then graded toward `focus` down to h_min.
Mesh triangulate_graded(const Polytope& P, double target_h, const std::vector<Vec2>& focus, double h_min,
                        double grading = 0.3);

/// Bucket grid over the mesh for point location and P1 interpolation.
class MeshLocator {
 public:
  explicit MeshLocator(const Mesh& mesh);

  struct Hit {
    int triangle = -1;
    std::array<double, 3> bary{};
  };
  /// Triangle containing p (with tolerance), or nullopt when p is outside.
  std::optional<Hit> locate(const Vec2& p) const;
  /// P1 interpolant of nodal values at p; nullopt outside the mesh.
  std::optional<double> interpolate(const Eigen::VectorXd& values, const Vec2& p) const;

  const Mesh& mesh() const { return *mesh_; }

 private:
  const Mesh* mesh_;
  Vec2 lo_, hi_;
  int nx_ = 1, ny_ = 1;
  double cell_ = 1.0;
  std::vector<int> start_;
  std::vector<int> items_;
};

/// OFF text (nodes with z = 0, triangles) and a sidecar "node node face" table.
void write_off(const Mesh& M, std::ostream& off, std::ostream& edge_tags);
void export_mesh(const Mesh& M, const std::string& off_path);
/// Reads a mesh written by export_mesh (`<path>` and `<path>.edges`).
Mesh import_mesh(const std::string& off_path);

}  // namespace polyrobin
