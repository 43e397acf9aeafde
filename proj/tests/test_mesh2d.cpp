#include "oracles.hpp"
#include "polyrobin/error.hpp"
#include "polyrobin/mesh2d.hpp"
#include "polyrobin/shapes.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <map>
#include <set>

using namespace polyrobin;
using oracle::pt;

namespace {

/// Every interior edge is shared by exactly two triangles and every other edge
/// is a tagged boundary edge on the face it claims to lie on.
void check_conforming(const Mesh& M, const Polytope& P) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : M.triangles)
    for (int k = 0; k < 3; ++k) {
      int a = t[static_cast<std::size_t>(k)], b = t[static_cast<std::size_t>((k + 1) % 3)];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  std::set<std::pair<int, int>> boundary;
  for (const auto& e : M.boundary_edges) {
    const auto key = std::make_pair(std::min(e.nodes[0], e.nodes[1]), std::max(e.nodes[0], e.nodes[1]));
    boundary.insert(key);
    REQUIRE(e.face >= 0);
    const HalfSpace& h = P.halfspace(e.face);
    for (int n : e.nodes) CHECK(std::abs(h.normal.dot(M.nodes[static_cast<std::size_t>(n)]) - h.offset) < 1e-12);
  }
  for (const auto& [edge, n] : count) {
    if (boundary.count(edge))
      CHECK(n == 1);
    else
      CHECK(n == 2);
  }
  CHECK(boundary.size() == M.boundary_edges.size());
  for (std::size_t t = 0; t < M.triangles.size(); ++t) CHECK(M.triangle_area(t) > 0.0);
}

double longest_edge(const Mesh& M) {
  double h = 0.0;
  for (const auto& t : M.triangles)
    for (int k = 0; k < 3; ++k)
      h = std::max(h, (M.nodes[static_cast<std::size_t>(t[static_cast<std::size_t>(k)])] -
                       M.nodes[static_cast<std::size_t>(t[static_cast<std::size_t>((k + 1) % 3)])])
                          .norm());
  return h;
}

}  // namespace

TEST_SUITE("mesh2d") {
  TEST_CASE("triangulation reproduces area and perimeter") {
    for (const Polytope& P : {shapes::unit_square(), shapes::equilateral_triangle(), shapes::right_trapezoid(),
                              shapes::regular_polygon(5), shapes::clipped_square(0.1)}) {
      const Mesh M = triangulate(P, 0.1);
      const GeometrySummary g = measures(P);
      CHECK(M.total_area() == doctest::Approx(g.volume).epsilon(1e-12));
      CHECK(M.boundary_length() == doctest::Approx(g.surface_area).epsilon(1e-12));
      CHECK(M.h <= 0.1);
      CHECK(M.corners.size() == P.vertices().size());
      check_conforming(M, P);
    }
  }

  TEST_CASE("red refinement quadruples triangles and halves h") {
    const Mesh M = triangulate_levels(shapes::right_trapezoid(), 2);
    const Mesh R = refine(M);
    CHECK(R.triangles.size() == 4 * M.triangles.size());
    CHECK(R.boundary_edges.size() == 2 * M.boundary_edges.size());
    CHECK(R.h == doctest::Approx(0.5 * M.h).epsilon(1e-12));
    CHECK(R.node_count() == M.node_count() + M.edge_count());
    CHECK(R.min_angle() == doctest::Approx(M.min_angle()).epsilon(1e-9));
    check_conforming(R, shapes::right_trapezoid());
  }

  TEST_CASE("graded size field") {
    const SizeField f = graded_size({Vec2(0, 0)}, 0.1, 0.001, 0.2);
    CHECK(f(Vec2(0, 0)) == doctest::Approx(0.001));
    CHECK(f(Vec2(0.1, 0)) == doctest::Approx(0.02));
    CHECK(f(Vec2(3, 0)) == doctest::Approx(0.1));
    CHECK_THROWS_AS(graded_size({Vec2(0, 0)}, 0.1, 0.2), Error);
  }

  TEST_CASE("longest-edge bisection stays conforming and meets the size field") {
    const Polytope P = shapes::right_trapezoid();
    const Mesh base = triangulate(P, 0.2);
    const SizeField size = graded_size({Vec2(2, 1)}, 0.2, 0.005, 0.3);
    const Mesh M = refine_adaptive(base, size);
    check_conforming(M, P);
    CHECK(M.total_area() == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(M.boundary_length() == doctest::Approx(6.0 + std::sqrt(2.0)).epsilon(1e-12));
    CHECK(M.h == doctest::Approx(longest_edge(M)));
    for (const auto& t : M.triangles) {
      double hmax = 0.0, target = 1e9;
      for (int k = 0; k < 3; ++k) {
        const Vec2& a = M.nodes[static_cast<std::size_t>(t[static_cast<std::size_t>(k)])];
        const Vec2& b = M.nodes[static_cast<std::size_t>(t[static_cast<std::size_t>((k + 1) % 3)])];
        hmax = std::max(hmax, (a - b).norm());
        target = std::min(target, size(a));
      }
      CHECK(hmax <= target + 1e-12);
    }
    CHECK(M.min_angle() > 0.5 * base.min_angle() - 1e-12);
    CHECK(M.node_count() > base.node_count());
  }

  TEST_CASE("graded triangulation refines near the focus only") {
    const Mesh M = triangulate_graded(shapes::right_trapezoid(), 0.1, {Vec2(2, 1)}, 1e-3, 0.2);
    double near = 1.0, far = 0.0;
    for (const auto& t : M.triangles) {
      Vec2 c = Vec2::Zero();
      for (int k : t) c += M.nodes[static_cast<std::size_t>(k)] / 3.0;
      double e = 0.0;
      for (int k = 0; k < 3; ++k)
        e = std::max(e, (M.nodes[static_cast<std::size_t>(t[static_cast<std::size_t>(k)])] -
                         M.nodes[static_cast<std::size_t>(t[static_cast<std::size_t>((k + 1) % 3)])])
                            .norm());
      if ((c - Vec2(2, 1)).norm() < 0.005) near = std::min(near, e);
      if ((c - Vec2(0.5, 0.5)).norm() < 0.1) far = std::max(far, e);
    }
    CHECK(near < 0.005);
    CHECK(far > 0.05);
  }

  TEST_CASE("point location and linear interpolation") {
    const Mesh M = triangulate(shapes::right_trapezoid(), 0.1);
    const MeshLocator loc(M);
    Eigen::VectorXd lin(static_cast<Eigen::Index>(M.node_count()));
    for (std::size_t i = 0; i < M.node_count(); ++i)
      lin(static_cast<Eigen::Index>(i)) = 2.0 * M.nodes[i].x() - 3.0 * M.nodes[i].y() + 0.5;
    for (const Vec2& p : {Vec2(0.3, 0.2), Vec2(2.0, 1.0), Vec2(2.9, 0.05), Vec2(0, 0), Vec2(1.234, 0.999)}) {
      auto v = loc.interpolate(lin, p);
      REQUIRE(v);
      CHECK(*v == doctest::Approx(2.0 * p.x() - 3.0 * p.y() + 0.5).epsilon(1e-12));
    }
    CHECK_FALSE(loc.locate(Vec2(2.5, 0.9)));
    CHECK_FALSE(loc.locate(Vec2(-0.1, 0.5)));
  }

  TEST_CASE("OFF export round trip") {
    const Mesh M = refine_adaptive(triangulate(shapes::right_trapezoid(), 0.2), graded_size({Vec2(2, 1)}, 0.2, 0.01));
    const auto path = std::filesystem::temp_directory_path() / "polyrobin_mesh_roundtrip.off";
    export_mesh(M, path.string());
    const Mesh R = import_mesh(path.string());
    REQUIRE(R.node_count() == M.node_count());
    REQUIRE(R.triangles.size() == M.triangles.size());
    for (std::size_t i = 0; i < M.node_count(); ++i) CHECK((R.nodes[i] - M.nodes[i]).norm() == 0.0);
    CHECK(R.triangles == M.triangles);
    CHECK(R.boundary_edges.size() == M.boundary_edges.size());
    CHECK(R.corners.size() == M.corners.size());
    CHECK(R.h == doctest::Approx(M.h));
    std::filesystem::remove(path);
    std::filesystem::remove(path.string() + ".edges");
  }

  TEST_CASE("meshing errors") {
    CHECK_THROWS_AS(triangulate(shapes::box(pt({0, 0, 0}), pt({1, 1, 1})), 0.1), Error);
    CHECK_THROWS_AS(triangulate(shapes::unit_square(), 0.0), Error);
    CHECK_THROWS_AS(import_mesh("/nonexistent/mesh.off"), Error);
  }
}
