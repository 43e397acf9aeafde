#include "oracles.hpp"
#include "polyrobin/error.hpp"
#include "polyrobin/polytope.hpp"
#include "polyrobin/shapes.hpp"

#include <doctest.h>

#include <Eigen/Geometry>
#include <algorithm>
#include <random>

using namespace polyrobin;
using oracle::pt;

namespace {

HalfSpace hs(Point n, double b) { return {std::move(n), b}; }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Config;
}

bool has_vertex(const Polytope& P, const Point& x, double tol = 1e-12) {
  return std::any_of(P.vertices().begin(), P.vertices().end(),
                     [&](const Vertex& v) { return (v.point - x).norm() < tol; });
}

Eigen::Matrix2d rotation(double a) { return Eigen::Rotation2Dd(a).toRotationMatrix(); }

}  // namespace

TEST_SUITE("polytope") {
  TEST_CASE("unit square has four vertices") {
    const Polytope P = shapes::unit_square();
    CHECK(P.dim() == 2);
    CHECK(P.face_count() == 4);
    REQUIRE(P.vertices().size() == 4);
    for (auto v : {pt({0, 0}), pt({1, 0}), pt({1, 1}), pt({0, 1})}) CHECK(has_vertex(P, v));
    for (const auto& h : P.halfspaces()) CHECK(std::abs(h.normal.norm() - 1.0) < 1e-12);
  }

  TEST_CASE("redundant half-space is dropped") {
    const double s = 1.0 / std::sqrt(2.0);
    const Polytope P = build_polytope({hs(pt({1, 0}), 1), hs(pt({-1, 0}), 0), hs(pt({0, 1}), 1), hs(pt({0, -1}), 0),
                                       hs(pt({s, s}), 3)});
    CHECK(P.face_count() == 4);
    CHECK(P.vertices().size() == 4);
  }

  TEST_CASE("unnormalized normals are normalized") {
    const Polytope P = build_polytope({hs(pt({2, 0}), 2), hs(pt({-3, 0}), 0), hs(pt({0, 5}), 5), hs(pt({0, -1}), 0)});
    CHECK(has_vertex(P, pt({1, 1})));
    CHECK(P.halfspace(0).normal.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("construction errors") {
    CHECK(kind_of([] { build_polytope({hs(pt({1, 0}), 1), hs(pt({-1, 0}), 1), hs(pt({0, 1}), 1)}); }) ==
          ErrorKind::UnboundedDomain);
    CHECK(kind_of([] { build_polytope({}); }) == ErrorKind::DegenerateInput);
    CHECK(kind_of([] {
            build_polytope({hs(pt({1, 0}), -1), hs(pt({-1, 0}), 0), hs(pt({0, 1}), 1), hs(pt({0, -1}), 0)});
          }) == ErrorKind::EmptyDomain);
    CHECK(kind_of([] {
            build_polytope({hs(pt({1, 0}), 0), hs(pt({-1, 0}), 0), hs(pt({0, 1}), 1), hs(pt({0, -1}), 0)});
          }) == ErrorKind::EmptyDomain);
    CHECK(kind_of([] { build_polytope({hs(pt({0, 0}), 1), hs(pt({-1, 0}), 0), hs(pt({0, 1}), 1)}); }) ==
          ErrorKind::DegenerateInput);
    CHECK(kind_of([] { build_polytope({hs(pt({1, 0}), 1), hs(pt({-1, 0, 0}), 0), hs(pt({0, 1}), 1)}); }) ==
          ErrorKind::DimensionMismatch);
  }

  TEST_CASE("tangent cone at interior, edge and corner points") {
    const Polytope P = shapes::unit_square();
    CHECK(tangent_cone(P, pt({0.5, 0.5})).empty());
    auto corner = tangent_cone_normals(P, pt({0, 0}));
    REQUIRE(corner.size() == 2);
    const bool has_x = std::any_of(corner.begin(), corner.end(), [](const Point& n) { return (n - pt({-1, 0})).norm() < 1e-14; });
    const bool has_y = std::any_of(corner.begin(), corner.end(), [](const Point& n) { return (n - pt({0, -1})).norm() < 1e-14; });
    CHECK(has_x);
    CHECK(has_y);
    auto edge = tangent_cone_normals(P, pt({0.5, 0}));
    REQUIRE(edge.size() == 1);
    CHECK((edge[0] - pt({0, -1})).norm() < 1e-14);
    CHECK(kind_of([&] { tangent_cone(P, pt({2, 0})); }) == ErrorKind::PointOutsideDomain);
  }

  TEST_CASE("measures of the reference shapes") {
    const GeometrySummary sq = measures(shapes::unit_square());
    CHECK(sq.volume == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sq.surface_area == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(sq.diameter == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(sq.inradius == doctest::Approx(0.5).epsilon(1e-12));
    CHECK((sq.chebyshev_center - pt({0.5, 0.5})).norm() < 1e-12);

    const GeometrySummary tri = measures(shapes::equilateral_triangle());
    CHECK(tri.inradius == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tri.chebyshev_center.norm() < 1e-12);

    const Polytope T = shapes::right_trapezoid();
    const GeometrySummary tr = measures(T);
    std::vector<Eigen::Vector2d> ring{{0, 0}, {3, 0}, {2, 1}, {0, 1}};
    CHECK(tr.volume == doctest::Approx(oracle::shoelace(ring)).epsilon(1e-13));
    CHECK(tr.volume == doctest::Approx(2.5).epsilon(1e-13));
    CHECK(tr.surface_area == doctest::Approx(6.0 + std::sqrt(2.0)).epsilon(1e-13));
  }

  TEST_CASE("cube and simplex measures in three dimensions") {
    const GeometrySummary cube = measures(shapes::box(pt({0, 0, 0}), pt({1, 2, 3})));
    CHECK(cube.volume == doctest::Approx(6.0).epsilon(1e-13));
    CHECK(cube.surface_area == doctest::Approx(22.0).epsilon(1e-13));
    CHECK(cube.inradius == doctest::Approx(0.5).epsilon(1e-12));

    // simplex with vertices 0, a e1, b e2, c e3: volume abc/6 by the determinant formula
    const double a = 1.0, b = 2.0, c = 3.0;
    const Point n = pt({1 / a, 1 / b, 1 / c});
    const Polytope S = build_polytope({hs(pt({-1, 0, 0}), 0), hs(pt({0, -1, 0}), 0), hs(pt({0, 0, -1}), 0), hs(n, 1.0)});
    const GeometrySummary g = measures(S);
    CHECK(g.volume == doctest::Approx(a * b * c / 6.0).epsilon(1e-12));
    const double slanted = 0.5 * std::sqrt(a * a * b * b + b * b * c * c + c * c * a * a);
    CHECK(g.surface_area == doctest::Approx(0.5 * (a * b + b * c + c * a) + slanted).epsilon(1e-12));
  }

  TEST_CASE("face areas sum to the surface area and inradius is at most half the diameter") {
    for (unsigned seed = 1; seed <= 10; ++seed) {
      const GeometrySummary g = measures(shapes::random_polygon(5 + static_cast<int>(seed % 4), seed));
      double sum = 0.0;
      for (double a : g.face_areas) sum += a;
      CHECK(sum == doctest::Approx(g.surface_area).epsilon(1e-10));
      CHECK(g.inradius <= 0.5 * g.diameter + 1e-12);
    }
  }

  TEST_CASE("random polygons agree with the shoelace formula") {
    for (unsigned seed = 1; seed <= 20; ++seed) {
      const Polytope P = shapes::random_polygon(6, seed);
      std::vector<Eigen::Vector2d> ring;
      Eigen::Vector2d c = P.vertex_centroid();
      for (const auto& v : P.vertices()) ring.emplace_back(v.point(0), v.point(1));
      std::sort(ring.begin(), ring.end(), [&](const auto& p, const auto& q) {
        return std::atan2(p.y() - c.y(), p.x() - c.x()) < std::atan2(q.y() - c.y(), q.x() - c.x());
      });
      CHECK(measures(P).volume == doctest::Approx(oracle::shoelace(ring)).epsilon(1e-12));
    }
  }

  TEST_CASE("vertex active sets respect the relative tolerance") {
    for (unsigned seed = 1; seed <= 10; ++seed) {
      const Polytope P = shapes::random_polygon(7, seed);
      for (const auto& v : P.vertices()) {
        CHECK(v.active.size() >= 2);
        const Eigen::VectorXd s = P.slack(v.point);
        for (int i = 0; i < P.face_count(); ++i) {
          const bool active = std::find(v.active.begin(), v.active.end(), i) != v.active.end();
          if (active)
            CHECK(std::abs(s(i)) <= 1e-10 * P.diameter());
          else
            CHECK(s(i) > 0.0);
        }
      }
    }
  }

  TEST_CASE("rigid motions preserve combinatorics and measures") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (unsigned seed = 1; seed <= 10; ++seed) {
      const Polytope P = shapes::random_polygon(6, seed);
      const Eigen::Matrix2d R = rotation(3.0 * U(rng));
      const Polytope Q = rigid_transform(P, R, pt({5 * U(rng), 5 * U(rng)}));
      CHECK(Q.vertices().size() == P.vertices().size());
      CHECK(Q.face_count() == P.face_count());
      for (std::size_t k = 0; k < P.vertices().size(); ++k)
        CHECK(Q.vertices()[k].active.size() == P.vertices()[k].active.size());
      const GeometrySummary a = measures(P), b = measures(Q);
      CHECK(b.volume == doctest::Approx(a.volume).epsilon(1e-12));
      CHECK(b.surface_area == doctest::Approx(a.surface_area).epsilon(1e-12));
      CHECK(b.inradius == doctest::Approx(a.inradius).epsilon(1e-10));
    }
  }

  TEST_CASE("scaling multiplies volume by s^d") {
    const Polytope P = shapes::right_trapezoid();
    const GeometrySummary g = measures(scaled(P, 2.5));
    CHECK(g.volume == doctest::Approx(2.5 * 2.5 * 2.5).epsilon(1e-13));
    CHECK(g.diameter == doctest::Approx(2.5 * measures(P).diameter).epsilon(1e-13));
  }

  TEST_CASE("Hausdorff distance examples") {
    const Polytope sq = shapes::unit_square();
    CHECK(hausdorff_distance(sq, sq) == doctest::Approx(0.0));
    CHECK(hausdorff_distance(sq, shapes::rectangle(0.9, 1.0)) == doctest::Approx(0.1).epsilon(1e-12));
    // diamond through the edge midpoints; the square's corners are farthest
    const double s = 1.0 / std::sqrt(2.0);
    const Polytope diamond = build_polytope({hs(pt({s, s}), 1.5 * s), hs(pt({-s, s}), 0.5 * s), hs(pt({-s, -s}), -0.5 * s),
                                             hs(pt({s, -s}), 0.5 * s)});
    CHECK(hausdorff_distance(sq, diamond) == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-12));
    CHECK(distance_to(sq, pt({2, 0.5})) == doctest::Approx(1.0));
    CHECK(distance_to(sq, pt({0.3, 0.3})) == 0.0);
  }

  TEST_CASE("Hausdorff distance satisfies the triangle inequality on random boxes") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto random_box = [&] {
      const double x = U(rng), y = U(rng);
      return shapes::box(pt({x, y}), pt({x + 0.2 + U(rng), y + 0.2 + U(rng)}));
    };
    for (int trial = 0; trial < 30; ++trial) {
      const Polytope A = random_box(), B = random_box(), C = random_box();
      CHECK(hausdorff_distance(A, C) <= hausdorff_distance(A, B) + hausdorff_distance(B, C) + 1e-12);
      CHECK(hausdorff_distance(A, B) == doctest::Approx(hausdorff_distance(B, A)).epsilon(1e-14));
    }
  }

  TEST_CASE("clipped squares converge to the square in Hausdorff distance") {
    const Polytope sq = shapes::unit_square();
    for (double eps : {0.2, 0.1, 0.05})
      CHECK(hausdorff_distance(sq, shapes::clipped_square(eps)) == doctest::Approx(eps / std::sqrt(2.0)).epsilon(1e-12));
  }
}
