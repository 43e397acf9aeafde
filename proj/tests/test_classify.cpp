#include "oracles.hpp"
#include "polyrobin/classify.hpp"
#include "polyrobin/fem.hpp"
#include "polyrobin/mesh2d.hpp"
#include "polyrobin/shapes.hpp"

#include <doctest.h>

#include <Eigen/Geometry>
#include <random>

using namespace polyrobin;
using oracle::pt;

namespace {

HalfSpace hs(Point n, double b) { return {n.normalized(), b / n.norm()}; }

/// Downward cone with apex at the origin and four facets, capped by z >= -1.
Polytope inconsistent_cone() {
  return build_polytope({hs(pt({1, 0, 1}), 0), hs(pt({-1, 0, 1}), 0), hs(pt({0, 1, 1}), 0), hs(pt({0, -1, 2}), 0),
                         hs(pt({0, 0, -1}), 1)});
}

std::vector<Point> cone_normals() {
  return {pt({1, 0, 1}).normalized(), pt({-1, 0, 1}).normalized(), pt({0, 1, 1}).normalized(),
          pt({0, -1, 2}).normalized()};
}

}  // namespace

TEST_SUITE("classify") {
  TEST_CASE("circumsolid test on the reference shapes") {
    auto tri = is_circumsolid(shapes::equilateral_triangle());
    REQUIRE(tri);
    CHECK(tri->center.norm() < 1e-12);
    CHECK(tri->radius == doctest::Approx(1.0).epsilon(1e-12));

    auto sq = is_circumsolid(shapes::unit_square());
    REQUIRE(sq);
    CHECK((sq->center - pt({0.5, 0.5})).norm() < 1e-12);
    CHECK(sq->radius == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_FALSE(is_circumsolid(shapes::right_trapezoid()));
    CHECK_FALSE(is_circumsolid(shapes::rectangle(3.0, 1.0)));
  }

  TEST_CASE("classification kinds") {
    const Classification tri = classify(shapes::equilateral_triangle());
    REQUIRE(std::holds_alternative<Circumsolid>(tri.kind));
    CHECK(std::get<Circumsolid>(tri.kind).radius == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tri.factors.size() == 1);

    const Classification pent = classify(shapes::regular_polygon(5));
    CHECK(std::holds_alternative<Circumsolid>(pent.kind));

    const Classification rect = classify(shapes::rectangle(3.0, 1.0));
    REQUIRE(std::holds_alternative<ProductOfCircumsolids>(rect.kind));
    REQUIRE(rect.factors.size() == 2);
    std::vector<double> radii{rect.factors[0].radius, rect.factors[1].radius};
    std::sort(radii.begin(), radii.end());
    CHECK(radii[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(radii[1] == doctest::Approx(1.5).epsilon(1e-12));
    for (const auto& f : rect.factors) {
      CHECK(f.basis.cols() == 1);
      // center along the factor direction: 0.5 for e2, 1.5 for e1
      const double center = std::abs(f.center(0));
      CHECK(center == doctest::Approx(f.radius).epsilon(1e-12));
    }

    const Classification sq = classify(shapes::unit_square());
    CHECK(std::holds_alternative<ProductOfCircumsolids>(sq.kind));
    CHECK(sq.circumsolid.has_value());
    CHECK(sq.labels().size() == 2);

    const Classification trap = classify(shapes::right_trapezoid());
    CHECK(std::holds_alternative<Other>(trap.kind));
    CHECK(trap.kind_name() == "Other");
  }

  TEST_CASE("product factors are orthogonal and span the space") {
    const Classification box = classify(shapes::box(pt({0, 0, 0}), pt({1, 2, 4})));
    REQUIRE(std::holds_alternative<ProductOfCircumsolids>(box.kind));
    Eigen::MatrixXd all(3, 0);
    for (const auto& f : box.factors) {
      Eigen::MatrixXd next(3, all.cols() + f.basis.cols());
      next << all, f.basis;
      all = next;
    }
    CHECK(all.cols() == 3);
    CHECK((all.transpose() * all - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);
  }

  TEST_CASE("consistent normals") {
    auto g = consistent_normals({pt({-1, 0, 0}), pt({0, -1, 0}), pt({0, 0, -1})});
    REQUIRE(g);
    CHECK((*g - pt({1, 1, 1})).norm() < 1e-12);

    CHECK_FALSE(consistent_normals(cone_normals()));

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(0.0, 2.0 * M_PI);
    for (int trial = 0; trial < 50; ++trial) {
      const double a = U(rng), b = a + 0.1 + 0.9 * U(rng) / 2.0;
      CHECK(consistent_normals({pt({std::cos(a), std::sin(a)}), pt({std::cos(b), std::sin(b)})}));
    }
  }

  TEST_CASE("every subset of a consistent normal set is consistent") {
    const Polytope P = shapes::box(pt({0, 0, 0}), pt({1, 1, 1}));
    std::vector<Point> normals;
    for (const auto& h : P.halfspaces()) normals.push_back(h.normal);
    const std::vector<Point> corner{normals[1], normals[3], normals[5]};
    REQUIRE(consistent_normals(corner));
    for (unsigned mask = 1; mask < 8; ++mask) {
      std::vector<Point> sub;
      for (int k = 0; k < 3; ++k)
        if (mask & (1u << k)) sub.push_back(corner[static_cast<std::size_t>(k)]);
      CHECK(consistent_normals(sub));
    }
    // subsets of the inconsistent cone with three normals are consistent
    const auto cone = cone_normals();
    for (int drop = 0; drop < 4; ++drop) {
      std::vector<Point> sub;
      for (int k = 0; k < 4; ++k)
        if (k != drop) sub.push_back(cone[static_cast<std::size_t>(k)]);
      CHECK(consistent_normals(sub));
    }
  }

  TEST_CASE("polygon vertices are consistent and the capped cone apex is not") {
    for (unsigned seed = 1; seed <= 20; ++seed)
      for (const auto& r : analyze_normals(shapes::random_polygon(7, seed))) CHECK(r.consistent);

    const Polytope P = inconsistent_cone();
    CHECK(P.face_count() == 5);
    int bad = 0;
    for (const auto& r : analyze_normals(P)) {
      if (!r.consistent) {
        ++bad;
        CHECK(r.point.norm() < 1e-12);
      }
    }
    CHECK(bad == 1);
    CHECK(classify(P).has_inconsistent_normals());
  }

  TEST_CASE("classification is invariant under rigid motions and covariant in the center") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::Matrix2d R = Eigen::Rotation2Dd(3.0 * U(rng)).toRotationMatrix();
      const Point t = pt({3 * U(rng), 3 * U(rng)});
      const Classification tri = classify(rigid_transform(shapes::equilateral_triangle(), R, t));
      REQUIRE(std::holds_alternative<Circumsolid>(tri.kind));
      CHECK((std::get<Circumsolid>(tri.kind).center - t).norm() < 1e-10);
      CHECK(std::holds_alternative<ProductOfCircumsolids>(classify(rigid_transform(shapes::rectangle(3, 1), R, t)).kind));
      CHECK(std::holds_alternative<Other>(classify(rigid_transform(shapes::right_trapezoid(), R, t)).kind));
    }
  }

  TEST_CASE("scaling scales radius by s and mu by 1/s") {
    const double s = 3.0;
    const Classification a = classify(shapes::rectangle(3.0, 1.0));
    const Classification b = classify(scaled(shapes::rectangle(3.0, 1.0), s));
    CHECK(perturbation_mu(b.factors) == doctest::Approx(perturbation_mu(a.factors) / s).epsilon(1e-12));
    auto tri = is_circumsolid(scaled(shapes::equilateral_triangle(), s));
    REQUIRE(tri);
    CHECK(tri->radius == doctest::Approx(s).epsilon(1e-12));
  }

  TEST_CASE("quadratic solution examples") {
    auto tri = quadratic_solution(shapes::equilateral_triangle());
    REQUIRE(tri);
    CHECK(tri->laplacian() == doctest::Approx(-2.0).epsilon(1e-12));
    const Point x = pt({0.3, -0.2});
    CHECK((*tri)(x) - tri->constant == doctest::Approx(-0.5 * x.squaredNorm()).epsilon(1e-12));

    auto sq = quadratic_solution(shapes::unit_square());
    REQUIRE(sq);
    CHECK(sq->laplacian() == doctest::Approx(-4.0).epsilon(1e-12));
    const Point y = pt({0.1, 0.7});
    CHECK((*sq)(y) - (*sq)(pt({0.5, 0.5})) ==
          doctest::Approx(-(0.4 * 0.4) - (0.2 * 0.2)).epsilon(1e-12));
    CHECK((sq->hessian - sq->hessian.transpose()).norm() < 1e-12);

    CHECK_FALSE(quadratic_solution(shapes::right_trapezoid()));
  }

  TEST_CASE("quadratic solution has unit inward flux on every face") {
    for (const Polytope& P : {shapes::equilateral_triangle(), shapes::rectangle(3, 1), shapes::regular_polygon(5),
                              shapes::box(pt({0, 0, 0}), pt({1, 2, 3}))}) {
      auto q = quadratic_solution(P);
      REQUIRE(q);
      for (int i = 0; i < P.face_count(); ++i) {
        const auto verts = P.face_vertices(i);
        Point c = Point::Zero(P.dim());
        for (int v : verts) c += P.vertices()[static_cast<std::size_t>(v)].point;
        c /= static_cast<double>(verts.size());
        CHECK(q->gradient(c).dot(P.halfspace(i).normal) == doctest::Approx(-1.0).epsilon(1e-10));
      }
      const GeometrySummary g = measures(P);
      CHECK(-q->laplacian() == doctest::Approx(g.surface_area / g.volume).epsilon(1e-10));
    }
  }

  TEST_CASE("quadratic solution satisfies the weak form against P1 test functions") {
    for (const Polytope& P : {shapes::equilateral_triangle(), shapes::rectangle(3, 1)}) {
      auto q = quadratic_solution(P);
      REQUIRE(q);
      double previous = 0.0;
      for (double h : {0.2, 0.1, 0.05}) {
        const Mesh M = triangulate(P, h);
        const OperatorSet ops = assemble(M);
        Eigen::VectorXd qv(static_cast<Eigen::Index>(M.node_count()));
        for (std::size_t i = 0; i < M.node_count(); ++i) qv(static_cast<Eigen::Index>(i)) = (*q)(M.nodes[i]);
        Eigen::VectorXd rhs = -q->laplacian() * (ops.mass * Eigen::VectorXd::Ones(qv.size()));
        for (const auto& f : ops.face_load) rhs -= f;
        const double res = (ops.stiffness * qv - rhs).cwiseAbs().maxCoeff();
        MESSAGE("h = " << M.h << " weak residual " << res);
        if (previous > 0.0) CHECK(res < 0.3 * previous);
        previous = res;
      }
    }
  }

  TEST_CASE("sum of face measures equals mu times volume") {
    for (const Polytope& P : {shapes::unit_square(), shapes::equilateral_triangle(), shapes::rectangle(3, 1),
                              shapes::regular_polygon(5)}) {
      const Classification c = classify(P);
      const GeometrySummary g = measures(P);
      CHECK(perturbation_mu(c.factors) * g.volume == doctest::Approx(g.surface_area).epsilon(1e-10));
    }
  }
}
