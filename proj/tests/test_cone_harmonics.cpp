#include "oracles.hpp"
#include "polyrobin/classify.hpp"
#include "polyrobin/cone_harmonics.hpp"
#include "polyrobin/error.hpp"
#include "polyrobin/fem.hpp"
#include "polyrobin/shapes.hpp"

#include <doctest.h>

using namespace polyrobin;
using oracle::pt;

namespace {

int vertex_index(const Polytope& P, const Vec2& x) {
  for (int k = 0; k < static_cast<int>(P.vertices().size()); ++k)
    if ((P.vertices()[static_cast<std::size_t>(k)].point - Point(x)).norm() < 1e-12) return k;
  FAIL("vertex not found");
  return -1;
}

Field sample_field(std::shared_ptr<const Mesh> mesh, const std::function<double(const Vec2&)>& f) {
  Field out;
  out.mesh = mesh;
  out.values.resize(static_cast<Eigen::Index>(mesh->node_count()));
  for (std::size_t i = 0; i < mesh->node_count(); ++i) out.values(static_cast<Eigen::Index>(i)) = f(mesh->nodes[i]);
  return out;
}

Sector quarter_plane() { return make_sector(Vec2(0, 0), Vec2(-1, 0), Vec2(0, -1)); }

}  // namespace

TEST_SUITE("cone_harmonics") {
  TEST_CASE("sector geometry") {
    const Polytope T = shapes::right_trapezoid();
    for (int k = 0; k < static_cast<int>(T.vertices().size()); ++k) {
      const Sector S = sector_at_vertex(T, k);
      const double between = std::acos(std::clamp(S.face_normals[0].dot(S.face_normals[1]), -1.0, 1.0));
      CHECK(between == doctest::Approx(M_PI - S.theta0).epsilon(1e-10));
      for (const auto& n : S.face_normals) CHECK(S.bisector.dot(n) == doctest::Approx(-std::sin(S.theta0 / 2)).epsilon(1e-10));
      CHECK(std::pow(M_PI / S.theta0, 2) >= 1.0);
    }
    const Sector S = sector_at_vertex(T, vertex_index(T, Vec2(2, 1)));
    CHECK(S.theta0 == doctest::Approx(3 * M_PI / 4).epsilon(1e-14));
    CHECK(cone_radius(T, vertex_index(T, Vec2(2, 1))) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("exponents") {
    CHECK(sector_exponent(2 * M_PI / 3, 1).beta == doctest::Approx(1.5));
    CHECK(sector_exponent(2 * M_PI / 3, 1).critical);
    CHECK(sector_exponent(M_PI / 2, 1).beta == doctest::Approx(2.0));
    CHECK_FALSE(sector_exponent(M_PI / 2, 1).critical);
    CHECK(sector_exponent(3 * M_PI / 4, 2).beta == doctest::Approx(8.0 / 3.0));
    CHECK(sector_exponent(3 * M_PI / 4, 1).beta == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    double last = -1.0;
    for (int i = 0; i < 6; ++i) {
      const double b = sector_exponent(1.1, i).beta;
      CHECK(b > last);
      last = b;
    }
    CHECK_THROWS_AS(sector_exponent(0.0, 1), Error);
    CHECK_THROWS_AS(sector_exponent(3.5, 1), Error);
  }

  TEST_CASE("eigenfunctions") {
    const Sector Q = quarter_plane();
    CHECK(sector_eigenfunction(Q, 0, Vec2(0.3, 0.2)) == doctest::Approx(1.0));
    // quarter plane: beta_1 = 2 gives the harmonic quadratic y^2 - x^2, beta_2 = 4 gives -Re (x + iy)^4
    for (const Vec2& p : {Vec2(0.3, 0.2), Vec2(0.1, 0.9), Vec2(1.0, 1.0)}) {
      CHECK(sector_eigenfunction(Q, 1, p) == doctest::Approx(p.y() * p.y() - p.x() * p.x()).epsilon(1e-12));
      const double re4 = std::pow(p.x(), 4) - 6 * p.x() * p.x() * p.y() * p.y() + std::pow(p.y(), 4);
      CHECK(sector_eigenfunction(Q, 2, p) == doctest::Approx(-re4).epsilon(1e-12));
    }

    const Sector S = make_sector(Vec2(0, 0), Vec2(std::sin(3 * M_PI / 8), -std::cos(3 * M_PI / 8)),
                                 Vec2(std::sin(3 * M_PI / 8), std::cos(3 * M_PI / 8)));
    CHECK(S.theta0 == doctest::Approx(3 * M_PI / 4));
    for (double r : {0.2, 0.7}) {
      for (double t : {0.1, 0.5, 1.0}) {
        const Vec2 a = r * Vec2(std::cos(t) * S.bisector.x() - std::sin(t) * S.bisector.y(),
                                std::sin(t) * S.bisector.x() + std::cos(t) * S.bisector.y());
        const Vec2 b = r * Vec2(std::cos(-t) * S.bisector.x() - std::sin(-t) * S.bisector.y(),
                                std::sin(-t) * S.bisector.x() + std::cos(-t) * S.bisector.y());
        CHECK(sector_eigenfunction(S, 1, a) == doctest::Approx(-sector_eigenfunction(S, 1, b)).epsilon(1e-12));
      }
    }
    CHECK_THROWS_AS(sector_eigenfunction(S, 1, Vec2(1, 0)), Error);
  }

  TEST_CASE("eigenfunctions are harmonic and satisfy the Neumann condition") {
    const Sector S = sector_at_vertex(shapes::right_trapezoid(), vertex_index(shapes::right_trapezoid(), Vec2(2, 1)));
    const Vec2 p = S.vertex + 0.5 * S.bisector;
    for (int i = 1; i <= 3; ++i) {
      std::vector<double> lap;
      for (double h : {1e-2, 5e-3}) {
        auto f = [&](const Vec2& q) { return sector_eigenfunction(S, i, q); };
        const double L = (f(p + Vec2(h, 0)) + f(p - Vec2(h, 0)) + f(p + Vec2(0, h)) + f(p - Vec2(0, h)) - 4 * f(p)) / (h * h);
        lap.push_back(std::abs(L));
      }
      CHECK(lap[1] < 0.3 * lap[0] + 1e-9);
      // normal derivative on each edge
      for (const Vec2& n : S.face_normals) {
        const Vec2 tangent(-n.y(), n.x());
        const Vec2 dir = tangent.dot(S.bisector) > 0 ? tangent : Vec2(-tangent);
        const Vec2 q = S.vertex + 0.4 * dir;
        const double dn = oracle::first_derivative(
            [&](double s) { return sector_eigenfunction(S, i, q - s * n); }, 0.01, 1e-3);
        CHECK(std::abs(dn) < 0.05);
      }
    }
  }

  TEST_CASE("psi_1 along the hyperplanar section is odd and not concave") {
    const Sector S = sector_at_vertex(shapes::right_trapezoid(), vertex_index(shapes::right_trapezoid(), Vec2(2, 1)));
    const Vec2 gamma = degree_one_solution(S);
    const Vec2 perp(-S.bisector.y(), S.bisector.x());
    const Vec2 base = S.vertex + S.bisector;  // gamma . (x - vertex) = |gamma|
    CHECK(gamma.dot(base - S.vertex) == doctest::Approx(gamma.norm()).epsilon(1e-14));
    const double tmax = std::tan(S.theta0 / 2) * 0.99;
    bool convex_somewhere = false;
    for (int k = 1; k < 50; ++k) {
      const double t = tmax * k / 50.0;
      const double a = sector_eigenfunction(S, 1, base + t * perp), b = sector_eigenfunction(S, 1, base - t * perp);
      CHECK(std::abs(a + b) <= 1e-12 * std::max(1.0, std::abs(a)));
      const double h = 1e-3;
      const double d2 = sector_eigenfunction(S, 1, base + (t + h) * perp) - 2 * a +
                        sector_eigenfunction(S, 1, base + (t - h) * perp);
      if (d2 > 0.0) convex_somewhere = true;
    }
    CHECK(convex_somewhere);
  }

  TEST_CASE("degree-one solution") {
    CHECK((degree_one_solution(quarter_plane()) - Vec2(1, 1)).norm() < 1e-12);
    const double a = M_PI / 6;  // normals 60 degrees apart -> opening 2 pi / 3
    const Sector S = make_sector(Vec2(0, 0), Vec2(std::cos(-M_PI / 2 - a), std::sin(-M_PI / 2 - a)),
                                 Vec2(std::cos(-M_PI / 2 + a), std::sin(-M_PI / 2 + a)));
    CHECK(S.theta0 == doctest::Approx(2 * M_PI / 3));
    const Vec2 g = degree_one_solution(S);
    CHECK(g.norm() == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));
    for (const auto& n : S.face_normals) CHECK(g.dot(n) == doctest::Approx(-1.0).epsilon(1e-12));
    const Sector H = make_sector(Vec2(0, 0), Vec2(0, -1), Vec2(0, -1));
    CHECK(H.theta0 == doctest::Approx(M_PI));
    CHECK((degree_one_solution(H) - Vec2(0, 1)).norm() < 1e-12);
  }

  TEST_CASE("projection recovers a pure mode") {
    const Polytope T = shapes::right_trapezoid();
    const int k = vertex_index(T, Vec2(2, 1));
    const Sector S = sector_at_vertex(T, k);
    ExpansionOptions opts;
    opts.subtract_degree_one = false;
    std::vector<double> err1, err_other;
    for (double h : {0.02, 0.01}) {
      auto mesh = std::make_shared<const Mesh>(triangulate(T, h));
      const Field f = sample_field(mesh, [&](const Vec2& p) {
        return sector_eigenfunction(S, 1, p) + 0.25 * sector_eigenfunction(S, 2, p);
      });
      const CornerExpansion e = corner_expansion(f, T, k, 0.5, 3, opts);
      REQUIRE(e.coefficients.size() == 3);
      CHECK(e.coefficients[0].beta == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
      err1.push_back(std::abs(e.coefficients[0].f - 1.0));
      err_other.push_back(std::max(std::abs(e.coefficients[1].f - 0.25), std::abs(e.coefficients[2].f)));
      CHECK(e.coefficients[0].spread < 1e-2);
    }
    CHECK(err1.back() < 1e-3);
    CHECK(err_other.back() < 1e-3);
    CHECK(err1[1] < 0.5 * err1[0]);
  }

  TEST_CASE("quadratic solution has no singular modes on the square") {
    const Polytope P = shapes::unit_square();
    auto mesh = std::make_shared<const Mesh>(triangulate_levels(P, 5));
    const PerturbationResult r = solve_perturbation(mesh);
    ExpansionOptions opts;
    opts.mu = r.mu;
    for (int k = 0; k < 4; ++k) {
      const CornerExpansion e = corner_expansion(r.v, P, k, 0.25, 3, opts);
      for (const auto& c : e.coefficients) CHECK(std::abs(c.f) < 1e-3);
    }
  }

  TEST_CASE("trapezoid corner has a nonzero critical coefficient") {
    const Polytope T = shapes::right_trapezoid();
    const int k = vertex_index(T, Vec2(2, 1));
    std::vector<double> f1;
    for (int level : {5, 6}) {
      auto mesh = std::make_shared<const Mesh>(triangulate_levels(T, level));
      const PerturbationResult r = solve_perturbation(mesh);
      ExpansionOptions opts;
      opts.mu = r.mu;
      const CornerExpansion e = corner_expansion(r.v, T, k, 0.4, 2, opts);
      f1.push_back(e.coefficients[0].f);
      CHECK(e.coefficients[0].spread < 0.2);
    }
    CHECK(std::abs(f1[0]) > 0.1);
    CHECK(std::abs(f1[1] - f1[0]) <= 0.2 * std::abs(f1[1]));
  }

  TEST_CASE("expansion errors") {
    const Polytope T = shapes::right_trapezoid();
    const int k = vertex_index(T, Vec2(2, 1));
    auto coarse = std::make_shared<const Mesh>(triangulate_levels(T, 1));
    const Field f = sample_field(coarse, [](const Vec2&) { return 0.0; });
    CHECK_THROWS_AS(corner_expansion(f, T, k, 0.05, 2), Error);
    auto fine = std::make_shared<const Mesh>(triangulate_levels(T, 4));
    const Field g = sample_field(fine, [](const Vec2&) { return 0.0; });
    CHECK_THROWS_AS(corner_expansion(g, T, k, 2.0, 2), Error);
    try {
      corner_expansion(g, T, k, 2.0, 2);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::RadiusTooLarge);
    }
  }
}
