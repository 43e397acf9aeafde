#include "polyrobin/classify.hpp"

#include "polyrobin/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace polyrobin {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Orthonormal column basis of span(vectors), each column oriented so that its
// largest-magnitude entry is positive.
Eigen::MatrixXd span_basis(const std::vector<Point>& vectors, double tol) {
  const Eigen::Index d = vectors.front().size();
  Eigen::MatrixXd A(d, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) A.col(static_cast<Eigen::Index>(i)) = vectors[i];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > tol * std::max(1.0, s(0))) ++r;
  Eigen::MatrixXd B = svd.matrixU().leftCols(r);
  // Prefer coordinate-aligned bases when the span contains coordinate axes.
  if (r == 1) {
    Eigen::Index k;
    B.col(0).cwiseAbs().maxCoeff(&k);
    if (B(k, 0) < 0) B.col(0) *= -1.0;
    return B;
  }
  Eigen::MatrixXd P = B * B.transpose();
  std::vector<Point> picked;
  for (Eigen::Index k = 0; k < d && static_cast<Eigen::Index>(picked.size()) < r; ++k) {
    Point e = P.col(k);
    for (const auto& q : picked) e -= q.dot(e) * q;
    if (e.norm() > 1e-6) picked.push_back(e.normalized());
  }
  for (Eigen::Index c = 0; c < r; ++c) {
    B.col(c) = picked[static_cast<std::size_t>(c)];
    Eigen::Index k;
    B.col(c).cwiseAbs().maxCoeff(&k);
    if (B(k, c) < 0) B.col(c) *= -1.0;
  }
  return B;
}

void note_borderline(std::vector<std::string>& out, const std::string& what, double residual, double tol) {
  if (residual > tol / 100.0 && residual < tol * 100.0) {
    std::ostringstream s;
    s << what << " residual " << residual << " is within two decades of tolerance " << tol;
    out.push_back(s.str());
  }
}

struct Groups {
  std::vector<std::vector<int>> members;
  std::vector<Eigen::MatrixXd> bases;
};

Groups group_normals(const Polytope& P, double tol) {
  const int m = P.face_count();
  UnionFind uf(m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (std::abs(P.halfspace(i).normal.dot(P.halfspace(j).normal)) > tol) uf.unite(i, j);
  Groups g;
  std::vector<int> root_to_group(static_cast<std::size_t>(m), -1);
  for (int i = 0; i < m; ++i) {
    const int r = uf.find(i);
    if (root_to_group[r] < 0) {
      root_to_group[r] = static_cast<int>(g.members.size());
      g.members.emplace_back();
    }
    g.members[root_to_group[r]].push_back(i);
  }
  int total_rank = 0;
  for (const auto& mem : g.members) {
    std::vector<Point> normals;
    for (int i : mem) normals.push_back(P.halfspace(i).normal);
    g.bases.push_back(span_basis(normals, tol));
    total_rank += static_cast<int>(g.bases.back().cols());
  }
  if (total_rank != P.dim())
    throw Error(ErrorKind::InternalInconsistency, "orthogonal normal groups do not span R^d");
  for (std::size_t a = 0; a < g.bases.size(); ++a)
    for (std::size_t b = a + 1; b < g.bases.size(); ++b)
      if ((g.bases[a].transpose() * g.bases[b]).cwiseAbs().maxCoeff() > std::sqrt(tol))
        throw Error(ErrorKind::InternalInconsistency, "normal groups are not mutually orthogonal");
  return g;
}

std::optional<std::vector<Factor>> factorize(const Polytope& P, double tol, std::vector<std::string>* borderline) {
  Groups g = group_normals(P, tol);
  std::vector<Factor> factors;
  for (std::size_t k = 0; k < g.members.size(); ++k) {
    const Eigen::MatrixXd& E = g.bases[k];
    std::vector<HalfSpace> projected;
    for (int i : g.members[k]) {
      Point n = E.transpose() * P.halfspace(i).normal;
      projected.push_back({n, P.halfspace(i).offset});
    }
    auto ball = is_circumsolid(projected, P.diameter(), tol);
    if (borderline != nullptr) {
      // recompute the raw residual for reporting even when the test fails
      Eigen::MatrixXd A(static_cast<Eigen::Index>(projected.size()), E.cols() + 1);
      Eigen::VectorXd b(A.rows());
      for (Eigen::Index r = 0; r < A.rows(); ++r) {
        A.row(r).head(E.cols()) = projected[r].normal.transpose();
        A(r, E.cols()) = 1.0;
        b(r) = projected[r].offset;
      }
      Eigen::VectorXd z = A.colPivHouseholderQr().solve(b);
      note_borderline(*borderline, "factor " + std::to_string(k), (A * z - b).cwiseAbs().maxCoeff(),
                      tol * P.diameter());
    }
    if (!ball) return std::nullopt;
    factors.push_back({E, ball->center, ball->radius, g.members[k], ball->residual});
  }
  return factors;
}

}  // namespace

bool Classification::has_inconsistent_normals() const {
  return std::any_of(vertex_reports.begin(), vertex_reports.end(), [](const auto& r) { return !r.consistent; });
}

std::string Classification::kind_name() const {
  if (std::holds_alternative<Circumsolid>(kind)) return "Circumsolid";
  if (std::holds_alternative<ProductOfCircumsolids>(kind)) return "ProductOfCircumsolids";
  return "Other";
}

std::vector<std::string> Classification::labels() const {
  std::vector<std::string> out;
  if (circumsolid) out.emplace_back("Circumsolid");
  if (!factors.empty()) out.emplace_back("ProductOfCircumsolids");
  if (out.empty()) out.emplace_back("Other");
  return out;
}

std::optional<InscribedBall> is_circumsolid(const std::vector<HalfSpace>& hs, double scale, double tol) {
  if (hs.empty()) return std::nullopt;
  const Eigen::Index k = hs.front().normal.size();
  Eigen::MatrixXd A(static_cast<Eigen::Index>(hs.size()), k + 1);
  Eigen::VectorXd b(A.rows());
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    A.row(r).head(k) = hs[r].normal.transpose();
    A(r, k) = 1.0;
    b(r) = hs[r].offset;
  }
  Eigen::VectorXd z = A.colPivHouseholderQr().solve(b);
  const double residual = (A * z - b).cwiseAbs().maxCoeff();
  if (!(residual <= tol * scale) || !(z(k) > 0.0)) return std::nullopt;
  return InscribedBall{z.head(k), z(k), residual};
}

std::optional<InscribedBall> is_circumsolid(const Polytope& P, double tol) {
  return is_circumsolid(std::vector<HalfSpace>(P.halfspaces().begin(), P.halfspaces().end()), P.diameter(), tol);
}

ClassificationKind product_decomposition(const Polytope& P, double tol) {
  auto factors = factorize(P, tol, nullptr);
  if (!factors) return Other{};
  if (factors->size() == 1) {
    const auto& f = factors->front();
    return Circumsolid{f.basis * f.center, f.radius};
  }
  return ProductOfCircumsolids{*factors};
}

std::optional<Point> consistent_normals(const std::vector<Point>& normals, double tol) {
  if (normals.empty()) return std::nullopt;
  const Eigen::Index d = normals.front().size();
  Eigen::MatrixXd N(static_cast<Eigen::Index>(normals.size()), d);
  for (std::size_t i = 0; i < normals.size(); ++i) N.row(static_cast<Eigen::Index>(i)) = normals[i].transpose();
  const Eigen::VectorXd rhs = -Eigen::VectorXd::Ones(N.rows());
  // minimum-norm least-squares solution
  Eigen::VectorXd gamma = N.completeOrthogonalDecomposition().solve(rhs);
  if ((N * gamma - rhs).cwiseAbs().maxCoeff() > tol) return std::nullopt;
  return gamma;
}

// Only vertices are examined: the active set of any boundary point is a subset
// of the active set of some vertex of its face, and a solvable system stays
// solvable when equations are dropped. Hence some boundary point has
// inconsistent normals iff some vertex does.
std::vector<VertexReport> analyze_normals(const Polytope& P, double tol) {
  std::vector<VertexReport> out;
  for (const auto& v : P.vertices()) {
    std::vector<Point> normals;
    for (int i : v.active) normals.push_back(P.halfspace(i).normal);
    VertexReport r;
    r.point = v.point;
    r.gamma = consistent_normals(normals, tol);
    r.consistent = r.gamma.has_value();
    Eigen::MatrixXd N(static_cast<Eigen::Index>(normals.size()), P.dim());
    for (std::size_t i = 0; i < normals.size(); ++i) N.row(static_cast<Eigen::Index>(i)) = normals[i].transpose();
    const Eigen::VectorXd rhs = -Eigen::VectorXd::Ones(N.rows());
    r.residual = (N * N.completeOrthogonalDecomposition().solve(rhs) - rhs).cwiseAbs().maxCoeff();
    out.push_back(std::move(r));
  }
  return out;
}

Classification classify(const Polytope& P, double tol) {
  Classification c;
  auto factors = factorize(P, tol, &c.borderline);
  if (factors) {
    c.factors = *factors;
    if (factors->size() == 1)
      c.kind = Circumsolid{factors->front().basis * factors->front().center, factors->front().radius};
    else
      c.kind = ProductOfCircumsolids{*factors};
  } else {
    c.kind = Other{};
  }
  c.circumsolid = is_circumsolid(P, tol);
  c.vertex_reports = analyze_normals(P, tol);
  for (std::size_t i = 0; i < c.vertex_reports.size(); ++i)
    note_borderline(c.borderline, "vertex " + std::to_string(i) + " normal consistency", c.vertex_reports[i].residual,
                    tol);
  return c;
}

double perturbation_mu(const std::vector<Factor>& factors) {
  double mu = 0.0;
  for (const auto& f : factors) mu += static_cast<double>(f.basis.cols()) / f.radius;
  return mu;
}

std::optional<QuadraticForm> quadratic_solution(const Polytope& P, double tol) {
  auto factors = factorize(P, tol, nullptr);
  if (!factors) return std::nullopt;
  const int d = P.dim();
  QuadraticForm q{Eigen::MatrixXd::Zero(d, d), Point::Zero(d), 0.0};
  for (const auto& f : *factors) {
    const Eigen::MatrixXd& E = f.basis;
    q.hessian -= E * E.transpose() / f.radius;
    q.linear += E * f.center / f.radius;
    q.constant -= 0.5 * f.center.squaredNorm() / f.radius;
  }
  q.hessian = 0.5 * (q.hessian + q.hessian.transpose());
  if (d <= 3) {
    const auto g = measures(P);
    const double mu = perturbation_mu(*factors);
    if (std::abs(mu - g.surface_area / g.volume) > 1e-10 * mu)
      throw Error(ErrorKind::InternalInconsistency, "product mu disagrees with surface/volume");
  }
  return q;
}

}  // namespace polyrobin
