#include "polyrobin/polytope.hpp"

#include "polyrobin/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace polyrobin {

namespace {

// Calls fn on every k-subset of {0, ..., m-1} in lexicographic order.
void for_each_subset(int m, int k, const std::function<void(const std::vector<int>&)>& fn) {
  if (k > m || k < 0) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == m - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

Eigen::MatrixXd rows_of(std::span<const HalfSpace> hs, const std::vector<int>& idx, int d) {
  Eigen::MatrixXd A(static_cast<Eigen::Index>(idx.size()), d);
  for (std::size_t r = 0; r < idx.size(); ++r) A.row(static_cast<Eigen::Index>(r)) = hs[idx[r]].normal.transpose();
  return A;
}

int numeric_rank(const Eigen::MatrixXd& A, double tol = 1e-12) {
  if (A.size() == 0) return 0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  lu.setThreshold(tol);
  return static_cast<int>(lu.rank());
}

// Vertices of {x : n_i . x <= b_i} by exhaustive d-subset solving.
std::vector<Vertex> enumerate_vertices(const std::vector<HalfSpace>& hs, int d, double tol) {
  const int m = static_cast<int>(hs.size());
  std::vector<Vertex> out;
  for_each_subset(m, d, [&](const std::vector<int>& idx) {
    Eigen::MatrixXd A = rows_of(hs, idx, d);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) return;
    Eigen::VectorXd b(d);
    for (int r = 0; r < d; ++r) b(r) = hs[idx[r]].offset;
    Point x = lu.solve(b);
    for (int j = 0; j < m; ++j)
      if (hs[j].normal.dot(x) > hs[j].offset + tol) return;
    for (auto& v : out) {
      if ((v.point - x).norm() <= tol) return;
    }
    out.push_back({x, {}});
  });
  for (auto& v : out) {
    for (int j = 0; j < m; ++j)
      if (std::abs(hs[j].normal.dot(v.point) - hs[j].offset) <= tol) v.active.push_back(j);
  }
  return out;
}

double max_pair_distance(const std::vector<Vertex>& vs) {
  double diam = 0.0;
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j) diam = std::max(diam, (vs[i].point - vs[j].point).norm());
  return diam;
}

// Affine dimension of a point set.
int affine_dim(const std::vector<Point>& pts) {
  if (pts.empty()) return -1;
  Eigen::MatrixXd D(static_cast<Eigen::Index>(pts.size()), pts[0].size());
  for (std::size_t i = 0; i < pts.size(); ++i) D.row(static_cast<Eigen::Index>(i)) = (pts[i] - pts[0]).transpose();
  double scale = D.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0;
  return numeric_rank(D / scale, 1e-9);
}

// Orthonormal basis (columns) of the plane {x : n . x = 0}.
Eigen::MatrixXd plane_basis(const Point& n) {
  const Eigen::Index d = n.size();
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(d, d) - n * n.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU);
  return svd.matrixU().leftCols(d - 1);
}

double polygon_area_in_plane(const std::vector<Point>& pts, const Point& normal) {
  if (pts.size() < 3) return 0.0;
  Eigen::MatrixXd basis = plane_basis(normal);
  Point c = Point::Zero(pts[0].size());
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  std::vector<std::pair<double, Eigen::Vector2d>> uv;
  for (const auto& p : pts) {
    Eigen::Vector2d q = basis.transpose() * (p - c);
    uv.emplace_back(std::atan2(q.y(), q.x()), q);
  }
  std::sort(uv.begin(), uv.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double area = 0.0;
  for (std::size_t i = 0; i < uv.size(); ++i) {
    const auto& a = uv[i].second;
    const auto& b = uv[(i + 1) % uv.size()].second;
    area += a.x() * b.y() - a.y() * b.x();
  }
  return 0.5 * std::abs(area);
}

}  // namespace

std::vector<int> Polytope::face_vertices(int i) const {
  std::vector<int> out;
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    const auto& a = vertices_[v].active;
    if (std::find(a.begin(), a.end(), i) != a.end()) out.push_back(static_cast<int>(v));
  }
  return out;
}

Eigen::VectorXd Polytope::slack(const Point& x) const {
  Eigen::VectorXd s(face_count());
  for (int i = 0; i < face_count(); ++i) s(i) = halfspaces_[i].offset - halfspaces_[i].normal.dot(x);
  return s;
}

bool Polytope::contains(const Point& x, double tol) const {
  if (x.size() != dim_) return false;
  return slack(x).minCoeff() >= -tol;
}

Point Polytope::vertex_centroid() const {
  Point c = Point::Zero(dim_);
  for (const auto& v : vertices_) c += v.point;
  return c / static_cast<double>(vertices_.size());
}

Polytope build_polytope(std::vector<HalfSpace> hs, double rel_tol) {
  if (hs.empty()) throw Error(ErrorKind::DegenerateInput, "no half-spaces given");
  const int d = static_cast<int>(hs.front().normal.size());
  if (d < 1) throw Error(ErrorKind::DegenerateInput, "dimension must be at least 1");
  if (static_cast<int>(hs.size()) < d + 1)
    throw Error(ErrorKind::UnboundedDomain, "need at least d+1 half-spaces for a bounded domain");
  if (!(rel_tol > 0.0)) throw Error(ErrorKind::Config, "tolerance must be positive");

  double scale = 1.0;
  for (auto& h : hs) {
    if (h.normal.size() != d) throw Error(ErrorKind::DimensionMismatch, "half-space normals of mixed dimension");
    const double n = h.normal.norm();
    if (!(n > 0.0) || !std::isfinite(n) || !std::isfinite(h.offset))
      throw Error(ErrorKind::DegenerateInput, "zero or non-finite normal");
    h.normal /= n;
    h.offset /= n;
    scale = std::max(scale, std::abs(h.offset));
  }
  for (std::size_t i = 0; i < hs.size(); ++i)
    for (std::size_t j = i + 1; j < hs.size(); ++j)
      if ((hs[i].normal - hs[j].normal).norm() <= 1e-12 && std::abs(hs[i].offset - hs[j].offset) <= 1e-12 * scale) {
        std::ostringstream msg;
        msg << "half-spaces " << i << " and " << j << " coincide";
        throw Error(ErrorKind::DegenerateInput, msg.str());
      }

  const int m = static_cast<int>(hs.size());
  {
    std::vector<int> all(static_cast<std::size_t>(m));
    std::iota(all.begin(), all.end(), 0);
    if (numeric_rank(rows_of(hs, all, d), 1e-10) < d)
      throw Error(ErrorKind::UnboundedDomain, "normals do not span R^d");
  }
  // A nonzero pointed recession cone has an extreme ray cut out by d-1 planes.
  bool unbounded = false;
  for_each_subset(m, d - 1, [&](const std::vector<int>& idx) {
    if (unbounded) return;
    Point dir;
    if (d == 1) {
      dir = Point::Ones(1);
    } else {
      Eigen::MatrixXd A = rows_of(hs, idx, d);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      lu.setThreshold(1e-12);
      if (lu.rank() != d - 1) return;
      dir = lu.kernel().col(0).normalized();
    }
    for (double sgn : {1.0, -1.0}) {
      bool ray = true;
      for (int j = 0; j < m && ray; ++j)
        if (sgn * hs[j].normal.dot(dir) > 1e-12) ray = false;
      if (ray) unbounded = true;
    }
  });
  if (unbounded) throw Error(ErrorKind::UnboundedDomain, "normals do not positively span R^d");

  auto vertices = enumerate_vertices(hs, d, 1e-10 * scale);
  if (vertices.empty()) throw Error(ErrorKind::EmptyDomain, "intersection of half-spaces is empty");

  Polytope P;
  P.dim_ = d;
  P.rel_tol_ = rel_tol;
  P.diameter_ = max_pair_distance(vertices);
  P.tol_ = rel_tol * std::max(P.diameter_, 1e-300);
  P.halfspaces_ = hs;
  P.vertices_ = enumerate_vertices(hs, d, P.tol_);
  if (P.vertices_.empty() || !(P.diameter_ > 0.0))
    throw Error(ErrorKind::EmptyDomain, "domain has empty interior");
  if (chebyshev_ball(P).second <= P.tol_) throw Error(ErrorKind::EmptyDomain, "domain has empty interior");

  // Minimality: keep exactly the half-spaces whose face is (d-1)-dimensional.
  std::vector<HalfSpace> kept;
  for (int i = 0; i < m; ++i) {
    std::vector<Point> pts;
    for (int v : P.face_vertices(i)) pts.push_back(P.vertices_[v].point);
    const int fd = (d == 1) ? (pts.empty() ? -1 : 0) : affine_dim(pts);
    if (fd == d - 1) kept.push_back(hs[i]);
  }
  if (kept.size() != hs.size()) {
    P.halfspaces_ = kept;
    P.vertices_ = enumerate_vertices(kept, d, P.tol_);
  }
  return P;
}

std::vector<int> tangent_cone(const Polytope& P, const Point& x) {
  if (x.size() != P.dim()) throw Error(ErrorKind::DimensionMismatch, "point dimension differs from domain");
  Eigen::VectorXd s = P.slack(x);
  if (s.minCoeff() < -P.tolerance()) throw Error(ErrorKind::PointOutsideDomain, "point lies outside the closed domain");
  std::vector<int> active;
  for (int i = 0; i < P.face_count(); ++i)
    if (std::abs(s(i)) <= P.tolerance()) active.push_back(i);
  return active;
}

std::vector<Point> tangent_cone_normals(const Polytope& P, const Point& x) {
  std::vector<Point> out;
  for (int i : tangent_cone(P, x)) out.push_back(P.halfspace(i).normal);
  return out;
}

std::pair<Point, double> chebyshev_ball(const Polytope& P) {
  // max R s.t. n_i . x + R <= b_i; the optimum sits at a vertex of the lifted
  // polyhedron. Ties (e.g. rectangles) are resolved by averaging all optimal vertices.
  const int d = P.dim();
  const auto hs = P.halfspaces();
  const int m = static_cast<int>(hs.size());
  const double tol = std::max(P.tolerance(), 1e-14);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<Point> best_pts;
  for_each_subset(m, d + 1, [&](const std::vector<int>& idx) {
    Eigen::MatrixXd A(d + 1, d + 1);
    Eigen::VectorXd b(d + 1);
    for (int r = 0; r <= d; ++r) {
      A.row(r).head(d) = hs[idx[r]].normal.transpose();
      A(r, d) = 1.0;
      b(r) = hs[idx[r]].offset;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) return;
    Eigen::VectorXd z = lu.solve(b);
    const double R = z(d);
    for (int j = 0; j < m; ++j)
      if (hs[j].normal.dot(z.head(d)) + R > hs[j].offset + tol) return;
    if (R > best + tol) {
      best = R;
      best_pts.assign(1, z.head(d));
    } else if (R >= best - tol) {
      bool dup = false;
      for (const auto& p : best_pts) dup = dup || (p - z.head(d)).norm() <= tol;
      if (!dup) best_pts.push_back(z.head(d));
    }
  });
  if (best_pts.empty()) return {P.vertex_centroid(), 0.0};
  Point c = Point::Zero(d);
  for (const auto& p : best_pts) c += p;
  return {c / static_cast<double>(best_pts.size()), best};
}

GeometrySummary measures(const Polytope& P) {
  const int d = P.dim();
  if (d > 3) throw Error(ErrorKind::DimensionUnsupported, "measures implemented for d <= 3");
  GeometrySummary g;
  g.diameter = P.diameter();
  const Point c = P.vertex_centroid();
  for (int i = 0; i < P.face_count(); ++i) {
    std::vector<Point> pts;
    for (int v : P.face_vertices(i)) pts.push_back(P.vertices()[v].point);
    double area = 0.0;
    if (d == 1) {
      area = 1.0;
    } else if (d == 2) {
      for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b) area = std::max(area, (pts[a] - pts[b]).norm());
    } else {
      area = polygon_area_in_plane(pts, P.halfspace(i).normal);
    }
    g.face_areas.push_back(area);
    g.surface_area += area;
    // cone over face i with apex at the centroid
    g.volume += area * (P.halfspace(i).offset - P.halfspace(i).normal.dot(c)) / d;
  }
  auto [center, radius] = chebyshev_ball(P);
  g.chebyshev_center = center;
  g.inradius = radius;
  return g;
}

double distance_to(const Polytope& P, const Point& x) {
  if (x.size() != P.dim()) throw Error(ErrorKind::DimensionMismatch, "point dimension differs from domain");
  const double tol = P.tolerance();
  if (P.contains(x, tol)) return 0.0;
  const int d = P.dim();
  const auto hs = P.halfspaces();
  const int m = static_cast<int>(hs.size());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : P.vertices()) best = std::min(best, (v.point - x).norm());
  // The nearest point lies in the relative interior of some face, i.e. it is the
  // projection onto the affine hull of that face.
  for (int k = 1; k < d; ++k) {
    for_each_subset(m, k, [&](const std::vector<int>& idx) {
      Eigen::MatrixXd A = rows_of(hs, idx, d);
      Eigen::MatrixXd G = A * A.transpose();
      Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
      if (std::abs(G.determinant()) < 1e-12) return;
      Eigen::VectorXd r(k);
      for (int j = 0; j < k; ++j) r(j) = A.row(j).dot(x) - hs[idx[j]].offset;
      Point y = x - A.transpose() * ldlt.solve(r);
      if (P.contains(y, tol)) best = std::min(best, (y - x).norm());
    });
  }
  return best;
}

double hausdorff_distance(const Polytope& P, const Polytope& Q) {
  if (P.dim() != Q.dim()) throw Error(ErrorKind::DimensionMismatch, "polytopes of different dimension");
  double h = 0.0;
  for (const auto& v : P.vertices()) h = std::max(h, distance_to(Q, v.point));
  for (const auto& v : Q.vertices()) h = std::max(h, distance_to(P, v.point));
  return h;
}

Polytope rigid_transform(const Polytope& P, const Eigen::MatrixXd& R, const Point& t) {
  std::vector<HalfSpace> hs;
  for (const auto& h : P.halfspaces()) {
    Point n = R * h.normal;
    hs.push_back({n, h.offset + n.dot(t)});
  }
  return build_polytope(std::move(hs), P.relative_tolerance());
}

Polytope scaled(const Polytope& P, double s) {
  std::vector<HalfSpace> hs;
  for (const auto& h : P.halfspaces()) hs.push_back({h.normal, h.offset * s});
  return build_polytope(std::move(hs), P.relative_tolerance());
}

}  // namespace polyrobin
