#include "polyrobin/mesh2d.hpp"

#include "polyrobin/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <fstream>
#include <map>
#include <unordered_map>
#include <sstream>

namespace polyrobin {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double max_edge_length(const Mesh& M) {
  double h = 0.0;
  for (const auto& t : M.triangles)
    for (int k = 0; k < 3; ++k) h = std::max(h, (M.nodes[t[k]] - M.nodes[t[(k + 1) % 3]]).norm());
  return h;
}

std::pair<int, int> key(int a, int b) { return a < b ? std::make_pair(a, b) : std::make_pair(b, a); }

}  // namespace

double Mesh::triangle_area(std::size_t t) const {
  const auto& tr = triangles[t];
  return 0.5 * cross(nodes[tr[1]] - nodes[tr[0]], nodes[tr[2]] - nodes[tr[0]]);
}

double Mesh::total_area() const {
  double a = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) a += triangle_area(t);
  return a;
}

double Mesh::boundary_length() const {
  double l = 0.0;
  for (const auto& e : boundary_edges) l += (nodes[e.nodes[0]] - nodes[e.nodes[1]]).norm();
  return l;
}

double Mesh::min_angle() const {
  double amin = M_PI;
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) {
      const Vec2 a = nodes[t[(k + 1) % 3]] - nodes[t[k]];
      const Vec2 b = nodes[t[(k + 2) % 3]] - nodes[t[k]];
      amin = std::min(amin, std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0)));
    }
  return amin;
}

std::size_t Mesh::edge_count() const {
  std::map<std::pair<int, int>, int> edges;
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) edges.emplace(key(t[k], t[(k + 1) % 3]), 0);
  return edges.size();
}

Mesh triangulate_levels(const Polytope& P, int levels) {
  if (P.dim() != 2) throw Error(ErrorKind::DimensionUnsupported, "meshing requires a planar polygon");
  const Point c = P.vertex_centroid();
  std::vector<std::pair<double, int>> order;
  for (std::size_t v = 0; v < P.vertices().size(); ++v) {
    const Point d = P.vertices()[v].point - c;
    order.emplace_back(std::atan2(d(1), d(0)), static_cast<int>(v));
  }
  std::sort(order.begin(), order.end());

  Mesh M;
  M.nodes.emplace_back(c(0), c(1));
  for (const auto& [angle, v] : order) {
    const Point& p = P.vertices()[v].point;
    M.corners.push_back(static_cast<int>(M.nodes.size()));
    M.nodes.emplace_back(p(0), p(1));
  }
  const int n = static_cast<int>(order.size());
  for (int k = 0; k < n; ++k) {
    const int a = 1 + k;
    const int b = 1 + (k + 1) % n;
    M.triangles.push_back({0, a, b});
    const auto& act_a = P.vertices()[order[k].second].active;
    const auto& act_b = P.vertices()[order[(k + 1) % n].second].active;
    int face = -1;
    for (int i : act_a)
      if (std::find(act_b.begin(), act_b.end(), i) != act_b.end()) face = i;
    if (face < 0) throw Error(ErrorKind::InternalInconsistency, "adjacent corners share no face");
    M.boundary_edges.push_back({{a, b}, face});
  }
  M.h = max_edge_length(M);
  for (int l = 0; l < levels; ++l) M = refine(M);
  return M;
}

Mesh triangulate(const Polytope& P, double target_h) {
  if (!(target_h > 0.0)) throw Error(ErrorKind::Config, "target_h must be positive");
  Mesh M = triangulate_levels(P, 0);
  while (M.h > target_h) M = refine(M);
  return M;
}

Mesh refine(const Mesh& M) {
  Mesh R;
  R.nodes = M.nodes;
  R.corners = M.corners;
  std::map<std::pair<int, int>, int> mid;
  auto midpoint = [&](int a, int b) {
    auto [it, inserted] = mid.emplace(key(a, b), static_cast<int>(R.nodes.size()));
    if (inserted) R.nodes.push_back(0.5 * (M.nodes[a] + M.nodes[b]));
    return it->second;
  };
  R.triangles.reserve(4 * M.triangles.size());
  for (const auto& t : M.triangles) {
    const int ab = midpoint(t[0], t[1]);
    const int bc = midpoint(t[1], t[2]);
    const int ca = midpoint(t[2], t[0]);
    R.triangles.push_back({t[0], ab, ca});
    R.triangles.push_back({ab, t[1], bc});
    R.triangles.push_back({ca, bc, t[2]});
    R.triangles.push_back({ab, bc, ca});
  }
  for (const auto& e : M.boundary_edges) {
    const int m = mid.at(key(e.nodes[0], e.nodes[1]));
    R.boundary_edges.push_back({{e.nodes[0], m}, e.face});
    R.boundary_edges.push_back({{m, e.nodes[1]}, e.face});
  }
  R.h = 0.5 * M.h;
  return R;
}

namespace {

// Working state of the longest-edge bisection.
class Bisector {
 public:
  explicit Bisector(const Mesh& M) : nodes_(M.nodes), tris_(M.triangles), alive_(M.triangles.size(), true) {
    for (std::size_t t = 0; t < tris_.size(); ++t) attach(static_cast<int>(t));
    for (const auto& e : M.boundary_edges) boundary_[code(e.nodes[0], e.nodes[1])] = e.face;
  }

  std::size_t triangle_count() const { return tris_.size(); }
  bool alive(int t) const { return alive_[static_cast<std::size_t>(t)]; }
  const std::array<int, 3>& tri(int t) const { return tris_[static_cast<std::size_t>(t)]; }
  const Vec2& node(int n) const { return nodes_[static_cast<std::size_t>(n)]; }

  // Local index k such that edge (k, k+1) is the longest; ties go to the smaller node pair.
  int longest(int t) const {
    const auto& tr = tri(t);
    int best = 0;
    double len = -1.0;
    std::uint64_t best_code = 0;
    for (int k = 0; k < 3; ++k) {
      const double l = (node(tr[k]) - node(tr[(k + 1) % 3])).squaredNorm();
      const std::uint64_t c = code(tr[k], tr[(k + 1) % 3]);
      if (l > len || (l == len && c < best_code)) {
        best = k;
        len = l;
        best_code = c;
      }
    }
    return best;
  }

  double longest_length(int t) const {
    const auto& tr = tri(t);
    const int k = longest(t);
    return (node(tr[k]) - node(tr[(k + 1) % 3])).norm();
  }

  void bisect(int t) {
    for (;;) {
      const auto& tr = tri(t);
      const int k = longest(t);
      const int a = tr[k], b = tr[(k + 1) % 3];
      const int nb = neighbour(t, a, b);
      if (nb < 0) {
        split(t, a, b, midpoint(a, b));
        return;
      }
      const int kn = longest(nb);
      const auto& trn = tri(nb);
      if (code(trn[kn], trn[(kn + 1) % 3]) == code(a, b)) {
        const int m = midpoint(a, b);
        split(t, a, b, m);
        split(nb, a, b, m);
        return;
      }
      bisect(nb);
    }
  }

  Mesh finish(const std::vector<int>& corners) const {
    Mesh R;
    R.nodes = nodes_;
    R.corners = corners;
    for (std::size_t t = 0; t < tris_.size(); ++t)
      if (alive_[t]) R.triangles.push_back(tris_[t]);
    std::vector<std::pair<std::uint64_t, int>> tags(boundary_.begin(), boundary_.end());
    std::sort(tags.begin(), tags.end());
    for (const auto& [c, face] : tags) {
      // orient the edge as in its (unique) triangle so the boundary is traversed counterclockwise
      const int a = static_cast<int>(c >> 32), b = static_cast<int>(c & 0xffffffffu);
      const int t = edges_.at(c)[0];
      const auto& tr = tri(t);
      int k = 0;
      while (!((tr[k] == a && tr[(k + 1) % 3] == b) || (tr[k] == b && tr[(k + 1) % 3] == a))) ++k;
      R.boundary_edges.push_back({{tr[k], tr[(k + 1) % 3]}, face});
    }
    R.h = max_edge_length(R);
    return R;
  }

 private:
  static std::uint64_t code(int a, int b) {
    const auto lo = static_cast<std::uint64_t>(std::min(a, b)), hi = static_cast<std::uint64_t>(std::max(a, b));
    return (lo << 32) | hi;
  }

  void attach(int t) {
    const auto& tr = tri(t);
    for (int k = 0; k < 3; ++k) {
      auto [it, inserted] = edges_.try_emplace(code(tr[k], tr[(k + 1) % 3]), std::array<int, 2>{-1, -1});
      auto& slot = it->second;
      (slot[0] < 0 ? slot[0] : slot[1]) = t;
    }
  }

  void detach(int t) {
    const auto& tr = tri(t);
    for (int k = 0; k < 3; ++k) {
      const auto it = edges_.find(code(tr[k], tr[(k + 1) % 3]));
      auto& slot = it->second;
      if (slot[0] == t) {
        slot[0] = slot[1];
        slot[1] = -1;
      } else if (slot[1] == t) {
        slot[1] = -1;
      }
      if (slot[0] < 0) edges_.erase(it);
    }
  }

  int neighbour(int t, int a, int b) const {
    const auto& slot = edges_.at(code(a, b));
    return slot[0] == t ? slot[1] : slot[0];
  }

  int midpoint(int a, int b) {
    auto [it, inserted] = mids_.emplace(code(a, b), static_cast<int>(nodes_.size()));
    if (inserted) nodes_.push_back(0.5 * (node(a) + node(b)));
    return it->second;
  }

  void split(int t, int a, int b, int m) {
    const auto tr = tri(t);
    int k = 0;
    while (!((tr[k] == a && tr[(k + 1) % 3] == b) || (tr[k] == b && tr[(k + 1) % 3] == a))) ++k;
    const int p = tr[k], q = tr[(k + 1) % 3], r = tr[(k + 2) % 3];
    detach(t);
    alive_[static_cast<std::size_t>(t)] = false;
    for (const std::array<int, 3>& child : {std::array<int, 3>{p, m, r}, std::array<int, 3>{m, q, r}}) {
      tris_.push_back(child);
      alive_.push_back(true);
      attach(static_cast<int>(tris_.size()) - 1);
    }
    const auto bt = boundary_.find(code(p, q));
    if (bt != boundary_.end()) {
      const int face = bt->second;
      boundary_.erase(bt);
      boundary_[code(p, m)] = face;
      boundary_[code(m, q)] = face;
    }
  }

  std::vector<Vec2> nodes_;
  std::vector<std::array<int, 3>> tris_;
  std::vector<bool> alive_;
  std::unordered_map<std::uint64_t, std::array<int, 2>> edges_{};
  std::unordered_map<std::uint64_t, int> boundary_;
  std::unordered_map<std::uint64_t, int> mids_;
};

}  // namespace

SizeField graded_size(std::vector<Vec2> focus, double h_max, double h_min, double grading) {
  if (!(h_min > 0.0) || !(h_max >= h_min) || !(grading > 0.0))
    throw Error(ErrorKind::Config, "graded size needs 0 < h_min <= h_max and a positive grading");
  return [focus = std::move(focus), h_max, h_min, grading](const Vec2& x) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& f : focus) d = std::min(d, (x - f).norm());
    return std::min(h_max, std::max(h_min, grading * d));
  };
}

Mesh refine_adaptive(const Mesh& M, const SizeField& size) {
  Bisector B(M);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t t = 0; t < B.triangle_count(); ++t) {
      const int ti = static_cast<int>(t);
      if (!B.alive(ti)) continue;
      const auto& tr = B.tri(ti);
      const double target = std::min({size(B.node(tr[0])), size(B.node(tr[1])), size(B.node(tr[2]))});
      if (!(target > 0.0)) throw Error(ErrorKind::Config, "size field must be positive");
      if (B.longest_length(ti) > target) {
        B.bisect(ti);
        changed = true;
      }
    }
  }
  return B.finish(M.corners);
}

Mesh triangulate_graded(const Polytope& P, double target_h, const std::vector<Vec2>& focus, double h_min,
                        double grading) {
  const Mesh base = triangulate(P, 2.0 * target_h);
  return refine_adaptive(base, graded_size(focus, target_h, h_min, grading));
}

MeshLocator::MeshLocator(const Mesh& mesh) : mesh_(&mesh) {
  lo_ = hi_ = mesh.nodes.front();
  for (const auto& p : mesh.nodes) {
    lo_ = lo_.cwiseMin(p);
    hi_ = hi_.cwiseMax(p);
  }
  const double area = std::max(mesh.total_area(), 1e-300);
  cell_ = std::max(std::sqrt(area / static_cast<double>(mesh.triangles.size())) * 1.5, 1e-12);
  nx_ = std::max(1, static_cast<int>(std::ceil((hi_.x() - lo_.x()) / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil((hi_.y() - lo_.y()) / cell_)));
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(nx_) * ny_);
  auto cx = [&](double x) { return std::clamp(static_cast<int>((x - lo_.x()) / cell_), 0, nx_ - 1); };
  auto cy = [&](double y) { return std::clamp(static_cast<int>((y - lo_.y()) / cell_), 0, ny_ - 1); };
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    Vec2 a = mesh.nodes[tr[0]], b = a;
    for (int k = 1; k < 3; ++k) {
      a = a.cwiseMin(mesh.nodes[tr[k]]);
      b = b.cwiseMax(mesh.nodes[tr[k]]);
    }
    for (int i = cx(a.x()); i <= cx(b.x()); ++i)
      for (int j = cy(a.y()); j <= cy(b.y()); ++j) buckets[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(t));
  }
  start_.assign(buckets.size() + 1, 0);
  for (std::size_t k = 0; k < buckets.size(); ++k) start_[k + 1] = start_[k] + static_cast<int>(buckets[k].size());
  items_.reserve(static_cast<std::size_t>(start_.back()));
  for (const auto& b : buckets) items_.insert(items_.end(), b.begin(), b.end());
}

std::optional<MeshLocator::Hit> MeshLocator::locate(const Vec2& p) const {
  const double slack = 1e-9 * cell_;
  if (p.x() < lo_.x() - slack || p.y() < lo_.y() - slack || p.x() > hi_.x() + slack || p.y() > hi_.y() + slack)
    return std::nullopt;
  const int i = std::clamp(static_cast<int>((p.x() - lo_.x()) / cell_), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>((p.y() - lo_.y()) / cell_), 0, ny_ - 1);
  const std::size_t k = static_cast<std::size_t>(j) * nx_ + i;
  Hit best;
  double best_min = -std::numeric_limits<double>::infinity();
  for (int s = start_[k]; s < start_[k + 1]; ++s) {
    const int t = items_[static_cast<std::size_t>(s)];
    const auto& tr = mesh_->triangles[static_cast<std::size_t>(t)];
    const Vec2& a = mesh_->nodes[tr[0]];
    const Vec2& b = mesh_->nodes[tr[1]];
    const Vec2& c = mesh_->nodes[tr[2]];
    const double det = cross(b - a, c - a);
    const double l1 = cross(p - a, c - a) / det;
    const double l2 = cross(b - a, p - a) / det;
    const double l0 = 1.0 - l1 - l2;
    const double mn = std::min({l0, l1, l2});
    if (mn > best_min) {
      best_min = mn;
      best.triangle = t;
      best.bary = {l0, l1, l2};
      if (mn >= 0.0) break;
    }
  }
  if (best.triangle < 0 || best_min < -1e-9) return std::nullopt;
  return best;
}

std::optional<double> MeshLocator::interpolate(const Eigen::VectorXd& values, const Vec2& p) const {
  auto hit = locate(p);
  if (!hit) return std::nullopt;
  const auto& tr = mesh_->triangles[static_cast<std::size_t>(hit->triangle)];
  return hit->bary[0] * values(tr[0]) + hit->bary[1] * values(tr[1]) + hit->bary[2] * values(tr[2]);
}

void write_off(const Mesh& M, std::ostream& off, std::ostream& edge_tags) {
  off.precision(17);
  off << "OFF\n" << M.nodes.size() << ' ' << M.triangles.size() << " 0\n";
  for (const auto& p : M.nodes) off << p.x() << ' ' << p.y() << " 0\n";
  for (const auto& t : M.triangles) off << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  edge_tags << "# node_a node_b face\n";
  for (const auto& e : M.boundary_edges) edge_tags << e.nodes[0] << ' ' << e.nodes[1] << ' ' << e.face << '\n';
}

void export_mesh(const Mesh& M, const std::string& off_path) {
  std::ofstream off(off_path);
  std::ofstream tags(off_path + ".edges");
  if (!off || !tags) throw Error(ErrorKind::Io, "cannot write mesh to " + off_path);
  write_off(M, off, tags);
}

Mesh import_mesh(const std::string& off_path) {
  std::ifstream off(off_path);
  if (!off) throw Error(ErrorKind::Io, "cannot read mesh " + off_path);
  std::string magic;
  std::size_t nv = 0, nt = 0, ne = 0;
  off >> magic >> nv >> nt >> ne;
  if (magic != "OFF") throw Error(ErrorKind::Io, off_path + " is not an OFF file");
  Mesh M;
  for (std::size_t i = 0; i < nv; ++i) {
    double x, y, z;
    off >> x >> y >> z;
    M.nodes.emplace_back(x, y);
  }
  for (std::size_t i = 0; i < nt; ++i) {
    int k, a, b, c;
    off >> k >> a >> b >> c;
    if (k != 3) throw Error(ErrorKind::Io, "only triangles are supported");
    M.triangles.push_back({a, b, c});
  }
  if (!off) throw Error(ErrorKind::Io, "truncated OFF file " + off_path);
  std::ifstream tags(off_path + ".edges");
  if (!tags) throw Error(ErrorKind::Io, "missing edge-tag sidecar " + off_path + ".edges");
  std::string line;
  while (std::getline(tags, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream in(line);
    BoundaryEdge e;
    in >> e.nodes[0] >> e.nodes[1] >> e.face;
    M.boundary_edges.push_back(e);
  }
  // corners: nodes where the boundary face tag changes
  std::map<int, std::vector<int>> faces_at;
  for (const auto& e : M.boundary_edges)
    for (int n : e.nodes) faces_at[n].push_back(e.face);
  Vec2 c = Vec2::Zero();
  for (const auto& p : M.nodes) c += p;
  c /= static_cast<double>(M.nodes.size());
  std::vector<std::pair<double, int>> corners;
  for (const auto& [node, faces] : faces_at)
    if (faces.size() == 2 && faces[0] != faces[1]) {
      const Vec2 d = M.nodes[node] - c;
      corners.emplace_back(std::atan2(d.y(), d.x()), node);
    }
  std::sort(corners.begin(), corners.end());
  for (const auto& [a, n] : corners) M.corners.push_back(n);
  M.h = max_edge_length(M);
  return M;
}

}  // namespace polyrobin
