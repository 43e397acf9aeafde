#include "polyrobin/cone_harmonics.hpp"

#include "polyrobin/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace polyrobin {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double mode_angular(int i, double beta, double theta) {
  return (i % 2 == 0) ? std::cos(beta * theta) : std::sin(beta * theta);
}

struct ArcProjection {
  std::vector<double> coeff;  // c_i for i = 0..N (before the r^beta scaling)
};

ArcProjection project_arc(const Field& v, const MeshLocator& loc, const Sector& S, double r, int modes,
                          const ExpansionOptions& opts, double v0, const Vec2& gamma, int samples) {
  std::vector<double> num(static_cast<std::size_t>(modes + 1), 0.0), den(num.size(), 0.0);
  const double half = 0.5 * S.theta0;
  const Vec2 perp(-S.bisector.y(), S.bisector.x());
  for (int j = 0; j <= samples; ++j) {
    const double t = -half + S.theta0 * j / samples;
    const double w = (j == 0 || j == samples) ? 0.5 : 1.0;
    const Vec2 x = r * (std::cos(t) * S.bisector + std::sin(t) * perp);
    auto val = loc.interpolate(v.values, S.vertex + x);
    if (!val) {
      // arc endpoints sit on the edges; nudge inward by a rounding-level amount
      const Vec2 xi = r * (std::cos(t * (1 - 1e-12)) * S.bisector + std::sin(t * (1 - 1e-12)) * perp);
      val = loc.interpolate(v.values, S.vertex + xi);
      if (!val) throw Error(ErrorKind::RadiusTooLarge, "arc leaves the meshed domain");
    }
    double rem = *val - v0 + 0.25 * opts.mu * x.squaredNorm();
    if (opts.subtract_degree_one) rem -= gamma.dot(x);
    for (int i = 0; i <= modes; ++i) {
      const double beta = i * M_PI / S.theta0;
      const double phi = mode_angular(i, beta, t);
      num[i] += w * rem * phi;
      den[i] += w * phi * phi;
    }
  }
  ArcProjection out;
  for (int i = 0; i <= modes; ++i) out.coeff.push_back(den[i] > 0.0 ? num[i] / den[i] : 0.0);
  return out;
}

}  // namespace

Sector make_sector(const Vec2& vertex, const Vec2& normal_a, const Vec2& normal_b) {
  const Vec2 a = normal_a.normalized(), b = normal_b.normalized();
  const double between = std::acos(std::clamp(a.dot(b), -1.0, 1.0));
  Sector S;
  S.vertex = vertex;
  S.theta0 = M_PI - between;
  if (!(S.theta0 > 1e-8)) throw Error(ErrorKind::DegenerateSector, "opening angle vanishes");
  const Vec2 s = a + b;
  S.bisector = (-s).normalized();
  S.face_normals = {a, b};
  return S;
}

Sector sector_at_vertex(const Polytope& P, int vertex_index) {
  if (P.dim() != 2) throw Error(ErrorKind::DimensionUnsupported, "sectors are planar");
  const auto& vx = P.vertices()[static_cast<std::size_t>(vertex_index)];
  if (vx.active.size() != 2) throw Error(ErrorKind::InternalInconsistency, "polygon vertex with != 2 active faces");
  const Point& na = P.halfspace(vx.active[0]).normal;
  const Point& nb = P.halfspace(vx.active[1]).normal;
  return make_sector(Vec2(vx.point(0), vx.point(1)), Vec2(na(0), na(1)), Vec2(nb(0), nb(1)));
}

double cone_radius(const Polytope& P, int vertex_index) {
  const auto& vx = P.vertices()[static_cast<std::size_t>(vertex_index)];
  const Eigen::VectorXd s = P.slack(vx.point);
  double r = std::numeric_limits<double>::infinity();
  for (int i = 0; i < P.face_count(); ++i)
    if (std::find(vx.active.begin(), vx.active.end(), i) == vx.active.end()) r = std::min(r, s(i));
  return r;
}

SectorExponent sector_exponent(double theta0, int i) {
  if (!(theta0 > 0.0 && theta0 <= M_PI + 1e-12) || i < 0)
    throw Error(ErrorKind::InvalidAngle, "opening angle must lie in (0, pi] and index be nonnegative");
  SectorExponent e;
  e.beta = i * M_PI / theta0;
  e.critical = (i == 1) && theta0 > M_PI / 2 && theta0 < M_PI;
  return e;
}

double sector_angle(const Sector& S, const Vec2& point) {
  const Vec2 x = point - S.vertex;
  const double r = x.norm();
  if (r == 0.0) return 0.0;
  const double t = std::atan2(cross(S.bisector, x), S.bisector.dot(x));
  if (std::abs(t) > 0.5 * S.theta0 + 1e-10) throw Error(ErrorKind::PointOutsideSector, "point outside the sector");
  return std::clamp(t, -0.5 * S.theta0, 0.5 * S.theta0);
}

double sector_eigenfunction(const Sector& S, int i, const Vec2& point) {
  const double theta = sector_angle(S, point);
  const double r = (point - S.vertex).norm();
  const double beta = sector_exponent(S.theta0, i).beta;
  if (i == 0) return 1.0;
  return std::pow(r, beta) * mode_angular(i, beta, theta);
}

Vec2 degree_one_solution(const Sector& S) {
  const double s = std::sin(0.5 * S.theta0);
  if (!(S.theta0 > 1e-8) || !(s > 0.0)) throw Error(ErrorKind::DegenerateSector, "opening angle vanishes");
  const Vec2 gamma = S.bisector / s;
  for (const auto& n : S.face_normals)
    if (std::abs(gamma.dot(n) + 1.0) > 1e-10)
      throw Error(ErrorKind::InternalInconsistency, "degree-one solution violates D_n w = -1");
  return gamma;
}

CornerExpansion corner_expansion(const Field& v, const Sector& S, double r, int modes, double max_radius,
                                 const ExpansionOptions& opts) {
  if (!(r > 0.0) || r > max_radius * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "sample radius " << r << " exceeds cone radius " << max_radius;
    throw Error(ErrorKind::RadiusTooLarge, msg.str());
  }
  const Mesh& mesh = *v.mesh;
  if (mesh.h > r / 4.0) {
    std::ostringstream msg;
    msg << "mesh size " << mesh.h << " too coarse for radius " << r << " (need h <= r/4)";
    throw Error(ErrorKind::MeshTooCoarse, msg.str());
  }
  int vertex_node = -1;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < mesh.nodes.size(); ++k) {
    const double d = (mesh.nodes[k] - S.vertex).norm();
    if (d < best) {
      best = d;
      vertex_node = static_cast<int>(k);
    }
  }
  if (best > 1e-9 * std::max(1.0, r)) throw Error(ErrorKind::Config, "sector vertex is not a mesh node");

  CornerExpansion out;
  out.sector = S;
  out.sample_radius = r;
  out.constant = v.values(vertex_node);
  out.samples = std::max(8 * modes, opts.samples_per_mode * modes);
  out.samples = std::max(out.samples, 64);
  const Vec2 gamma = opts.subtract_degree_one ? degree_one_solution(S) : Vec2::Zero();
  out.linear_part = gamma;

  MeshLocator loc(mesh);
  const auto full = project_arc(v, loc, S, r, modes, opts, out.constant, gamma, out.samples);
  const auto half = project_arc(v, loc, S, 0.5 * r, modes, opts, out.constant, gamma, out.samples);
  out.mean_remainder = full.coeff[0];
  const Vec2 perp(-S.bisector.y(), S.bisector.x());
  for (int i = 1; i <= modes; ++i) {
    const double beta = sector_exponent(S.theta0, i).beta;
    const double f = full.coeff[i] / std::pow(r, beta);
    const double fh = half.coeff[i] / std::pow(0.5 * r, beta);
    if (std::abs(beta - 1.0) < 1e-12) {
      // r sin(theta) is the linear function perp . x
      out.linear_part += f * perp;
      continue;
    }
    const double scale = std::max(std::abs(f), std::abs(fh));
    out.coefficients.push_back({i, beta, f, fh, scale > 0.0 ? std::abs(f - fh) / scale : 0.0});
  }
  return out;
}

CornerExpansion corner_expansion(const Field& v, const Polytope& P, int vertex_index, double r, int modes,
                                 const ExpansionOptions& opts) {
  return corner_expansion(v, sector_at_vertex(P, vertex_index), r, modes, cone_radius(P, vertex_index), opts);
}

}  // namespace polyrobin
