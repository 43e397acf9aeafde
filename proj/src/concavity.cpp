#include "polyrobin/concavity.hpp"

#include "polyrobin/error.hpp"
#include "polyrobin/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polyrobin {

namespace {

constexpr int kQuantiles = 32;
constexpr double kAbsTol = 1e-10;

double radical_inverse(unsigned index, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (index > 0) {
    r += f * (index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

double longest_edge(const Mesh& M, std::size_t t) {
  const auto& tr = M.triangles[t];
  double h = 0.0;
  for (int k = 0; k < 3; ++k) h = std::max(h, (M.nodes[tr[k]] - M.nodes[tr[(k + 1) % 3]]).norm());
  return h;
}

double mesh_diameter(const Mesh& M) {
  const auto& pts = M.corners;
  double d = 0.0;
  if (pts.size() >= 2) {
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (M.nodes[pts[i]] - M.nodes[pts[j]]).norm());
    return d;
  }
  Vec2 lo = M.nodes.front(), hi = lo;
  for (const auto& p : M.nodes) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

double interpolate_hit(const Mesh& M, const Eigen::VectorXd& f, const MeshLocator::Hit& hit) {
  const auto& tr = M.triangles[static_cast<std::size_t>(hit.triangle)];
  return hit.bary[0] * f(tr[0]) + hit.bary[1] * f(tr[1]) + hit.bary[2] * f(tr[2]);
}

Eigen::VectorXd transformed_values(const Field& f, ConcavityMode mode) {
  if (mode != ConcavityMode::LogConcavity) return f.values;
  for (Eigen::Index i = 0; i < f.values.size(); ++i)
    if (!(f.values(i) > 0.0))
      throw Error(ErrorKind::NonpositiveField, "field is not strictly positive at node " + std::to_string(i));
  return f.values.array().log().matrix();
}

struct Candidate {
  double gap;
  int i, j;
  double mid, bound, tol, threshold, local_h;
};

// Total order: larger gap first, then lexicographic (i, j).
bool better(const Candidate& a, const Candidate& b) {
  if (a.gap != b.gap) return a.gap > b.gap;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

struct Partial {
  std::vector<Candidate> top;  // heap under `better`: the worst kept candidate at the front
  std::size_t violations = 0;
  std::size_t pairs = 0;
  double max_gap = 0.0;
  std::vector<std::size_t> quantile_hits;

  void offer(const Candidate& c, std::size_t cap) {
    if (cap == 0) return;
    if (top.size() < cap) {
      top.push_back(c);
      std::push_heap(top.begin(), top.end(), better);
    } else if (better(c, top.front())) {
      std::pop_heap(top.begin(), top.end(), better);
      top.back() = c;
      std::push_heap(top.begin(), top.end(), better);
    }
  }
};

struct Scan {
  const Mesh& mesh;
  const MeshLocator& loc;
  const Eigen::VectorXd& f;
  const std::vector<Vec2>& pts;
  const std::vector<double>& val;
  const std::vector<double>& hloc;
  const std::vector<double>& tri_h;
  const std::vector<double>& quantiles;
  ConcavityMode mode;
  std::optional<double> c;
  double c_tol, abs_tol;
  std::size_t cap;

  void row(int i, Partial& out) const {
    const int n = static_cast<int>(pts.size());
    for (int j = i + 1; j < n; ++j) {
      const Vec2 m = 0.5 * (pts[i] + pts[j]);
      const auto hit = loc.locate(m);
      if (!hit) continue;
      ++out.pairs;
      const double fm = interpolate_hit(mesh, f, *hit);
      const double hl = std::max({hloc[i], hloc[j], tri_h[static_cast<std::size_t>(hit->triangle)]});
      const double tol = std::max(c_tol * hl * hl, abs_tol);
      const double fi = val[i], fj = val[j];
      Candidate cand{0.0, i, j, fm, 0.0, tol, 0.0, hl};
      bool hitv = false;
      if (mode != ConcavityMode::Superlevel) {
        cand.bound = 0.5 * (fi + fj);
        cand.gap = cand.bound - fm;
        hitv = cand.gap > tol;
      } else {
        cand.bound = std::min(fi, fj);
        cand.gap = cand.bound - fm;
        if (c) {
          cand.threshold = *c;
          hitv = cand.bound > *c + tol && fm < *c - tol;
        } else {
          cand.threshold = 0.5 * (cand.bound + fm);
          hitv = cand.gap > 2.0 * tol;
          if (hitv) {
            const auto lo = std::upper_bound(quantiles.begin(), quantiles.end(), fm + tol);
            const auto hi = std::lower_bound(quantiles.begin(), quantiles.end(), cand.bound - tol);
            for (auto it = lo; it < hi; ++it) ++out.quantile_hits[static_cast<std::size_t>(it - quantiles.begin())];
          }
        }
      }
      if (!hitv) continue;
      ++out.violations;
      out.max_gap = std::max(out.max_gap, cand.gap);
      out.offer(cand, cap);
    }
  }
};

ConcavityReport run_single(const Field& field, ConcavityMode mode, std::optional<double> c,
                           const ConcavityOptions& opts) {
  if (!field.mesh) throw Error(ErrorKind::Config, "field has no mesh");
  const Mesh& M = *field.mesh;
  if (field.values.size() != static_cast<Eigen::Index>(M.node_count()))
    throw Error(ErrorKind::DimensionMismatch, "field size differs from the node count");
  const Eigen::VectorXd f = transformed_values(field, mode);
  const MeshLocator loc(M);

  ConcavityReport rep;
  rep.mode = mode;
  rep.h = M.h;
  rep.diameter = mesh_diameter(M);
  const double osc = f.maxCoeff() - f.minCoeff();
  rep.c_tol = opts.c_tol > 0.0 ? opts.c_tol : 4.0 * osc / (rep.diameter * rep.diameter);
  const double abs_tol = kAbsTol * (1.0 + f.cwiseAbs().maxCoeff());

  std::vector<double> tri_h(M.triangles.size());
  for (std::size_t t = 0; t < tri_h.size(); ++t) tri_h[t] = longest_edge(M, t);

  std::vector<Vec2> pts;
  std::vector<double> val, hloc;
  for (const auto& p : sample_points(M, opts.sampling)) {
    const auto hit = loc.locate(p);
    if (!hit) continue;
    pts.push_back(p);
    val.push_back(interpolate_hit(M, f, *hit));
    hloc.push_back(tri_h[static_cast<std::size_t>(hit->triangle)]);
  }
  rep.samples = pts.size();

  std::vector<double> quantiles;
  if (mode == ConcavityMode::Superlevel && !c) {
    std::vector<double> sorted(f.data(), f.data() + f.size());
    std::sort(sorted.begin(), sorted.end());
    for (int k = 1; k <= kQuantiles; ++k) {
      const auto idx = static_cast<std::size_t>(std::llround((sorted.size() - 1) * (k - 0.5) / kQuantiles));
      quantiles.push_back(sorted[idx]);
    }
  }

  const Scan scan{M, loc, f, pts, val, hloc, tri_h, quantiles, mode, c, rep.c_tol, abs_tol, opts.max_witnesses};
  const int n = static_cast<int>(pts.size());
  std::vector<Partial> parts;
  if (opts.parallel) {
    const int threads = parallel::max_threads();
    parts.resize(static_cast<std::size_t>(threads));
#pragma omp parallel num_threads(threads)
    {
      Partial& mine = parts[static_cast<std::size_t>(parallel::thread_id())];
      mine.quantile_hits.assign(quantiles.size(), 0);
#pragma omp for schedule(dynamic, 8)
      for (int i = 0; i < n; ++i) scan.row(i, mine);
    }
  } else {
    parts.resize(1);
    parts[0].quantile_hits.assign(quantiles.size(), 0);
    for (int i = 0; i < n; ++i) scan.row(i, parts[0]);
  }

  std::vector<Candidate> all;
  std::vector<std::size_t> qhits(quantiles.size(), 0);
  for (const auto& p : parts) {
    rep.violation_count += p.violations;
    rep.pairs_tested += p.pairs;
    rep.max_gap = std::max(rep.max_gap, p.max_gap);
    all.insert(all.end(), p.top.begin(), p.top.end());
    for (std::size_t k = 0; k < p.quantile_hits.size(); ++k) qhits[k] += p.quantile_hits[k];
  }
  std::sort(all.begin(), all.end(), better);
  if (all.size() > opts.max_witnesses) all.resize(opts.max_witnesses);
  for (std::size_t k = 0; k < quantiles.size(); ++k) rep.threshold_scan.emplace_back(quantiles[k], qhits[k]);

  for (const auto& cand : all) {
    Witness w;
    w.x = pts[static_cast<std::size_t>(cand.i)];
    w.y = pts[static_cast<std::size_t>(cand.j)];
    w.midpoint_value = cand.mid;
    w.endpoint_bound = cand.bound;
    w.gap = cand.gap;
    w.tol = cand.tol;
    w.threshold = cand.threshold;
    w.local_h = cand.local_h;
    const auto again = recheck_witness(field, w, mode);
    if (!again || !(*again > 0.0) || std::abs(*again - w.gap) > 1e-12 * (1.0 + std::abs(w.gap)))
      throw Error(ErrorKind::InternalInconsistency, "witness does not reproduce from the raw field");
    rep.violations.push_back(w);
  }
  if (mode == ConcavityMode::Superlevel) {
    if (c)
      rep.threshold = *c;
    else if (!rep.violations.empty())
      rep.threshold = rep.violations.front().threshold;
  }
  return rep;
}

ConcavityReport with_refinement(const Field& coarse, ConcavityMode mode, std::optional<double> c,
                                const ConcavityOptions& opts, const Field* refined) {
  ConcavityReport rep = run_single(coarse, mode, c, opts);
  if (refined) {
    ConcavityOptions fine_opts = opts;
    fine_opts.c_tol = rep.c_tol;
    const ConcavityReport fine = run_single(*refined, mode, c, fine_opts);
    rep.refined_max_gap = fine.max_gap;
    rep.refined_h = fine.h;
    rep.stable = rep.found_violation() && fine.found_violation() && gaps_agree(rep.max_gap, fine.max_gap);
  }
  return rep;
}

}  // namespace

std::string to_string(ConcavityMode mode) {
  switch (mode) {
    case ConcavityMode::Concavity: return "concavity";
    case ConcavityMode::LogConcavity: return "log_concavity";
    case ConcavityMode::Superlevel: return "superlevel";
  }
  return "unknown";
}

std::vector<Vec2> sample_points(const Mesh& mesh, const SampleOptions& opts) {
  std::vector<Vec2> out;
  if (mesh.nodes.empty()) return out;
  const MeshLocator loc(mesh);
  Vec2 lo = mesh.nodes.front(), hi = lo;
  for (const auto& p : mesh.nodes) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec2 span = hi - lo;
  int accepted = 0;
  for (unsigned k = opts.seed + 1; accepted < opts.interior && k < opts.seed + 1 + 64u * opts.interior + 64u; ++k) {
    const Vec2 p = lo + Vec2(radical_inverse(k, 2) * span.x(), radical_inverse(k, 3) * span.y());
    if (!loc.locate(p)) continue;
    out.push_back(p);
    ++accepted;
  }

  const std::size_t nc = mesh.corners.size();
  if (nc < 3 || opts.corner_radii <= 0 || opts.corner_angles < 2) return out;
  for (std::size_t i = 0; i < nc; ++i) {
    const Vec2& c = mesh.nodes[static_cast<std::size_t>(mesh.corners[i])];
    const Vec2& next = mesh.nodes[static_cast<std::size_t>(mesh.corners[(i + 1) % nc])];
    const Vec2& prev = mesh.nodes[static_cast<std::size_t>(mesh.corners[(i + nc - 1) % nc])];
    const Vec2 e1 = (next - c).normalized(), e2 = (prev - c).normalized();
    const double theta0 = std::acos(std::clamp(e1.dot(e2), -1.0, 1.0));
    const Vec2 b = (e1 + e2).normalized();
    const Vec2 perp(-b.y(), b.x());
    const double R = opts.corner_outer * std::min((next - c).norm(), (prev - c).norm());
    for (int k = 0; k < opts.corner_radii; ++k) {
      const double s = opts.corner_radii == 1 ? 1.0 : static_cast<double>(k) / (opts.corner_radii - 1);
      const double r = R * std::pow(opts.corner_inner, 1.0 - s);
      for (int j = 0; j < opts.corner_angles; ++j) {
        const double t = -0.5 * theta0 + theta0 * j / (opts.corner_angles - 1);
        const Vec2 p = c + r * (std::cos(t) * b + std::sin(t) * perp);
        if (loc.locate(p)) out.push_back(p);
      }
    }
  }
  return out;
}

std::optional<Witness> evaluate_pair(const Field& f, const Vec2& x, const Vec2& y, ConcavityMode mode,
                                     double threshold) {
  const Mesh& M = *f.mesh;
  const MeshLocator loc(M);
  const Eigen::VectorXd vals = transformed_values(f, mode);
  const auto hx = loc.locate(x), hy = loc.locate(y), hm = loc.locate(0.5 * (x + y));
  if (!hx || !hy || !hm) return std::nullopt;
  const double fx = interpolate_hit(M, vals, *hx), fy = interpolate_hit(M, vals, *hy);
  Witness w;
  w.x = x;
  w.y = y;
  w.midpoint_value = interpolate_hit(M, vals, *hm);
  w.endpoint_bound = mode == ConcavityMode::Superlevel ? std::min(fx, fy) : 0.5 * (fx + fy);
  w.gap = w.endpoint_bound - w.midpoint_value;
  w.threshold = threshold;
  w.local_h = std::max({longest_edge(M, static_cast<std::size_t>(hx->triangle)),
                        longest_edge(M, static_cast<std::size_t>(hy->triangle)),
                        longest_edge(M, static_cast<std::size_t>(hm->triangle))});
  return w;
}

std::optional<double> recheck_witness(const Field& f, const Witness& w, ConcavityMode mode) {
  const auto again = evaluate_pair(f, w.x, w.y, mode, w.threshold);
  if (!again) return std::nullopt;
  return again->gap;
}

ConcavityReport check_midpoint_concavity(const Field& v, const ConcavityOptions& opts, const Field* refined) {
  return with_refinement(v, ConcavityMode::Concavity, std::nullopt, opts, refined);
}

ConcavityReport check_log_concavity(const Field& u, const ConcavityOptions& opts, const Field* refined) {
  return with_refinement(u, ConcavityMode::LogConcavity, std::nullopt, opts, refined);
}

ConcavityReport check_superlevel_convexity(const Field& v, std::optional<double> c, const ConcavityOptions& opts,
                                           const Field* refined) {
  return with_refinement(v, ConcavityMode::Superlevel, c, opts, refined);
}

bool gaps_agree(double coarse, double fine, double rel) {
  if (!(coarse > 0.0) || !(fine > 0.0)) return false;
  return std::abs(fine - coarse) <= rel * std::max(coarse, fine);
}

}  // namespace polyrobin
