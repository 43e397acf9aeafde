#include "polyrobin/io.hpp"

#include "polyrobin/error.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

namespace polyrobin::io {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  return in;
}

Json vec2(const Vec2& v) { return Json::array({v.x(), v.y()}); }

}  // namespace

Polytope parse_domain(const Json& j, double rel_tol) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("halfspaces"))
    throw Error(ErrorKind::Config, "domain needs \"dim\" and \"halfspaces\"");
  const int d = j.at("dim").get<int>();
  if (d < 1) throw Error(ErrorKind::Config, "dim must be positive");
  std::vector<HalfSpace> hs;
  for (const auto& h : j.at("halfspaces")) {
    const auto& n = h.at("normal");
    if (!n.is_array() || static_cast<int>(n.size()) != d)
      throw Error(ErrorKind::DimensionMismatch, "normal length differs from dim");
    HalfSpace s;
    s.normal.resize(d);
    for (int i = 0; i < d; ++i) s.normal(i) = n.at(static_cast<std::size_t>(i)).get<double>();
    s.offset = h.at("offset").get<double>();
    hs.push_back(std::move(s));
  }
  return build_polytope(std::move(hs), rel_tol);
}

Polytope read_domain(const std::string& path, double rel_tol) {
  auto in = open_in(path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::Config, path + ": " + e.what());
  }
  try {
    return parse_domain(j, rel_tol);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Config, path + ": " + e.what());
  }
}

Json domain_to_json(const Polytope& P) {
  Json j;
  j["dim"] = P.dim();
  Json hs = Json::array();
  for (const auto& h : P.halfspaces()) hs.push_back({{"normal", to_json(h.normal)}, {"offset", h.offset}});
  j["halfspaces"] = std::move(hs);
  return j;
}

void write_json(const Json& j, const std::string& path) {
  if (path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << j.dump(2) << '\n';
}

void write_field_csv(const Field& f, std::ostream& out) {
  out.precision(17);
  out << "node_index,x,y,value\n";
  for (std::size_t i = 0; i < f.mesh->nodes.size(); ++i) {
    const Vec2& p = f.mesh->nodes[i];
    out << i << ',' << p.x() << ',' << p.y() << ',' << f.values(static_cast<Eigen::Index>(i)) << '\n';
  }
}

void write_field_csv(const Field& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  write_field_csv(f, out);
}

Field read_field_csv(const std::string& path, std::shared_ptr<const Mesh> mesh) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("node_index", 0) != 0) throw Error(ErrorKind::Io, path + ": missing node_index,x,y,value header");
  Field f;
  f.mesh = mesh;
  f.values = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(mesh->node_count()), std::nan(""));
  const double scale = 1e-9 * std::max(1.0, mesh->h);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    long idx;
    double x, y, v;
    if (!(row >> idx >> x >> y >> v)) throw Error(ErrorKind::Io, path + ": malformed row '" + line + "'");
    if (idx < 0 || static_cast<std::size_t>(idx) >= mesh->node_count())
      throw Error(ErrorKind::DimensionMismatch, path + ": node index out of range");
    if ((mesh->nodes[static_cast<std::size_t>(idx)] - Vec2(x, y)).norm() > scale)
      throw Error(ErrorKind::DimensionMismatch, path + ": node coordinates differ from the mesh");
    f.values(idx) = v;
    ++rows;
  }
  if (rows != mesh->node_count() || !f.values.allFinite())
    throw Error(ErrorKind::DimensionMismatch, path + ": field does not cover every mesh node");
  return f;
}

Json to_json(const Point& p) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(p(i));
  return a;
}

Json to_json(const Classification& c) {
  Json j;
  j["kind"] = c.kind_name();
  j["labels"] = c.labels();
  if (const auto* cs = std::get_if<Circumsolid>(&c.kind)) {
    j["center"] = to_json(cs->center);
    j["radius"] = cs->radius;
  }
  if (c.circumsolid) {
    j["inscribed_ball"] = {{"center", to_json(c.circumsolid->center)},
                           {"radius", c.circumsolid->radius},
                           {"residual", c.circumsolid->residual}};
  }
  Json factors = Json::array();
  for (const auto& f : c.factors) {
    Json basis = Json::array();
    for (Eigen::Index k = 0; k < f.basis.cols(); ++k) basis.push_back(to_json(f.basis.col(k)));
    factors.push_back({{"dim", f.basis.cols()},
                       {"basis", basis},
                       {"center", to_json(f.center)},
                       {"radius", f.radius},
                       {"faces", f.faces},
                       {"residual", f.residual}});
  }
  j["factors"] = std::move(factors);
  j["inconsistent_normals"] = c.has_inconsistent_normals();
  Json verts = Json::array();
  for (const auto& v : c.vertex_reports) {
    Json e{{"point", to_json(v.point)}, {"consistent", v.consistent}, {"residual", v.residual}};
    if (v.gamma) e["gamma"] = to_json(*v.gamma);
    verts.push_back(std::move(e));
  }
  j["vertices"] = std::move(verts);
  j["borderline"] = c.borderline;
  return j;
}

Json mesh_summary(const Mesh& M) {
  return {{"nodes", M.node_count()},
          {"triangles", M.triangles.size()},
          {"h", M.h},
          {"min_angle_deg", M.min_angle() * 180.0 / M_PI}};
}

Json to_json(const PerturbationResult& r) {
  return {{"mu", r.mu},
          {"residual", r.residual},
          {"v_min", r.v.values.minCoeff()},
          {"v_max", r.v.values.maxCoeff()},
          {"mesh", mesh_summary(*r.v.mesh)}};
}

Json to_json(const SpectralResult& r) {
  return {{"alpha", r.alpha},
          {"lambda0", r.lambda0},
          {"lambda1", r.lambda1},
          {"dlambda", r.dlambda_dalpha},
          {"gap", r.gap()},
          {"eigenvalues", r.eigenvalues},
          {"residuals", r.residuals},
          {"iterations", r.iterations},
          {"mesh", mesh_summary(*r.u0.mesh)}};
}

Json to_json(const CornerExpansion& e) {
  Json beta = Json::array(), f = Json::array(), f_half = Json::array(), spread = Json::array(), index = Json::array();
  for (const auto& c : e.coefficients) {
    index.push_back(c.index);
    beta.push_back(c.beta);
    f.push_back(c.f);
    f_half.push_back(c.f_half);
    spread.push_back(c.spread);
  }
  return {{"vertex", vec2(e.sector.vertex)},
          {"theta0", e.sector.theta0},
          {"bisector", vec2(e.sector.bisector)},
          {"index", index},
          {"beta", beta},
          {"f", f},
          {"diagnostics",
           {{"sample_radius", e.sample_radius},
            {"samples_per_arc", e.samples},
            {"constant", e.constant},
            {"mean_remainder", e.mean_remainder},
            {"linear_part", vec2(e.linear_part)},
            {"f_half_radius", f_half},
            {"relative_spread", spread}}}};
}

Json to_json(const ConcavityReport& r) {
  Json w = Json::array();
  for (const auto& v : r.violations) {
    Json e{{"x", vec2(v.x)},
           {"y", vec2(v.y)},
           {"midpoint_value", v.midpoint_value},
           {"endpoint_bound", v.endpoint_bound},
           {"gap", v.gap},
           {"tol", v.tol},
           {"local_h", v.local_h}};
    if (r.mode == ConcavityMode::Superlevel) e["threshold"] = v.threshold;
    w.push_back(std::move(e));
  }
  Json j{{"mode", to_string(r.mode)},
         {"certificate", r.found_violation()},
         {"violation_count", r.violation_count},
         {"max_gap", r.max_gap},
         {"pairs_tested", r.pairs_tested},
         {"samples", r.samples},
         {"h", r.h},
         {"c_tol", r.c_tol},
         {"diameter", r.diameter}};
  if (r.threshold) j["threshold"] = *r.threshold;
  if (r.refined_max_gap) {
    j["refined_max_gap"] = *r.refined_max_gap;
    j["refined_h"] = *r.refined_h;
  }
  j["stable"] = r.stable;
  if (!r.threshold_scan.empty()) {
    Json s = Json::array();
    for (const auto& [c, n] : r.threshold_scan) s.push_back({{"c", c}, {"pairs", n}});
    j["threshold_scan"] = std::move(s);
  }
  j["violations"] = std::move(w);
  j["note"] = r.found_violation() ? "violations certify failure of the tested property for this discrete field"
                                  : "no counterexample found at this resolution; this is not a proof of the property";
  return j;
}

Json to_json(const PrueferOutcome& o) {
  return {{"mu", o.mu},
          {"sigma_gap", o.sigma_gap},
          {"crossings", o.crossings},
          {"admissible", o.admissible},
          {"truncation_drift", o.truncation_drift}};
}

Json to_json(const MuScan& s) {
  Json adm = Json::array();
  for (std::size_t k = 0; k < s.admissible.size(); ++k)
    adm.push_back({{"mu", s.admissible[k]}, {"sigma_gap", s.admissible_gap[k]}, {"crossings", s.admissible_crossings[k]}});
  return {{"grid_points", s.rows.size()}, {"monotone", s.monotone}, {"admissible", adm}};
}

Json to_json(const RadialGroundState& g) {
  return {{"d", g.d},         {"R", g.R},         {"alpha", g.alpha},       {"lambda", g.lambda},
          {"log_concave", g.log_concave}, {"max_v", g.max_v}, {"max_w", g.max_w}, {"samples", g.samples.size()}};
}

}  // namespace polyrobin::io
