#include "polyrobin/classify.hpp"
#include "polyrobin/concavity.hpp"
#include "polyrobin/cone_harmonics.hpp"
#include "polyrobin/error.hpp"
#include "polyrobin/fem.hpp"
#include "polyrobin/io.hpp"
#include "polyrobin/mesh2d.hpp"
#include "polyrobin/parallel.hpp"
#include "polyrobin/polytope.hpp"
#include "polyrobin/pruefer.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace polyrobin;
using io::Json;

constexpr int kCertificateExit = 10;
constexpr int kMaxRefinements = 8;
constexpr int kMaxBaseLevels = 10;

const char* const kExitCodes =
    "Exit codes:\n"
    "   0  success (concavity: no certificate found)\n"
    "   1  unexpected failure\n"
    "   2  ConfigError (bad flags, invalid domain file, tolerance <= 0, refinement > 8)\n"
    "   3  IoError\n"
    "  10  concavity: certificate found (stable when a refined field is supplied)\n"
    "  20  UnboundedDomain, EmptyDomain, DegenerateInput\n"
    "  21  PointOutsideDomain, PointOutsideSector\n"
    "  22  DimensionUnsupported, DimensionMismatch\n"
    "  23  InternalInconsistency\n"
    "  30  DegenerateTriangle, SingularSystem\n"
    "  31  EigensolverNoConvergence\n"
    "  40  InvalidAngle, DegenerateSector, RadiusTooLarge, MeshTooCoarse\n"
    "  50  ThetaOutOfRange, IntegrationBlowup, TruncationTooSmall\n"
    "  51  RootNotBracketed, NonpositiveSolution\n"
    "  60  NonpositiveField\n"
    "Environment: POLYROBIN_THREADS caps the number of OpenMP threads.";

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

void require_positive(double value, const std::string& name) {
  if (!(value > 0.0) || !std::isfinite(value)) config_error(name + " must be positive");
}

struct Common {
  std::string json_path = "-";
  std::string csv_path;
  double rel_tol = 1e-10;
  double classify_tol = kClassifyTol;
  unsigned seed = 0;
};

struct MeshArgs {
  double h = 0.05;
  int refine = 0;
  bool grade = false;
  double h_min = 0.0;
  double grading = 0.1;
  std::string export_path;
  long long max_nodes = 2'000'000;
};

struct EigenArgs {
  double tol = 1e-9;
  int count = 2;
};

void add_common(CLI::App* app, Common& c, bool with_csv) {
  app->set_help_flag("--help", "print this help message and exit");
  app->add_option("--out,--json", c.json_path, "JSON summary path ('-' for stdout)");
  if (with_csv) app->add_option("--csv", c.csv_path, "CSV data path");
  app->add_option("--polytope-tol", c.rel_tol, "relative tolerance for active sets and redundancy");
  app->add_option("--classify-tol", c.classify_tol, "tolerance for classification residuals");
  app->add_option("--seed", c.seed, "sampling seed (low-discrepancy index offset)");
}

void add_mesh(CLI::App* app, MeshArgs& m) {
  app->add_option("--h", m.h, "target mesh size");
  app->add_option("--refine", m.refine, "extra uniform refinements (at most 8)");
  app->add_flag("--grade-corners", m.grade, "grade the mesh toward corners with opening in (pi/2, pi)");
  app->add_option("--h-min", m.h_min, "smallest edge of the graded region (default h/100)");
  app->add_option("--grading", m.grading, "growth rate of the graded size field");
  app->add_option("--export-mesh", m.export_path, "write the mesh as OFF plus <path>.edges");
  app->add_option("--max-nodes", m.max_nodes, "refuse meshes that would exceed this many nodes");
}

/// Node count after `levels` red refinements: each edge gains a midpoint, each
/// edge splits in two and each triangle adds three interior edges.
double projected_nodes(const Mesh& M, int levels) {
  double nodes = static_cast<double>(M.node_count()), edges = static_cast<double>(M.edge_count()),
         triangles = static_cast<double>(M.triangles.size());
  for (int i = 0; i < levels; ++i) {
    nodes += edges;
    edges = 2 * edges + 3 * triangles;
    triangles *= 4;
  }
  return nodes;
}

void add_eigen(CLI::App* app, EigenArgs& e) {
  app->add_option("--eigen-tol", e.tol, "relative eigen residual tolerance");
  app->add_option("--eigs", e.count, "number of eigenpairs (at least 2)");
}

void validate(const Common& c) {
  require_positive(c.rel_tol, "--polytope-tol");
  require_positive(c.classify_tol, "--classify-tol");
}

EigenOptions eigen_options(const EigenArgs& e) {
  require_positive(e.tol, "--eigen-tol");
  if (e.count < 2) config_error("--eigs must be at least 2");
  EigenOptions o;
  o.residual_tol = e.tol;
  o.count = e.count;
  o.block = std::max(o.block, e.count + 4);
  return o;
}

std::vector<Vec2> critical_corners(const Polytope& P) {
  std::vector<Vec2> out;
  for (int k = 0; k < static_cast<int>(P.vertices().size()); ++k) {
    const Sector S = sector_at_vertex(P, k);
    if (S.theta0 > M_PI / 2 + 1e-9 && S.theta0 < M_PI - 1e-9) out.push_back(S.vertex);
  }
  return out;
}

std::shared_ptr<const Mesh> build_mesh(const Polytope& P, const MeshArgs& m, int later_levels = 0) {
  require_positive(m.h, "--h");
  if (m.refine < 0 || m.refine > kMaxRefinements) config_error("--refine must lie in [0, 8]");
  const double base = triangulate_levels(P, 0).h;
  if (std::log2(base / m.h) > kMaxBaseLevels) config_error("--h is too small for this domain");
  Mesh M;
  if (m.grade) {
    const double h_min = m.h_min > 0.0 ? m.h_min : m.h / 100.0;
    require_positive(m.grading, "--grading");
    if (h_min > m.h) config_error("--h-min must not exceed --h");
    M = triangulate_graded(P, m.h, critical_corners(P), h_min, m.grading);
  } else {
    M = triangulate(P, m.h);
  }
  const double projected = projected_nodes(M, m.refine + later_levels);
  if (projected > static_cast<double>(m.max_nodes))
    config_error("mesh would have " + std::to_string(static_cast<long long>(projected)) +
                 " nodes, above --max-nodes " + std::to_string(m.max_nodes));
  for (int i = 0; i < m.refine; ++i) M = refine(M);
  if (!m.export_path.empty()) export_mesh(M, m.export_path);
  return std::make_shared<const Mesh>(std::move(M));
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      config_error(flag + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) config_error(flag + " is empty");
  return out;
}

/// "a:b:step" or "a..b" (step taken from `default_step`).
std::vector<double> parse_range(const std::string& text, double default_step, const std::string& flag) {
  double a, b, step = default_step;
  std::string s = text;
  if (auto pos = s.find(".."); pos != std::string::npos) {
    s.replace(pos, 2, ":");
    s += ":" + std::to_string(default_step);
  }
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(parse_list(item, flag).front());
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) config_error(flag + ": expected a:b:step, a..b or a single value");
  a = parts[0];
  b = parts[1];
  step = parts[2];
  require_positive(step, flag + " step");
  if (b < a) config_error(flag + ": upper end below lower end");
  std::vector<double> grid;
  const long n = std::lround(std::floor((b - a) / step + 1e-9));
  for (long i = 0; i <= n; ++i) grid.push_back(a + static_cast<double>(i) * step);
  return grid;
}

template <typename Writer>
void write_csv(const std::string& path, Writer&& writer) {
  if (path.empty()) return;
  if (path == "-") {
    writer(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out.precision(17);
  writer(out);
}

/// Max nodal deviation from the closed-form solution, up to the best additive constant.
double closed_form_error(const Field& v, const QuadraticForm& q) {
  Eigen::VectorXd d(v.values.size());
  for (std::size_t i = 0; i < v.mesh->node_count(); ++i)
    d(static_cast<Eigen::Index>(i)) = v.values(static_cast<Eigen::Index>(i)) - q(v.mesh->nodes[i]);
  return 0.5 * (d.maxCoeff() - d.minCoeff());
}

void emit(const Common& c, const Json& j) {
  if (c.csv_path == "-" && c.json_path == "-") return;
  io::write_json(j, c.json_path);
}

// ---------------------------------------------------------------------------

int run_classify(const std::string& domain, const Common& c) {
  validate(c);
  const Polytope P = io::read_domain(domain, c.rel_tol);
  const GeometrySummary g = measures(P);
  Json j = io::to_json(classify(P, c.classify_tol));
  j["dim"] = P.dim();
  j["volume"] = g.volume;
  j["surface_area"] = g.surface_area;
  j["diameter"] = g.diameter;
  j["domain"] = io::domain_to_json(P);
  emit(c, j);
  return 0;
}

int run_perturbation(const std::string& domain, const Common& c, const MeshArgs& m, const std::string& field_path) {
  validate(c);
  const Polytope P = io::read_domain(domain, c.rel_tol);
  auto mesh = build_mesh(P, m);
  const PerturbationResult r = solve_perturbation(mesh);
  Json j = io::to_json(r);
  const GeometrySummary g = measures(P);
  j["surface_over_volume"] = g.surface_area / g.volume;
  if (auto q = quadratic_solution(P, c.classify_tol)) {
    j["closed_form_max_error"] = closed_form_error(r.v, *q);
  }
  if (!field_path.empty()) io::write_field_csv(r.v, field_path);
  write_csv(c.csv_path, [&](std::ostream& out) { io::write_field_csv(r.v, out); });
  emit(c, j);
  return 0;
}

int run_robin(const std::string& domain, double alpha, const Common& c, const MeshArgs& m, const EigenArgs& e,
              const std::string& field_path) {
  validate(c);
  if (!(alpha >= 0.0)) config_error("--alpha must be nonnegative");
  const Polytope P = io::read_domain(domain, c.rel_tol);
  auto mesh = build_mesh(P, m);
  const SpectralResult r = robin_eigensystem(mesh, alpha, eigen_options(e));
  if (!field_path.empty()) io::write_field_csv(r.u0, field_path);
  write_csv(c.csv_path, [&](std::ostream& out) { io::write_field_csv(r.u0, out); });
  emit(c, io::to_json(r));
  return 0;
}

int run_sweep(const std::string& domain, const std::string& alphas_text, const Common& c, const MeshArgs& m,
              const EigenArgs& e) {
  validate(c);
  std::vector<double> alphas = parse_list(alphas_text, "--alphas");
  for (double a : alphas)
    if (!(a >= 0.0)) config_error("--alphas must be nonnegative");
  const Polytope P = io::read_domain(domain, c.rel_tol);
  auto mesh = build_mesh(P, m);
  const SweepResult s = alpha_sweep(mesh, alphas, eigen_options(e));
  Json rows = Json::array();
  for (const auto& r : s.entries)
    rows.push_back({{"alpha", r.alpha}, {"lambda0", r.lambda0}, {"lambda1", r.lambda1}, {"dlambda", r.dlambda_dalpha},
                    {"gap", r.gap()}});
  write_csv(c.csv_path, [&](std::ostream& out) {
    out.precision(17);
    out << "alpha,lambda0,lambda1,dlambda,gap\n";
    for (const auto& r : s.entries)
      out << r.alpha << ',' << r.lambda0 << ',' << r.lambda1 << ',' << r.dlambda_dalpha << ',' << r.gap() << '\n';
  });
  emit(c, Json{{"rows", rows},
               {"lambda0_nondecreasing", s.lambda0_nondecreasing},
               {"derivative_nonnegative", s.derivative_nonnegative},
               {"mesh", io::mesh_summary(*mesh)}});
  return 0;
}

int run_corner(const std::string& domain, int vertex, int modes, double radius, const Common& c, const MeshArgs& m) {
  validate(c);
  require_positive(radius, "--radius");
  if (modes < 1) config_error("--modes must be at least 1");
  const Polytope P = io::read_domain(domain, c.rel_tol);
  if (P.dim() != 2) throw Error(ErrorKind::DimensionUnsupported, "corner needs a polygon");
  if (vertex < 0 || vertex >= static_cast<int>(P.vertices().size())) config_error("--vertex out of range");
  auto mesh = build_mesh(P, m);
  const PerturbationResult r = solve_perturbation(mesh);
  ExpansionOptions opts;
  opts.mu = r.mu;
  Json j = io::to_json(corner_expansion(r.v, P, vertex, radius, modes, opts));
  j["mu"] = r.mu;
  j["cone_radius"] = cone_radius(P, vertex);
  j["mesh"] = io::mesh_summary(*mesh);
  emit(c, j);
  return 0;
}

struct ConcavityArgs {
  std::string field;
  std::string mesh;
  std::string mode = "plain";
  std::string c = "auto";
  std::string refined_field;
  std::string refined_mesh;
  double c_tol = 0.0;
  int samples = 512;
  std::size_t witnesses = 32;
  bool serial = false;
};

int run_concavity(const ConcavityArgs& a, const Common& c) {
  if (a.c_tol < 0.0) config_error("--c-tol must be positive (or omitted for the default)");
  if (a.samples < 0) config_error("--samples must be nonnegative");
  if (a.refined_field.empty() != a.refined_mesh.empty())
    config_error("--refined-field and --refined-mesh must be given together");
  auto mesh = std::make_shared<const Mesh>(import_mesh(a.mesh));
  const Field f = io::read_field_csv(a.field, mesh);
  std::optional<Field> fine;
  if (!a.refined_field.empty()) {
    auto fine_mesh = std::make_shared<const Mesh>(import_mesh(a.refined_mesh));
    fine = io::read_field_csv(a.refined_field, fine_mesh);
  }
  ConcavityOptions opts;
  opts.sampling.interior = a.samples;
  opts.sampling.seed = c.seed;
  opts.c_tol = a.c_tol;
  opts.max_witnesses = a.witnesses;
  opts.parallel = !a.serial;
  const Field* refined = fine ? &*fine : nullptr;

  ConcavityReport report;
  if (a.mode == "plain") {
    report = check_midpoint_concavity(f, opts, refined);
  } else if (a.mode == "log") {
    report = check_log_concavity(f, opts, refined);
  } else if (a.mode == "superlevel") {
    std::optional<double> threshold;
    if (a.c != "auto") threshold = parse_list(a.c, "--c").front();
    report = check_superlevel_convexity(f, threshold, opts, refined);
  } else {
    config_error("--mode must be plain, log or superlevel");
  }
  Json j = io::to_json(report);
  const bool certificate = report.found_violation() && (!refined || report.stable);
  j["exit_certificate"] = certificate;
  emit(c, j);
  return certificate ? kCertificateExit : 0;
}

struct PrueferArgs {
  int d = 3;
  std::string scan;
  std::string mu;
  double step = 1e-3;
  double S = 30.0;
  double grid_step = 0.05;
  bool serial = false;
};

int run_pruefer(const PrueferArgs& a, const Common& c) {
  std::string range_text = !a.scan.empty() ? a.scan : a.mu;
  if (range_text.empty()) config_error("give --scan a:b:step or --mu (value or a..b)");
  require_positive(a.grid_step, "--grid-step");
  const std::vector<double> grid = parse_range(range_text, a.grid_step, a.scan.empty() ? "--mu" : "--scan");
  Json j;
  std::vector<PrueferOutcome> rows;
  if (grid.size() == 1) {
    LegendreProblem p;
    p.d = a.d;
    p.mu = grid.front();
    p.S = a.S;
    p.step = a.step;
    rows.push_back(pruefer_shoot(p));
    j = io::to_json(rows.front());
  } else {
    const MuScan s = a.serial ? admissible_mu_scan_serial(a.d, grid, a.step, a.S)
                              : admissible_mu_scan(a.d, grid, a.step, a.S);
    rows = s.rows;
    j = io::to_json(s);
  }
  j["d"] = a.d;
  j["step"] = a.step;
  j["S"] = a.S;
  Json table = Json::array();
  for (const auto& r : rows) table.push_back(io::to_json(r));
  j["rows"] = std::move(table);
  write_csv(c.csv_path, [&](std::ostream& out) {
    out.precision(17);
    out << "mu,sigma_gap,crossings,admissible\n";
    for (const auto& r : rows) out << r.mu << ',' << r.sigma_gap << ',' << r.crossings << ',' << (r.admissible ? 1 : 0) << '\n';
  });
  emit(c, j);
  return 0;
}

int run_ball(int d, double R, double alpha, int samples, const Common& c) {
  if (samples < 2) config_error("--samples must be at least 2");
  const RadialGroundState g = ball_ground_state(d, R, alpha, samples);
  write_csv(c.csv_path, [&](std::ostream& out) {
    out.precision(17);
    out << "r,u,v,w\n";
    for (const auto& s : g.samples) out << s.r << ',' << s.u << ',' << s.v << ',' << s.w << '\n';
  });
  emit(c, io::to_json(g));
  return 0;
}

int run_gapcheck(const std::string& domain, const std::string& alphas_text, bool force, const Common& c,
                 const MeshArgs& m, const EigenArgs& e) {
  validate(c);
  const std::vector<double> alphas = parse_list(alphas_text, "--alphas");
  const Polytope P = io::read_domain(domain, c.rel_tol);
  const Classification cls = classify(P, c.classify_tol);
  const bool product = !std::holds_alternative<Other>(cls.kind);
  if (!product && !force)
    config_error("gapcheck needs a product of circumsolids (pass --force to run anyway)");
  auto mesh = build_mesh(P, m);
  const EigenOptions opts = eigen_options(e);
  const SweepResult s = alpha_sweep(mesh, alphas, opts);
  const double D = P.diameter();
  const double slack = std::max(1e-6, 100.0 * opts.residual_tol);
  Json rows = Json::array();
  bool any_flag = false;
  for (const auto& r : s.entries) {
    const double margin = r.gap() * D * D / (M_PI * M_PI) - 1.0;
    const bool flagged = margin < -slack;
    any_flag = any_flag || flagged;
    rows.push_back({{"alpha", r.alpha}, {"lambda0", r.lambda0}, {"lambda1", r.lambda1}, {"gap", r.gap()},
                    {"margin", margin}, {"flagged", flagged}});
  }
  write_csv(c.csv_path, [&](std::ostream& out) {
    out.precision(17);
    out << "alpha,gap,margin,flagged\n";
    for (const auto& r : rows)
      out << r["alpha"].get<double>() << ',' << r["gap"].get<double>() << ',' << r["margin"].get<double>() << ','
          << (r["flagged"].get<bool>() ? 1 : 0) << '\n';
  });
  emit(c, Json{{"kind", cls.kind_name()},
               {"forced", !product},
               {"diameter", D},
               {"margin_slack", slack},
               {"any_flagged", any_flag},
               {"rows", rows},
               {"mesh", io::mesh_summary(*mesh)}});
  return 0;
}

int run_converge(const std::string& domain, double alpha, int levels, const Common& c, const MeshArgs& m,
                 const EigenArgs& e) {
  validate(c);
  if (levels < 1 || levels > kMaxRefinements) config_error("--levels must lie in [1, 8]");
  if (!(alpha >= 0.0)) config_error("--alpha must be nonnegative");
  const Polytope P = io::read_domain(domain, c.rel_tol);
  const auto quad = quadratic_solution(P, c.classify_tol);
  const EigenOptions opts = eigen_options(e);
  auto mesh = build_mesh(P, m, levels - 1);
  struct Row {
    int level;
    std::size_t nodes;
    double h, mu, v_error, lambda0, dlambda;
  };
  std::vector<Row> rows;
  for (int level = 0; level < levels; ++level) {
    if (level > 0) mesh = std::make_shared<const Mesh>(refine(*mesh));
    const OperatorSet ops = assemble(*mesh);
    const PerturbationResult pr = solve_perturbation(mesh, ops);
    double err = std::nan("");
    if (quad) {
      err = closed_form_error(pr.v, *quad);
    }
    const SpectralResult sr = robin_eigensystem(mesh, ops, alpha, opts);
    rows.push_back({level, mesh->node_count(), mesh->h, pr.mu, err, sr.lambda0, sr.dlambda_dalpha});
  }
  Json table = Json::array();
  for (const auto& r : rows) {
    Json e{{"level", r.level}, {"nodes", r.nodes}, {"h", r.h}, {"mu", r.mu}, {"lambda0", r.lambda0},
           {"dlambda", r.dlambda}};
    e["v_error"] = std::isnan(r.v_error) ? Json(nullptr) : Json(r.v_error);
    table.push_back(std::move(e));
  }
  Json j{{"alpha", alpha}, {"rows", table}};
  if (rows.size() >= 2) {
    const Row& a = rows[rows.size() - 2];
    const Row& b = rows.back();
    j["lambda0_error_estimate"] = std::abs(b.lambda0 - a.lambda0) / 3.0;
    j["lambda0_extrapolated"] = b.lambda0 + (b.lambda0 - a.lambda0) / 3.0;
    if (quad && a.v_error > 0.0) j["v_error_ratio"] = a.v_error / b.v_error;
  }
  write_csv(c.csv_path, [&](std::ostream& out) {
    out.precision(17);
    out << "level,nodes,h,mu,v_error,lambda0,dlambda\n";
    for (const auto& r : rows)
      out << r.level << ',' << r.nodes << ',' << r.h << ',' << r.mu << ',' << r.v_error << ',' << r.lambda0 << ','
          << r.dlambda << '\n';
  });
  emit(c, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robin ground states on convex polytopes: classification, FEM, corner analysis and certificates"};
  app.footer(kExitCodes);
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "thread cap (overrides POLYROBIN_THREADS when positive)");

  std::function<int()> action;

  Common classify_c;
  std::string classify_domain;
  auto* classify_cmd = app.add_subcommand("classify", "classify a domain (circumsolid / product / other)");
  classify_cmd->add_option("domain", classify_domain, "domain JSON")->required()->check(CLI::ExistingFile);
  add_common(classify_cmd, classify_c, false);
  classify_cmd->callback([&] { action = [&] { return run_classify(classify_domain, classify_c); }; });

  Common pert_c;
  MeshArgs pert_m;
  std::string pert_domain, pert_field;
  auto* pert_cmd = app.add_subcommand("perturbation", "solve the perturbation problem for v and mu");
  pert_cmd->add_option("domain", pert_domain, "domain JSON")->required()->check(CLI::ExistingFile);
  pert_cmd->add_option("--field", pert_field, "write v as field CSV");
  add_common(pert_cmd, pert_c, true);
  add_mesh(pert_cmd, pert_m);
  pert_cmd->callback([&] { action = [&] { return run_perturbation(pert_domain, pert_c, pert_m, pert_field); }; });

  Common robin_c;
  MeshArgs robin_m;
  EigenArgs robin_e;
  std::string robin_domain, robin_field;
  double robin_alpha = 1.0;
  auto* robin_cmd = app.add_subcommand("robin", "Robin ground state and first excited eigenvalue");
  robin_cmd->add_option("domain", robin_domain, "domain JSON")->required()->check(CLI::ExistingFile);
  robin_cmd->add_option("--alpha", robin_alpha, "Robin parameter")->required();
  robin_cmd->add_option("--field", robin_field, "write u0 as field CSV");
  add_common(robin_cmd, robin_c, true);
  add_mesh(robin_cmd, robin_m);
  add_eigen(robin_cmd, robin_e);
  robin_cmd->callback([&] {
    action = [&] { return run_robin(robin_domain, robin_alpha, robin_c, robin_m, robin_e, robin_field); };
  });

  Common sweep_c;
  MeshArgs sweep_m;
  EigenArgs sweep_e;
  std::string sweep_domain, sweep_alphas;
  auto* sweep_cmd = app.add_subcommand("sweep", "eigenvalues over a list of alphas");
  sweep_cmd->add_option("domain", sweep_domain, "domain JSON")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--alphas", sweep_alphas, "comma separated alphas")->required();
  add_common(sweep_cmd, sweep_c, true);
  add_mesh(sweep_cmd, sweep_m);
  add_eigen(sweep_cmd, sweep_e);
  sweep_cmd->callback([&] { action = [&] { return run_sweep(sweep_domain, sweep_alphas, sweep_c, sweep_m, sweep_e); }; });

  Common corner_c;
  MeshArgs corner_m;
  std::string corner_domain;
  int corner_vertex = 0, corner_modes = 4;
  double corner_radius = 0.5;
  auto* corner_cmd = app.add_subcommand("corner", "corner expansion of v at a polygon vertex");
  corner_cmd->add_option("domain", corner_domain, "domain JSON")->required()->check(CLI::ExistingFile);
  corner_cmd->add_option("--vertex", corner_vertex, "vertex index (as listed by classify)")->required();
  corner_cmd->add_option("--modes", corner_modes, "number of angular modes");
  corner_cmd->add_option("--radius", corner_radius, "sampling arc radius");
  add_common(corner_cmd, corner_c, false);
  add_mesh(corner_cmd, corner_m);
  corner_cmd->callback([&] {
    action = [&] { return run_corner(corner_domain, corner_vertex, corner_modes, corner_radius, corner_c, corner_m); };
  });

  Common conc_c;
  ConcavityArgs conc;
  auto* conc_cmd = app.add_subcommand("concavity", "search for midpoint (log-)concavity or superlevel violations");
  conc_cmd->add_option("field", conc.field, "field CSV (node_index,x,y,value)")->required()->check(CLI::ExistingFile);
  conc_cmd->add_option("--mesh", conc.mesh, "mesh OFF file the field lives on")->required()->check(CLI::ExistingFile);
  conc_cmd->add_option("--mode", conc.mode, "plain | log | superlevel");
  conc_cmd->add_option("--c", conc.c, "superlevel threshold or 'auto'");
  conc_cmd->add_option("--refined-field", conc.refined_field, "same field on a refined mesh");
  conc_cmd->add_option("--refined-mesh", conc.refined_mesh, "mesh of the refined field");
  conc_cmd->add_option("--c-tol", conc.c_tol, "tolerance constant (tol = c_tol * h_loc^2); default from the field");
  conc_cmd->add_option("--samples", conc.samples, "interior low-discrepancy samples");
  conc_cmd->add_option("--witnesses", conc.witnesses, "witnesses kept in the report");
  conc_cmd->add_flag("--serial", conc.serial, "use the single-threaded reference scan");
  add_common(conc_cmd, conc_c, false);
  conc_cmd->callback([&] { action = [&] { return run_concavity(conc, conc_c); }; });

  Common pr_c;
  PrueferArgs pr;
  auto* pr_cmd = app.add_subcommand("pruefer", "Pruefer shooting for the Legendre-type ODE");
  pr_cmd->add_option("--d", pr.d, "dimension (>= 3)");
  pr_cmd->add_option("--scan", pr.scan, "mu grid a:b:step");
  pr_cmd->add_option("--mu", pr.mu, "single mu or range a..b (spacing --grid-step)");
  pr_cmd->add_option("--grid-step", pr.grid_step, "grid spacing for --mu a..b");
  pr_cmd->add_option("--step", pr.step, "RK4 step in s (<= 1e-3)");
  pr_cmd->add_option("--S", pr.S, "truncation |s| <= S (>= 30)");
  pr_cmd->add_flag("--serial", pr.serial, "use the single-threaded reference scan");
  add_common(pr_cmd, pr_c, true);
  pr_cmd->callback([&] { action = [&] { return run_pruefer(pr, pr_c); }; });

  Common ball_c;
  int ball_d = 3, ball_samples = 200;
  double ball_R = 1.0, ball_alpha = 1.0;
  auto* ball_cmd = app.add_subcommand("ball", "radial Robin ground state on a ball");
  ball_cmd->add_option("--d", ball_d, "dimension");
  ball_cmd->add_option("--R", ball_R, "radius");
  ball_cmd->add_option("--alpha", ball_alpha, "Robin parameter");
  ball_cmd->add_option("--samples", ball_samples, "radial samples in the CSV");
  add_common(ball_cmd, ball_c, true);
  ball_cmd->callback([&] { action = [&] { return run_ball(ball_d, ball_R, ball_alpha, ball_samples, ball_c); }; });

  Common gap_c;
  MeshArgs gap_m;
  EigenArgs gap_e;
  std::string gap_domain, gap_alphas = "0,0.5,1,5";
  bool gap_force = false;
  auto* gap_cmd = app.add_subcommand("gapcheck", "margin gap * D^2 / pi^2 - 1 for each alpha");
  gap_cmd->add_option("domain", gap_domain, "domain JSON")->required()->check(CLI::ExistingFile);
  gap_cmd->add_option("--alphas", gap_alphas, "comma separated alphas");
  gap_cmd->add_flag("--force", gap_force, "run on domains that are not products of circumsolids");
  add_common(gap_cmd, gap_c, true);
  add_mesh(gap_cmd, gap_m);
  add_eigen(gap_cmd, gap_e);
  gap_cmd->callback([&] {
    action = [&] { return run_gapcheck(gap_domain, gap_alphas, gap_force, gap_c, gap_m, gap_e); };
  });

  Common conv_c;
  MeshArgs conv_m;
  EigenArgs conv_e;
  std::string conv_domain;
  double conv_alpha = 1.0;
  int conv_levels = 3;
  auto* conv_cmd = app.add_subcommand("converge", "refinement study of mu, v and lambda0");
  conv_cmd->add_option("domain", conv_domain, "domain JSON")->required()->check(CLI::ExistingFile);
  conv_cmd->add_option("--alpha", conv_alpha, "Robin parameter");
  conv_cmd->add_option("--levels", conv_levels, "number of meshes (each a uniform refinement of the last)");
  add_common(conv_cmd, conv_c, true);
  add_mesh(conv_cmd, conv_m);
  add_eigen(conv_cmd, conv_e);
  conv_cmd->callback([&] {
    action = [&] { return run_converge(conv_domain, conv_alpha, conv_levels, conv_c, conv_m, conv_e); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code(ErrorKind::Config);
  }

  try {
    std::optional<parallel::ThreadLimit> limit;
    if (threads > 0) limit.emplace(threads);
    return action();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
