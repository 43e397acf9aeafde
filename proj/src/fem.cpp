#include "polyrobin/fem.hpp"

#include "polyrobin/error.hpp"
#include "polyrobin/parallel.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace polyrobin {

namespace {

using Triplet = Eigen::Triplet<double>;

struct ElementTriplets {
  std::vector<Triplet> k, m;
};

void element_contributions(const Mesh& M, std::size_t t, ElementTriplets& out) {
  const auto& tr = M.triangles[t];
  const Vec2& p0 = M.nodes[tr[0]];
  const Vec2& p1 = M.nodes[tr[1]];
  const Vec2& p2 = M.nodes[tr[2]];
  const double area = 0.5 * ((p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x());
  if (!(area >= 1e-14 * std::max(1.0, M.h * M.h))) {
    std::ostringstream msg;
    msg << "triangle " << t << " has signed area " << area;
    throw Error(ErrorKind::DegenerateTriangle, msg.str());
  }
  // gradient of barycentric coordinate i is (b_i, c_i) / (2 area)
  const double b[3] = {p1.y() - p2.y(), p2.y() - p0.y(), p0.y() - p1.y()};
  const double c[3] = {p2.x() - p1.x(), p0.x() - p2.x(), p1.x() - p0.x()};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      out.k.emplace_back(tr[i], tr[j], (b[i] * b[j] + c[i] * c[j]) / (4.0 * area));
      out.m.emplace_back(tr[i], tr[j], area / 12.0 * (i == j ? 2.0 : 1.0));
    }
}

OperatorSet finish(const Mesh& M, const std::vector<Triplet>& k, const std::vector<Triplet>& m) {
  const auto n = static_cast<Eigen::Index>(M.node_count());
  OperatorSet ops;
  ops.stiffness.resize(n, n);
  ops.mass.resize(n, n);
  ops.boundary_mass.resize(n, n);
  ops.stiffness.setFromTriplets(k.begin(), k.end());
  ops.mass.setFromTriplets(m.begin(), m.end());

  int faces = 0;
  for (const auto& e : M.boundary_edges) faces = std::max(faces, e.face + 1);
  ops.face_load.assign(static_cast<std::size_t>(faces), Eigen::VectorXd::Zero(n));
  ops.face_length.assign(static_cast<std::size_t>(faces), 0.0);
  std::vector<Triplet> bt;
  for (const auto& e : M.boundary_edges) {
    const int a = e.nodes[0], c = e.nodes[1];
    const double len = (M.nodes[a] - M.nodes[c]).norm();
    bt.emplace_back(a, a, len / 3.0);
    bt.emplace_back(c, c, len / 3.0);
    bt.emplace_back(a, c, len / 6.0);
    bt.emplace_back(c, a, len / 6.0);
    ops.face_load[e.face](a) += 0.5 * len;
    ops.face_load[e.face](c) += 0.5 * len;
    ops.face_length[e.face] += len;
    ops.perimeter += len;
  }
  ops.boundary_mass.setFromTriplets(bt.begin(), bt.end());
  ops.area = M.total_area();
  return ops;
}

}  // namespace

OperatorSet assemble_serial(const Mesh& M) {
  ElementTriplets all;
  all.k.reserve(9 * M.triangles.size());
  all.m.reserve(9 * M.triangles.size());
  for (std::size_t t = 0; t < M.triangles.size(); ++t) element_contributions(M, t, all);
  return finish(M, all.k, all.m);
}

OperatorSet assemble(const Mesh& M) {
  const int threads = parallel::max_threads();
  std::vector<ElementTriplets> local(static_cast<std::size_t>(threads));
  const auto nt = static_cast<std::int64_t>(M.triangles.size());
  std::vector<std::string> failures(static_cast<std::size_t>(threads));
  // Static chunks in thread order keep the concatenated triplet order equal to
  // the serial order, so summation inside setFromTriplets is identical.
#pragma omp parallel num_threads(threads)
  {
    const int tid = parallel::thread_id();
    const int nth = parallel::team_size();
    const std::int64_t lo = nt * tid / nth;
    const std::int64_t hi = nt * (tid + 1) / nth;
    try {
      for (std::int64_t t = lo; t < hi; ++t) element_contributions(M, static_cast<std::size_t>(t), local[tid]);
    } catch (const Error& e) {
      failures[tid] = e.what();
    }
  }
  for (const auto& f : failures)
    if (!f.empty()) throw Error(ErrorKind::DegenerateTriangle, f);
  std::vector<Triplet> k, m;
  k.reserve(9 * M.triangles.size());
  m.reserve(9 * M.triangles.size());
  for (const auto& l : local) {
    k.insert(k.end(), l.k.begin(), l.k.end());
    m.insert(m.end(), l.m.begin(), l.m.end());
  }
  return finish(M, k, m);
}

PerturbationResult solve_perturbation(std::shared_ptr<const Mesh> mesh, const std::vector<double>& gammas) {
  const OperatorSet ops = assemble(*mesh);
  return solve_perturbation(std::move(mesh), ops, gammas);
}

PerturbationResult solve_perturbation(std::shared_ptr<const Mesh> mesh, const OperatorSet& ops,
                                      const std::vector<double>& gammas) {
  const auto n = static_cast<Eigen::Index>(mesh->node_count());
  const std::size_t faces = ops.face_load.size();
  std::vector<double> g = gammas;
  if (g.empty()) g.assign(faces, 1.0);
  if (g.size() < faces) throw Error(ErrorKind::Config, "one gamma per face required");

  const Eigen::VectorXd mass_ones = ops.mass * Eigen::VectorXd::Ones(n);
  double flux = 0.0;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < faces; ++k) {
    flux += g[k] * ops.face_length[k];
    rhs -= g[k] * ops.face_load[k];
  }
  PerturbationResult out;
  out.mu = flux / ops.area;
  rhs += out.mu * mass_ones;
  const double incompatibility = rhs.sum();
  rhs.array() -= incompatibility / static_cast<double>(n);

  // K + K00 e0 e0^T is definite, and with a compatible load its solution has v(0) = 0.
  SparseMatrix A = ops.stiffness;
  A.coeffRef(0, 0) += A.coeff(0, 0);
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::SingularSystem, "perturbation system is singular");
  Eigen::VectorXd v = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success || !v.allFinite()) throw Error(ErrorKind::SingularSystem, "perturbation solve failed");
  v.array() -= mass_ones.dot(v) / ops.area;
  out.residual = (ops.stiffness * v - rhs).norm() / std::max(rhs.norm(), 1e-300);

  out.v.mesh = std::move(mesh);
  out.v.values = std::move(v);
  out.v.problem = "perturbation";
  out.v.params["mu"] = out.mu;
  out.v.params["incompatibility"] = incompatibility;
  return out;
}

namespace {

// Deterministic start block: low-degree polynomials in the node coordinates.
Eigen::MatrixXd polynomial_block(const Mesh& M, int p) {
  const auto n = static_cast<Eigen::Index>(M.node_count());
  Eigen::MatrixXd X(n, p);
  Vec2 c = Vec2::Zero();
  for (const auto& q : M.nodes) c += q;
  c /= static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = M.nodes[i].x() - c.x(), y = M.nodes[i].y() - c.y();
    const double mono[] = {1.0, x, y, x * x, x * y, y * y, x * x * x, x * x * y, x * y * y, y * y * y,
                           x * x * x * x, y * y * y * y};
    for (int j = 0; j < p; ++j) X(i, j) = j < 12 ? mono[j] : std::cos((j + 1) * x) * std::sin((j + 2) * y + 0.3);
  }
  return X;
}

}  // namespace

SpectralResult robin_eigensystem(std::shared_ptr<const Mesh> mesh, double alpha, const EigenOptions& opts) {
  const OperatorSet ops = assemble(*mesh);
  return robin_eigensystem(std::move(mesh), ops, alpha, opts);
}

SpectralResult robin_eigensystem(std::shared_ptr<const Mesh> mesh, const OperatorSet& ops, double alpha,
                                 const EigenOptions& opts, const Eigen::MatrixXd* warm_start) {
  if (!(alpha >= 0.0)) throw Error(ErrorKind::Config, "alpha must be nonnegative");
  const auto n = static_cast<Eigen::Index>(mesh->node_count());
  const int k = std::max(1, opts.count);
  const int p = static_cast<int>(std::min<Eigen::Index>(std::max(opts.block, k + 2), n));

  const SparseMatrix A = ops.stiffness + alpha * ops.boundary_mass;
  // Shift 0 for alpha > 0 (A is positive definite); slightly negative at alpha = 0.
  const double shift = alpha > 0.0 ? 0.0 : -1e-2 * ops.perimeter / ops.area;
  const SparseMatrix S = A - shift * ops.mass;
  Eigen::SimplicialLDLT<SparseMatrix> solver(S);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::SingularSystem, "shifted Robin operator is singular");

  Eigen::MatrixXd X = (warm_start != nullptr && warm_start->rows() == n && warm_start->cols() == p)
                          ? *warm_start
                          : polynomial_block(*mesh, p);
  SpectralResult out;
  out.alpha = alpha;
  Eigen::VectorXd theta;
  std::vector<double> res(static_cast<std::size_t>(k), std::numeric_limits<double>::infinity());
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    Eigen::MatrixXd Y = solver.solve(ops.mass * X);
    const Eigen::MatrixXd AY = A * Y;
    const Eigen::MatrixXd MY = ops.mass * Y;
    Eigen::MatrixXd As = Y.transpose() * AY;
    Eigen::MatrixXd Ms = Y.transpose() * MY;
    As = 0.5 * (As + As.transpose());
    Ms = 0.5 * (Ms + Ms.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(As, Ms);
    if (ritz.info() != Eigen::Success) {
      // rank loss in the block: re-orthonormalize and continue
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
      X = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
      continue;
    }
    theta = ritz.eigenvalues();
    const Eigen::MatrixXd Q = ritz.eigenvectors();
    X = Y * Q;
    const Eigen::MatrixXd AX = AY * Q;
    const Eigen::MatrixXd MX = MY * Q;
    bool done = true;
    for (int j = 0; j < k; ++j) {
      res[j] = (AX.col(j) - theta(j) * MX.col(j)).norm() / X.col(j).norm();
      done = done && res[j] <= opts.residual_tol;
    }
    if (done) break;
  }
  out.iterations = it + 1;
  out.residuals = res;
  for (int j = 0; j < k; ++j) {
    if (!(res[j] <= opts.residual_tol)) {
      std::ostringstream msg;
      msg << "eigenpair " << j << " residual " << res[j] << " after " << opts.max_iterations << " iterations";
      throw Error(ErrorKind::EigensolverNoConvergence, msg.str());
    }
  }
  for (int j = 0; j < p; ++j) out.eigenvalues.push_back(theta(j));
  out.lambda0 = theta(0);
  out.lambda1 = k > 1 ? theta(1) : std::numeric_limits<double>::quiet_NaN();

  Eigen::VectorXd u = X.col(0);
  if (u.sum() < 0) u = -u;
  u *= std::sqrt(ops.area / u.dot(ops.mass * u));
  if (u.minCoeff() <= 0.0) throw Error(ErrorKind::EigensolverNoConvergence, "discrete ground state has a nonpositive nodal value (refine near acute corners)");
  out.dlambda_dalpha = u.dot(ops.boundary_mass * u) / u.dot(ops.mass * u);
  out.u0.mesh = std::move(mesh);
  out.u0.values = std::move(u);
  out.u0.problem = "robin_ground_state";
  out.u0.params["alpha"] = alpha;
  out.u0.params["lambda0"] = out.lambda0;
  if (k > 1) out.u1 = X.col(1);
  out.basis = std::move(X);
  return out;
}

SweepResult alpha_sweep(std::shared_ptr<const Mesh> mesh, const std::vector<double>& alphas, const EigenOptions& opts) {
  if (!std::is_sorted(alphas.begin(), alphas.end()) || (!alphas.empty() && alphas.front() < 0.0))
    throw Error(ErrorKind::Config, "alphas must be sorted and nonnegative");
  const OperatorSet ops = assemble(*mesh);
  SweepResult out;
  const Eigen::MatrixXd* warm = nullptr;
  for (double a : alphas) {
    out.entries.push_back(robin_eigensystem(mesh, ops, a, opts, warm));
    warm = &out.entries.back().basis;
    const auto& e = out.entries;
    if (e.size() > 1 && e.back().lambda0 < e[e.size() - 2].lambda0 - 1e-9) out.lambda0_nondecreasing = false;
    if (e.back().dlambda_dalpha < 0.0) out.derivative_nonnegative = false;
  }
  return out;
}

}  // namespace polyrobin
