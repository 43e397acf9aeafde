#pragma once

#include "polyrobin/mesh2d.hpp"

#include <Eigen/Sparse>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace polyrobin {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Discrete bilinear forms of the P1 space on a mesh.
struct OperatorSet {
  SparseMatrix stiffness;      ///< int grad(phi_i) . grad(phi_j)
  SparseMatrix mass;           ///< int phi_i phi_j
  SparseMatrix boundary_mass;  ///< int_{boundary} phi_i phi_j
  /// bflux[k](i) = int over face k of phi_i; indexed by polytope face.
  std::vector<Eigen::VectorXd> face_load;
  std::vector<double> face_length;
  double area = 0.0;
  double perimeter = 0.0;
};

/// Nodal P1 field on a shared, immutable mesh.
struct Field {
  std::shared_ptr<const Mesh> mesh;
  Eigen::VectorXd values;
  std::string problem;
  std::map<std::string, double> params;
};

/// Parallel (OpenMP) P1 assembly. Throws DegenerateTriangle for non-positive areas.
OperatorSet assemble(const Mesh& M);
/// Single-threaded reference assembly; produces the same matrices.
OperatorSet assemble_serial(const Mesh& M);

struct PerturbationResult {
  Field v;
  double mu = 0.0;
  double residual = 0.0;  ///< relative residual of the bordered system
};

/// Solves Laplace(v) + mu = 0 with D_n v = -gamma_k on face k, zero mean.
/// `gammas` defaults to all ones; mu = sum_k gamma_k |face_k| / |domain|.
PerturbationResult solve_perturbation(std::shared_ptr<const Mesh> mesh, const OperatorSet& ops,
                                      const std::vector<double>& gammas = {});
PerturbationResult solve_perturbation(std::shared_ptr<const Mesh> mesh, const std::vector<double>& gammas = {});

struct EigenOptions {
  int count = 2;
  double residual_tol = 1e-9;
  int max_iterations = 500;
  int block = 6;
};

struct SpectralResult {
  double alpha = 0.0;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  Field u0;  ///< positive, (1/|domain|) int u0^2 = 1
  Eigen::VectorXd u1;
  double dlambda_dalpha = 0.0;  ///< int_boundary u0^2 / int u0^2
  std::vector<double> eigenvalues;
  std::vector<double> residuals;
  int iterations = 0;
  /// Ritz block of the last iteration, usable as a warm start.
  Eigen::MatrixXd basis;

  double gap() const { return lambda1 - lambda0; }
};

/// Smallest eigenpairs of (K + alpha B) u = lambda M u by block shift-invert
/// iteration with Rayleigh-Ritz projection.
SpectralResult robin_eigensystem(std::shared_ptr<const Mesh> mesh, const OperatorSet& ops, double alpha,
                                 const EigenOptions& opts = {}, const Eigen::MatrixXd* warm_start = nullptr);
SpectralResult robin_eigensystem(std::shared_ptr<const Mesh> mesh, double alpha, const EigenOptions& opts = {});

struct SweepResult {
  std::vector<SpectralResult> entries;
  bool lambda0_nondecreasing = true;
  bool derivative_nonnegative = true;
};

/// Warm-started sweep over sorted nonnegative alphas.
SweepResult alpha_sweep(std::shared_ptr<const Mesh> mesh, const std::vector<double>& alphas,
                        const EigenOptions& opts = {});

}  // namespace polyrobin
