#pragma once

#include "polyrobin/polytope.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace polyrobin {

/// Default tolerance for rank and residual decisions on unit-normalized data.
inline constexpr double kClassifyTol = 1e-9;

struct InscribedBall {
  Point center;
  double radius = 0.0;
  double residual = 0.0;  ///< max |b_i - center . n_i - radius|
};

/// One orthogonal factor E_k of a product decomposition. `basis` holds an
/// orthonormal basis of E_k as columns; `center` is given in those coordinates.
struct Factor {
  Eigen::MatrixXd basis;
  Point center;
  double radius = 0.0;
  std::vector<int> faces;  ///< half-space indices whose normals lie in E_k
  double residual = 0.0;
};

struct Circumsolid {
  Point center;
  double radius = 0.0;
};
struct ProductOfCircumsolids {
  std::vector<Factor> factors;
};
struct Other {};

using ClassificationKind = std::variant<Circumsolid, ProductOfCircumsolids, Other>;

struct VertexReport {
  Point point;
  bool consistent = false;
  std::optional<Point> gamma;
  double residual = 0.0;
};

struct Classification {
  ClassificationKind kind;
  /// Factor list of the decomposition, also for a single-factor circumsolid.
  std::vector<Factor> factors;
  /// Inscribed ball touching every face, whenever one exists (the square has one
  /// although its primary kind is the two-factor product).
  std::optional<InscribedBall> circumsolid;
  std::vector<VertexReport> vertex_reports;
  /// Residuals within 100x of the tolerance on either side of a decision.
  std::vector<std::string> borderline;

  bool has_inconsistent_normals() const;
  std::string kind_name() const;
  /// Every label that applies, e.g. {"Circumsolid", "ProductOfCircumsolids"}.
  std::vector<std::string> labels() const;
};

/// Quadratic q(x) = 1/2 x^T H x + linear . x + constant.
struct QuadraticForm {
  Eigen::MatrixXd hessian;
  Point linear;
  double constant = 0.0;

  double operator()(const Point& x) const { return 0.5 * x.dot(hessian * x) + linear.dot(x) + constant; }
  Point gradient(const Point& x) const { return hessian * x + linear; }
  double laplacian() const { return hessian.trace(); }
};

/// Ball touching every face plane: least-squares solve of x0 . n_i + R = b_i.
std::optional<InscribedBall> is_circumsolid(const Polytope& P, double tol = kClassifyTol);

/// Same test on a raw list of (normal, offset) pairs living in R^k.
std::optional<InscribedBall> is_circumsolid(const std::vector<HalfSpace>& hs, double scale, double tol = kClassifyTol);

/// Splits the normals into mutually orthogonal groups and tests each factor.
ClassificationKind product_decomposition(const Polytope& P, double tol = kClassifyTol);

/// gamma with gamma . n_i = -1 for all i, if the system is solvable.
std::optional<Point> consistent_normals(const std::vector<Point>& normals, double tol = kClassifyTol);

std::vector<VertexReport> analyze_normals(const Polytope& P, double tol = kClassifyTol);

/// Full report: kind, factor list, optional inscribed ball, per-vertex normals.
Classification classify(const Polytope& P, double tol = kClassifyTol);

/// v(x) = -1/2 sum_k |pi_k(x) - p_k|^2 / R_k when P is a product of circumsolids.
/// Solves Laplace(v) = -mu with D_n v = -1 on every face.
std::optional<QuadraticForm> quadratic_solution(const Polytope& P, double tol = kClassifyTol);

/// mu = sum_k dim(E_k) / R_k for a product decomposition.
double perturbation_mu(const std::vector<Factor>& factors);

}  // namespace polyrobin
