#pragma once

#include "polyrobin/fem.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace polyrobin {

/// Midpoint tests on nodal P1 fields. A report with violations is a
/// certificate that the tested property FAILS for the discrete field; an empty
/// report only means that no counterexample was found at this resolution.
enum class ConcavityMode { Concavity, LogConcavity, Superlevel };

std::string to_string(ConcavityMode mode);

struct Witness {
  Vec2 x = Vec2::Zero();
  Vec2 y = Vec2::Zero();
  double midpoint_value = 0.0;
  /// (f(x) + f(y)) / 2 for the concavity modes, min(f(x), f(y)) for superlevel.
  double endpoint_bound = 0.0;
  double gap = 0.0;        ///< endpoint_bound - midpoint_value
  double tol = 0.0;        ///< tolerance the gap was compared against
  double threshold = 0.0;  ///< superlevel c (superlevel mode only)
  double local_h = 0.0;    ///< longest edge among the triangles touched by x, y and the midpoint
};

/// Deterministic sample set, fixed in physical coordinates so that the same
/// points are used on every refinement of a domain.
struct SampleOptions {
  int interior = 512;         ///< Halton points (bases 2, 3)
  unsigned seed = 0;          ///< Halton index offset
  int corner_radii = 24;      ///< geometric radii per corner patch
  int corner_angles = 13;     ///< angles per radius, edges included
  double corner_outer = 0.3;  ///< patch radius as a fraction of the shorter adjacent edge
  double corner_inner = 2e-4; ///< innermost radius as a fraction of the patch radius
};

std::vector<Vec2> sample_points(const Mesh& mesh, const SampleOptions& opts = {});

struct ConcavityOptions {
  SampleOptions sampling;
  /// Per-pair tolerance is c_tol * h_loc^2. Non-positive selects the default
  /// 4 * (max f - min f) / diam^2, which dominates P1 interpolation error.
  double c_tol = 0.0;
  std::size_t max_witnesses = 32;
  bool parallel = true;  ///< false runs the single-threaded reference scan
};

struct ConcavityReport {
  ConcavityMode mode = ConcavityMode::Concavity;
  std::optional<double> threshold;  ///< superlevel c of the best witness
  std::vector<Witness> violations;  ///< best witnesses, sorted by decreasing gap
  std::size_t violation_count = 0;  ///< all pairs exceeding their tolerance
  std::size_t pairs_tested = 0;
  std::size_t samples = 0;
  double max_gap = 0.0;  ///< largest gap among violating pairs (0 when none)
  double h = 0.0;
  double c_tol = 0.0;
  double diameter = 0.0;
  /// Superlevel auto mode: (c, number of witnessing pairs) on 32 field quantiles.
  std::vector<std::pair<double, std::size_t>> threshold_scan;

  std::optional<double> refined_max_gap;
  std::optional<double> refined_h;
  bool stable = false;  ///< violations on both meshes, max gaps within 25%

  bool found_violation() const { return !violations.empty(); }
};

/// Gap of a single pair under `mode`; nullopt when a point lies outside the mesh.
std::optional<Witness> evaluate_pair(const Field& f, const Vec2& x, const Vec2& y,
                                     ConcavityMode mode = ConcavityMode::Concavity, double threshold = 0.0);

/// Recomputes a witness from the raw nodal data (fresh point location).
/// Returns the gap, or nullopt if a point no longer lies in the mesh.
std::optional<double> recheck_witness(const Field& f, const Witness& w, ConcavityMode mode);

/// Midpoint concavity test over all sample pairs. When `refined` is given the
/// same test runs on it and `stable` records whether the violation persists.
ConcavityReport check_midpoint_concavity(const Field& v, const ConcavityOptions& opts = {},
                                         const Field* refined = nullptr);

/// Midpoint test applied to the nodal logarithm. Throws NonpositiveField.
ConcavityReport check_log_concavity(const Field& u, const ConcavityOptions& opts = {},
                                    const Field* refined = nullptr);

/// Pairs with both endpoints above c + tol and midpoint below c - tol. Without
/// `c` every pair is tested at its own best threshold (min(f(x), f(y)) + f(m)) / 2
/// and 32 field quantiles are scanned for reporting.
ConcavityReport check_superlevel_convexity(const Field& v, std::optional<double> c = std::nullopt,
                                           const ConcavityOptions& opts = {}, const Field* refined = nullptr);

/// |g_fine - g_coarse| <= 0.25 * max(g_fine, g_coarse), both positive.
bool gaps_agree(double coarse, double fine, double rel = 0.25);

}  // namespace polyrobin
