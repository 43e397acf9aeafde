#pragma once

#include <functional>
#include <vector>

namespace polyrobin {

/// f, f', f'' at one angle.
struct ThetaJet {
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;
};

using ThetaFunction = std::function<ThetaJet(double theta)>;

/// f'' - (d-2) tan(theta) f' - mu/cos^2(theta) f + lambda f at theta, |theta| < pi/2.
double legendre_residual(int d, double mu, double lambda, const ThetaFunction& f, double theta);

/// The three polynomial-type solutions at lambda = 2d.
enum class ExplicitMode {
  Zonal,     ///< mu = 0:        sin^2 - cos^2/(d-1)
  Mixed,     ///< mu = d-2:      sin cos
  Sectoral,  ///< mu = 2(d-1):   cos^2
};

double explicit_mu(int d, ExplicitMode mode);
ThetaFunction explicit_solution(int d, ExplicitMode mode);

/// theta(s) with tanh(s/2) = tan(theta/2).
double theta_of_s(double s);
/// g(s) = cosh(s)^(-(d-3)/2) f(theta(s)).
double g_of_s(int d, const ThetaFunction& f, double s);
/// Potential term of g'' + V g = 0: (d+1)(d+3)/(4 cosh^2 s) - ((d-3)/2)^2 - mu.
double g_potential(int d, double mu, double s);

struct LegendreProblem {
  int d = 3;
  double mu = 0.0;
  double lambda = 0.0;  ///< 0 selects the default 2d
  double S = 30.0;      ///< half-width of the s-interval
  double step = 1e-3;
};

/// Limits of the Pruefer angle: sigma_-(mu) = 2 atan(sqrt(((d-3)/2)^2 + mu)), sigma_+ = -sigma_-.
double sigma_minus(int d, double mu);

/// Right-hand side sigma_s(s, sigma).
double sigma_rate(int d, double mu, double s, double sigma);

struct PrueferOutcome {
  double mu = 0.0;
  /// sigma_f(0) - sigma_b(0): the solution leaving sigma_- at -S minus the one
  /// arriving at sigma_+ at +S, compared at s = 0. At an admissible mu it equals
  /// the terminal gap sigma_bar - sigma_+.
  double sigma_gap = 0.0;
  int crossings = 0;       ///< downward passages through odd multiples of pi
  bool admissible = false; ///< |sigma_gap mod 2 pi| <= 0.05
  double truncation_drift = 0.0;  ///< |gap(S) - gap(1.5 S)|
};

inline constexpr double kAdmissibleTol = 0.05;

/// Two-sided RK4 shooting at lambda = 2d. Throws Config (bad parameters),
/// IntegrationBlowup, TruncationTooSmall (gap moves > 0.01 rad under S -> 1.5 S).
PrueferOutcome pruefer_shoot(const LegendreProblem& p);

struct MuScan {
  std::vector<PrueferOutcome> rows;
  std::vector<double> admissible;     ///< localized by bisection on sigma_gap - 2 pi k
  std::vector<double> admissible_gap; ///< sigma_gap at each localized mu
  std::vector<int> admissible_crossings;
  bool monotone = true;               ///< sigma_gap strictly increasing along the grid
};

/// Runs pruefer_shoot on every grid point (OpenMP) and localizes the roots of
/// sigma_gap in 2 pi Z to `mu_tol`.
MuScan admissible_mu_scan(int d, const std::vector<double>& mu_grid, double step = 1e-3, double S = 30.0,
                          double mu_tol = 1e-9);
/// Serial reference of admissible_mu_scan.
MuScan admissible_mu_scan_serial(int d, const std::vector<double>& mu_grid, double step = 1e-3, double S = 30.0,
                                 double mu_tol = 1e-9);

struct RadialSample {
  double r = 0.0;
  double u = 0.0;
  double v = 0.0;  ///< (log u)'
  double w = 0.0;  ///< v'
};

struct RadialGroundState {
  int d = 0;
  double R = 0.0;
  double alpha = 0.0;
  double lambda = 0.0;
  std::vector<RadialSample> samples;
  bool log_concave = false;
  double max_v = 0.0;  ///< over (0, R]
  double max_w = 0.0;  ///< over [0, R]
};

/// Robin ground state on the ball B_R in R^d by shooting on lambda.
/// Throws RootNotBracketed or NonpositiveSolution.
RadialGroundState ball_ground_state(int d, double R, double alpha, int samples = 200);

}  // namespace polyrobin
