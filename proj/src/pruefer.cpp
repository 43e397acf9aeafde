#include "polyrobin/pruefer.hpp"

#include "polyrobin/error.hpp"
#include "polyrobin/parallel.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

namespace polyrobin {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double offset_sq(int d) {
  const double a = 0.5 * (d - 3);
  return a * a;
}

// Number of odd multiples of pi c with lo < c <= hi.
int odd_pi_between(double lo, double hi) {
  if (!(hi > lo)) return 0;
  const auto index = [](double x) { return std::floor((x / M_PI - 1.0) / 2.0); };
  return static_cast<int>(index(hi) - index(lo));
}

struct HalfSweep {
  double sigma = 0.0;
  int crossings = 0;
};

// RK4 from s = from to s = 0 starting at sigma0. Down-crossings are counted in
// the direction of increasing s regardless of the integration direction.
HalfSweep sweep_to_origin(int d, double mu, double from, double sigma0, double step) {
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(from) / step)));
  const double h = -from / n;
  double s = from, sigma = sigma0;
  HalfSweep out;
  for (int k = 0; k < n; ++k) {
    const double k1 = sigma_rate(d, mu, s, sigma);
    const double k2 = sigma_rate(d, mu, s + 0.5 * h, sigma + 0.5 * h * k1);
    const double k3 = sigma_rate(d, mu, s + 0.5 * h, sigma + 0.5 * h * k2);
    const double k4 = sigma_rate(d, mu, s + h, sigma + h * k3);
    const double next = sigma + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(next)) throw Error(ErrorKind::IntegrationBlowup, "Pruefer angle became non-finite");
    if (h > 0.0)
      out.crossings += odd_pi_between(next, sigma);
    else
      out.crossings += odd_pi_between(sigma, next);
    sigma = next;
    s += h;
  }
  out.sigma = sigma;
  return out;
}

struct Matched {
  double gap = 0.0;
  int crossings = 0;
};

Matched match(int d, double mu, double S, double step) {
  const double sm = sigma_minus(d, mu);
  const HalfSweep fwd = sweep_to_origin(d, mu, -S, sm, step);
  const HalfSweep bwd = sweep_to_origin(d, mu, S, -sm, step);
  const double gap = fwd.sigma - bwd.sigma;
  // Glue the backward half onto the forward one (shift by the nearest multiple
  // of 2 pi) and count the junction step with its sign, so that a zero of g
  // sitting at s = 0 is counted once.
  const double joined = bwd.sigma + kTwoPi * std::round(gap / kTwoPi);
  const int junction = odd_pi_between(joined, fwd.sigma) - odd_pi_between(fwd.sigma, joined);
  return {gap, fwd.crossings + bwd.crossings + junction};
}

void validate(const LegendreProblem& p) {
  if (p.d < 3) throw Error(ErrorKind::Config, "d must be at least 3");
  if (!(p.mu >= 0.0)) throw Error(ErrorKind::Config, "mu must be nonnegative");
  const double lambda = p.lambda == 0.0 ? 2.0 * p.d : p.lambda;
  if (std::abs(lambda - 2.0 * p.d) > 1e-12) throw Error(ErrorKind::Config, "only lambda = 2d is implemented");
  if (!(p.S >= 30.0)) throw Error(ErrorKind::Config, "S must be at least 30");
  if (!(p.step > 0.0 && p.step <= 1e-3)) throw Error(ErrorKind::Config, "step must lie in (0, 1e-3]");
}

PrueferOutcome outcome(double mu, const Matched& m) {
  PrueferOutcome o;
  o.mu = mu;
  o.sigma_gap = m.gap;
  o.crossings = m.crossings;
  o.admissible = std::abs(std::remainder(m.gap, kTwoPi)) <= kAdmissibleTol;
  return o;
}

MuScan localize(int d, const std::vector<double>& grid, double step, double S, double mu_tol,
                std::vector<PrueferOutcome> rows) {
  MuScan scan;
  scan.rows = std::move(rows);
  for (std::size_t j = 1; j < scan.rows.size(); ++j)
    if (!(scan.rows[j].sigma_gap > scan.rows[j - 1].sigma_gap)) scan.monotone = false;

  std::vector<double> found;
  const auto accept = [&](double mu) {
    for (double f : found)
      if (std::abs(f - mu) <= std::max(10.0 * mu_tol, 1e-7)) return;
    const Matched m = match(d, mu, S, step);
    found.push_back(mu);
    scan.admissible.push_back(mu);
    scan.admissible_gap.push_back(m.gap);
    scan.admissible_crossings.push_back(m.crossings);
  };

  for (std::size_t j = 0; j < scan.rows.size(); ++j) {
    const double g = scan.rows[j].sigma_gap;
    if (std::abs(std::remainder(g, kTwoPi)) <= 1e-6) accept(grid[j]);
    if (j + 1 == scan.rows.size()) continue;
    const double g1 = scan.rows[j + 1].sigma_gap;
    const double lo = std::min(g, g1), hi = std::max(g, g1);
    for (double k = std::ceil(lo / kTwoPi); k * kTwoPi <= hi; k += 1.0) {
      const double target = k * kTwoPi;
      const auto f = [&](double mu) { return match(d, mu, S, step).gap - target; };
      const double fa = g - target, fb = g1 - target;
      if (fa == 0.0 || fb == 0.0 || (fa > 0.0) == (fb > 0.0)) continue;
      std::uintmax_t iters = 200;
      const auto tol = [mu_tol](double a, double b) { return std::abs(b - a) <= mu_tol; };
      const auto r = boost::math::tools::toms748_solve(f, grid[j], grid[j + 1], fa, fb, tol, iters);
      accept(0.5 * (r.first + r.second));
    }
  }
  std::vector<std::size_t> order(scan.admissible.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scan.admissible[a] < scan.admissible[b]; });
  MuScan sorted = scan;
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted.admissible[i] = scan.admissible[order[i]];
    sorted.admissible_gap[i] = scan.admissible_gap[order[i]];
    sorted.admissible_crossings[i] = scan.admissible_crossings[order[i]];
  }
  return sorted;
}

void validate_grid(int d, const std::vector<double>& grid, double step, double S) {
  if (grid.empty()) throw Error(ErrorKind::Config, "empty mu grid");
  for (std::size_t j = 1; j < grid.size(); ++j)
    if (!(grid[j] > grid[j - 1])) throw Error(ErrorKind::Config, "mu grid must be strictly increasing");
  validate({d, grid.front(), 0.0, S, step});
}

}  // namespace

double legendre_residual(int d, double mu, double lambda, const ThetaFunction& f, double theta) {
  if (!(std::abs(theta) < 0.5 * M_PI)) throw Error(ErrorKind::ThetaOutOfRange, "|theta| must be below pi/2");
  const ThetaJet j = f(theta);
  const double c = std::cos(theta);
  return j.d2f - (d - 2) * std::tan(theta) * j.df - mu / (c * c) * j.f + lambda * j.f;
}

double explicit_mu(int d, ExplicitMode mode) {
  switch (mode) {
    case ExplicitMode::Zonal: return 0.0;
    case ExplicitMode::Mixed: return d - 2.0;
    case ExplicitMode::Sectoral: return 2.0 * (d - 1);
  }
  return 0.0;
}

ThetaFunction explicit_solution(int d, ExplicitMode mode) {
  switch (mode) {
    case ExplicitMode::Zonal: {
      const double k = 1.0 + 1.0 / (d - 1);
      return [d, k](double t) {
        const double s = std::sin(t), c = std::cos(t);
        return ThetaJet{s * s - c * c / (d - 1), k * std::sin(2 * t), 2 * k * std::cos(2 * t)};
      };
    }
    case ExplicitMode::Mixed:
      return [](double t) {
        return ThetaJet{0.5 * std::sin(2 * t), std::cos(2 * t), -2 * std::sin(2 * t)};
      };
    case ExplicitMode::Sectoral:
      return [](double t) {
        const double c = std::cos(t);
        return ThetaJet{c * c, -std::sin(2 * t), -2 * std::cos(2 * t)};
      };
  }
  throw Error(ErrorKind::Config, "unknown explicit mode");
}

double theta_of_s(double s) { return 2.0 * std::atan(std::tanh(0.5 * s)); }

double g_of_s(int d, const ThetaFunction& f, double s) {
  return std::pow(std::cosh(s), -0.5 * (d - 3)) * f(theta_of_s(s)).f;
}

double g_potential(int d, double mu, double s) {
  const double c = std::cosh(s);
  return (d + 1.0) * (d + 3.0) / (4.0 * c * c) - offset_sq(d) - mu;
}

double sigma_minus(int d, double mu) { return 2.0 * std::atan(std::sqrt(offset_sq(d) + mu)); }

double sigma_rate(int d, double mu, double s, double sigma) {
  const double c = std::cosh(s);
  return (1.0 + std::cos(sigma)) * (mu + 1.0 + offset_sq(d) - (d + 1.0) * (d + 3.0) / (4.0 * c * c)) - 2.0;
}

PrueferOutcome pruefer_shoot(const LegendreProblem& p) {
  validate(p);
  const Matched base = match(p.d, p.mu, p.S, p.step);
  const Matched wide = match(p.d, p.mu, 1.5 * p.S, p.step);
  const double drift = std::abs(wide.gap - base.gap);
  if (drift > 0.01) {
    std::ostringstream msg;
    msg << "sigma gap moved by " << drift << " rad when S grew from " << p.S << " to " << 1.5 * p.S;
    throw Error(ErrorKind::TruncationTooSmall, msg.str());
  }
  PrueferOutcome o = outcome(p.mu, base);
  o.truncation_drift = drift;
  return o;
}

MuScan admissible_mu_scan(int d, const std::vector<double>& mu_grid, double step, double S, double mu_tol) {
  validate_grid(d, mu_grid, step, S);
  std::vector<PrueferOutcome> rows(mu_grid.size());
  std::exception_ptr failure;
  const int n = static_cast<int>(mu_grid.size());
#pragma omp parallel for schedule(dynamic) num_threads(parallel::max_threads())
  for (int j = 0; j < n; ++j) {
    try {
      rows[static_cast<std::size_t>(j)] = pruefer_shoot({d, mu_grid[static_cast<std::size_t>(j)], 0.0, S, step});
    } catch (...) {
#pragma omp critical(polyrobin_pruefer_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return localize(d, mu_grid, step, S, mu_tol, std::move(rows));
}

MuScan admissible_mu_scan_serial(int d, const std::vector<double>& mu_grid, double step, double S, double mu_tol) {
  validate_grid(d, mu_grid, step, S);
  std::vector<PrueferOutcome> rows;
  rows.reserve(mu_grid.size());
  for (double mu : mu_grid) rows.push_back(pruefer_shoot({d, mu, 0.0, S, step}));
  return localize(d, mu_grid, step, S, mu_tol, std::move(rows));
}

// ---------------------------------------------------------------------------
// Radial ground state on a ball

namespace {

using RadialState = std::array<double, 2>;  // (u, u')

struct RadialOde {
  int d;
  double lambda;
  void operator()(const RadialState& y, RadialState& dy, double r) const {
    dy[0] = y[1];
    dy[1] = -(d - 1) / r * y[1] - lambda * y[0];
  }
};

RadialState taylor_start(int d, double lambda, double r0) {
  return {1.0 - lambda * r0 * r0 / (2.0 * d), -lambda * r0 / d};
}

template <class Observer>
RadialState integrate_radial(int d, double R, double lambda, const std::vector<double>& stops, Observer&& obs) {
  namespace ode = boost::numeric::odeint;
  const double r0 = 1e-6 * R;
  RadialState y = taylor_start(d, lambda, r0);
  auto stepper = ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<RadialState>());
  double r = r0;
  for (double stop : stops) {
    if (stop <= r) continue;
    ode::integrate_adaptive(stepper, RadialOde{d, lambda}, y, r, stop, 1e-3 * R);
    r = stop;
    obs(r, y);
  }
  return y;
}

// Robin residual u'(R) + alpha u(R), with u(0) = 1. Also reports whether u stayed positive.
double robin_residual(int d, double R, double alpha, double lambda, bool* positive) {
  std::vector<double> stops;
  const int checks = 64;
  for (int j = 1; j <= checks; ++j) stops.push_back(R * j / checks);
  bool pos = true;
  const RadialState y = integrate_radial(d, R, lambda, stops, [&](double, const RadialState& s) {
    if (!(s[0] > 0.0)) pos = false;
  });
  if (positive) *positive = pos;
  return y[1] + alpha * y[0];
}

}  // namespace

RadialGroundState ball_ground_state(int d, double R, double alpha, int samples) {
  if (d < 2) throw Error(ErrorKind::Config, "d must be at least 2");
  if (!(R > 0.0) || !(alpha > 0.0)) throw Error(ErrorKind::Config, "R and alpha must be positive");
  if (samples < 2) throw Error(ErrorKind::Config, "need at least two samples");

  // F(0) = alpha > 0; walk sqrt(lambda) upward until F changes sign.
  const auto F = [&](double lambda) { return robin_residual(d, R, alpha, lambda, nullptr); };
  double lo = 0.0, flo = alpha, hi = 0.0, fhi = alpha;
  const double dk = 0.02 / R;
  bool bracketed = false;
  for (int k = 1; k <= 5000; ++k) {
    hi = (k * dk) * (k * dk);
    fhi = F(hi);
    if (!std::isfinite(fhi)) throw Error(ErrorKind::IntegrationBlowup, "radial integration failed");
    if ((fhi > 0.0) != (flo > 0.0) || fhi == 0.0) {
      bracketed = true;
      break;
    }
    lo = hi;
    flo = fhi;
  }
  if (!bracketed) throw Error(ErrorKind::RootNotBracketed, "no sign change of u'(R) + alpha u(R)");

  double lambda = hi;
  if (fhi != 0.0) {
    std::uintmax_t iters = 200;
    const auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-14 * std::max(1.0, std::abs(b)); };
    const auto r = boost::math::tools::toms748_solve(F, lo, hi, flo, fhi, tol, iters);
    lambda = 0.5 * (r.first + r.second);
  }
  bool positive = false;
  robin_residual(d, R, alpha, lambda, &positive);
  if (!positive) throw Error(ErrorKind::NonpositiveSolution, "shooting root has a sign change in (0, R)");

  RadialGroundState out;
  out.d = d;
  out.R = R;
  out.alpha = alpha;
  out.lambda = lambda;
  out.samples.push_back({0.0, 1.0, 0.0, -lambda / d});
  std::vector<double> stops;
  for (int j = 1; j <= samples; ++j) stops.push_back(R * j / samples);
  integrate_radial(d, R, lambda, stops, [&](double r, const RadialState& y) {
    if (!(y[0] > 0.0)) throw Error(ErrorKind::NonpositiveSolution, "u vanishes inside the ball");
    const double v = y[1] / y[0];
    const double upp = -(d - 1) / r * y[1] - lambda * y[0];
    out.samples.push_back({r, y[0], v, upp / y[0] - v * v});
  });
  out.max_v = -std::numeric_limits<double>::infinity();
  out.max_w = -std::numeric_limits<double>::infinity();
  for (const auto& s : out.samples) {
    if (s.r > 0.0) out.max_v = std::max(out.max_v, s.v);
    out.max_w = std::max(out.max_w, s.w);
  }
  out.log_concave = out.max_v <= 1e-8 && out.max_w <= 1e-8;
  return out;
}

}  // namespace polyrobin
