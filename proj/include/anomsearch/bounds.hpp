#pragma once

// Regret and false-alarm bounds for the block-sampling search, plus Monte
// Carlo error rates of a single SPRT stage with thresholds 0 and b.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "anomsearch/core_model.hpp"
#include "anomsearch/parallel.hpp"
#include "anomsearch/stats.hpp"

namespace anomsearch {

// Explicit finite-T pseudo-regret bound for the block-sampling bandit with
// switching cost lambda and loss gap Delta. Concave and increasing in T.
inline double regret_bound_explicit(double T, double lambda, int K, double Delta) {
  if (!(Delta > 0.0)) throw domain_error("regret_bound_explicit: Delta must be positive");
  if (!(T >= 1.0)) throw domain_error("regret_bound_explicit: T must be >= 1");
  const double km1_over_gap = (K - 1) / Delta;
  const double t13 = std::cbrt(T);
  const double first = (66.0 * std::pow(lambda * K, 2.0 / 3.0) * t13 + 32.0 * std::log(T)) * km1_over_gap;
  const double second =
      (160.0 * std::pow(lambda, 2.0 / 3.0) * t13 * std::pow(K, 1.0 / 6.0) + 160.0 * lambda + 49.0 * lambda * lambda + 32.0) *
      km1_over_gap;
  const double third = 544.0 * lambda / std::sqrt(static_cast<double>(K)) + lambda + 66.0;
  return first + second + third;
}

// Default absolute constant for the false-alarm bound: the leading explicit
// regret constants, with 66 inflated by the (3/2)^(1/3) factor picked up when
// psi(m) ~ (3 lambda / 2) (2/3) m^(3/2) / sqrt(K) is substituted into T^(1/3).
inline double default_c_const() { return 66.0 * std::max(1.0, std::cbrt(1.5)) + 32.0; }

struct BoundParams {
  int K = 2;
  double lambda = 0.0;
  double Delta = 0.1;
  double b = 1.0;
  double C_const = default_c_const();
  double series_tol = 1e-12;
  std::int64_t n_max = 100'000;

  void validate() const {
    if (K < 2) throw domain_error("BoundParams: K must be >= 2");
    if (lambda < 0.0) throw domain_error("BoundParams: lambda must be nonnegative");
    if (!(Delta > 0.0)) throw domain_error("BoundParams: Delta must be positive");
    if (!(C_const > 0.0)) throw domain_error("BoundParams: C_const must be positive");
    if (!(series_tol > 0.0 && series_tol < 1.0)) throw domain_error("BoundParams: series_tol must be in (0, 1)");
    if (n_max < 1) throw domain_error("BoundParams: n_max must be >= 1");
  }
};

class phi_solver_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Right-hand side of the phi functional equation, in extended precision.
inline long double phi_rhs(long double x, std::int64_t n, const BoundParams& p) {
  const long double A = static_cast<long double>(p.C_const) * (p.K - 1) /
                        (static_cast<long double>(p.Delta) * p.Delta);
  const long double s = x + static_cast<long double>(n);
  return A * (static_cast<long double>(p.lambda) * std::sqrt(static_cast<long double>(p.K) * s) + std::log(s));
}

}  // namespace detail

// x - C (K-1) / Delta^2 (lambda sqrt(K (x + n)) + log(x + n)) evaluated at x.
inline double phi_residual(double x, std::int64_t n, const BoundParams& p) {
  return static_cast<double>(static_cast<long double>(x) - detail::phi_rhs(x, n, p));
}

// Largest root of h(x) = x - g(x), g the concave right-hand side. h is convex
// with h(0) <= 0, so {h <= 0} is an interval [0, x*] and x* is found by Newton
// from the right, safeguarded by bisection, down to adjacent doubles.
inline double solve_phi(std::int64_t n, const BoundParams& p) {
  if (n < 1) throw domain_error("solve_phi: n must be >= 1");
  p.validate();
  using ld = long double;
  const ld A = static_cast<ld>(p.C_const) * (p.K - 1) / (static_cast<ld>(p.Delta) * p.Delta);
  auto h = [&](ld x) { return x - detail::phi_rhs(x, n, p); };
  auto dh = [&](ld x) {
    const ld s = x + static_cast<ld>(n);
    return 1.0L - A * (static_cast<ld>(p.lambda) * std::sqrt(static_cast<ld>(p.K)) / (2.0L * std::sqrt(s)) + 1.0L / s);
  };

  ld lo = 0.0L;
  if (h(lo) > 0.0L) throw phi_solver_error("solve_phi: h(0) > 0");
  ld hi = std::max<ld>(1.0L, 2.0L * detail::phi_rhs(0.0L, n, p));
  int expansions = 0;
  while (h(hi) <= 0.0L) {
    lo = hi;
    hi *= 2.0L;
    if (++expansions > 2000 || !std::isfinite(static_cast<double>(hi)))
      throw phi_solver_error("solve_phi: no root within bracket cap");
  }

  ld x = hi;
  for (int it = 0; it < 500; ++it) {
    const ld hx = h(x);
    if (hx > 0.0L) hi = x; else lo = x;
    if (hi - lo <= std::numeric_limits<ld>::epsilon() * 4.0L * hi) break;
    const ld slope = dh(x);
    ld next = slope > 0.0L ? x - hx / slope : 0.5L * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5L * (lo + hi);
    if (next == x) break;
    x = next;
  }
  // Pick whichever neighbouring double has the smaller residual.
  double best = static_cast<double>(hi);
  double best_res = std::abs(phi_residual(best, n, p));
  for (double cand : {static_cast<double>(lo), static_cast<double>(x), std::nextafter(best, 0.0)}) {
    if (cand < 0.0) continue;
    const double r = std::abs(phi_residual(cand, n, p));
    if (r < best_res) {
      best = cand;
      best_res = r;
    }
  }
  return best;
}

struct FalseAlarmBound {
  double value = 1.0;
  double C_const = 0.0;
  std::int64_t terms = 0;
  // (1 - beta) times the geometric bound on the neglected tail; already
  // included in value.
  double truncation_error = 0.0;
};

// 1 - (1 - beta) sum_{n>=1} beta^(n-1) (1 - alpha)^min((K-1) n, phi(n)).
//
// Successive terms shrink by at least a factor beta because the exponent is
// nondecreasing in n, so the tail after term N is at most t_N beta / (1 - beta);
// the sum stops once that bound drops below series_tol or at n_max.
inline FalseAlarmBound false_alarm_bound(double alpha, double beta, const BoundParams& p) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("false_alarm_bound: alpha must lie in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0)) throw domain_error("false_alarm_bound: beta must lie in (0, 1)");
  p.validate();
  const double log_keep = std::log1p(-alpha);
  const double log_beta = std::log(beta);
  long double sum = 0.0L;
  double tail = 0.0;
  std::int64_t n = 1;
  for (; n <= p.n_max; ++n) {
    const double exponent = std::min(static_cast<double>(p.K - 1) * static_cast<double>(n), solve_phi(n, p));
    const double term = std::exp(static_cast<double>(n - 1) * log_beta + exponent * log_keep);
    sum += term;
    tail = term * beta / (1.0 - beta);
    if (tail < p.series_tol) break;
  }
  FalseAlarmBound out;
  out.C_const = p.C_const;
  out.terms = std::min(n, p.n_max);
  out.truncation_error = (1.0 - beta) * tail;
  const double v = static_cast<double>(1.0L - static_cast<long double>(1.0 - beta) * sum) + out.truncation_error;
  out.value = std::clamp(v, 0.0, 1.0);
  return out;
}

struct SprtErrorRates {
  double alpha = 0.0;  // declared anomalous under F0
  double beta = 0.0;   // declared nominal under F1
  double alpha_se = 0.0;
  double beta_se = 0.0;
  Interval alpha_ci;
  Interval beta_ci;
  std::int64_t trials = 0;
};

// One SPRT stage from Y = 0 for N(-mu,1) vs N(mu,1): absorbed above b
// (anomalous) or below 0 (nominal).
template <class Rng>
bool sprt_declares_anomalous(double b, double mean, double mu, Rng& rng) {
  std::normal_distribution<double> dist(mean, 1.0);
  double Y = 0.0;
  for (;;) {
    Y += llr(dist(rng), mu);
    if (Y > b) return true;
    if (Y < 0.0) return false;
  }
}

inline SprtErrorRates sprt_error_rates(double b, double mu, std::int64_t trials, std::uint64_t seed,
                                       unsigned threads = 1) {
  if (!(b > 0.0)) throw domain_error("sprt_error_rates: b must be positive");
  if (!(mu > 0.0)) throw domain_error("sprt_error_rates: mu must be positive");
  if (trials < 1) throw domain_error("sprt_error_rates: trials must be >= 1");
  std::vector<unsigned char> under_null(static_cast<std::size_t>(trials)), under_alt(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
    std::mt19937_64 rng0(derive_seed(seed, 0, 0, static_cast<std::uint32_t>(t)));
    under_null[t] = sprt_declares_anomalous(b, -mu, mu, rng0);
    std::mt19937_64 rng1(derive_seed(seed, 1, 0, static_cast<std::uint32_t>(t)));
    under_alt[t] = !sprt_declares_anomalous(b, mu, mu, rng1);
  });
  std::int64_t fp = 0, fn = 0;
  for (std::size_t t = 0; t < under_null.size(); ++t) {
    fp += under_null[t];
    fn += under_alt[t];
  }
  SprtErrorRates r;
  r.trials = trials;
  r.alpha = static_cast<double>(fp) / static_cast<double>(trials);
  r.beta = static_cast<double>(fn) / static_cast<double>(trials);
  r.alpha_se = binomial_se(r.alpha, trials);
  r.beta_se = binomial_se(r.beta, trials);
  r.alpha_ci = wilson_interval(fp, trials);
  r.beta_ci = wilson_interval(fn, trials);
  return r;
}

}  // namespace anomsearch
