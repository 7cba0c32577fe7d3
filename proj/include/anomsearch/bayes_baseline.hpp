#pragma once

// Bayesian quickest search over an unbounded population of streams with a
// switching cost per stream change. Thresholds come from an approximate
// observation-plus-switching cost: delta_U has a closed form and delta_L
// minimises a strongly convex scalar function.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "anomsearch/core_model.hpp"

namespace anomsearch {

// F = N(mean, sd^2) pair with F1 the target law and F0 the nominal law.
struct GaussianPair {
  double mean0 = 0.0, sd0 = 1.0;
  double mean1 = 0.0, sd1 = 1.0;

  static double log_density(double x, double m, double s) {
    const double z = (x - m) / s;
    return -0.5 * z * z - std::log(s) - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  double llr(double x) const { return log_density(x, mean1, sd1) - log_density(x, mean0, sd0); }

  // D(Na || Nb)
  static double kl(double ma, double sa, double mb, double sb) {
    return std::log(sb / sa) + (sa * sa + (ma - mb) * (ma - mb)) / (2.0 * sb * sb) - 0.5;
  }
  double d10() const { return kl(mean1, sd1, mean0, sd0); }  // D(f1 || f0)
  double d01() const { return kl(mean0, sd0, mean1, sd1); }  // D(f0 || f1)
};

// Target N(0,1) against nominal N(0, 1.5). By default 1.5 is the variance;
// `spread_is_sd` reads it as the standard deviation instead.
inline GaussianPair companion_pair(bool spread_is_sd = false) {
  GaussianPair g;
  g.sd0 = spread_is_sd ? 1.5 : std::sqrt(1.5);
  return g;
}

struct BayesConfig {
  double pi_hat = 0.1;
  double eps = 0.01;
  double lambda_bar = 0.0;
  double D10 = companion_pair().d10();
  double D01 = companion_pair().d01();

  void validate() const {
    if (!(pi_hat > 0.0 && pi_hat < 1.0)) throw domain_error("BayesConfig: pi_hat must lie in (0, 1)");
    if (!(eps > 0.0 && eps < 1.0)) throw domain_error("BayesConfig: eps must lie in (0, 1)");
    if (!(eps < 1.0 - pi_hat)) throw domain_error("BayesConfig: eps must be below 1 - pi_hat");
    if (lambda_bar < 0.0) throw domain_error("BayesConfig: lambda_bar must be nonnegative");
    if (!(D10 > 0.0 && D01 > 0.0)) throw domain_error("BayesConfig: KL divergences must be positive");
  }
};

struct Thresholds {
  double delta_L = 1.0;
  double delta_U = 1.0;
  double gamma_L = 0.0;
  double gamma_U = 0.0;

  static Thresholds from_deltas(double dl, double du) {
    if (!(dl > 0.0 && dl <= 1.0) || !(du >= 1.0)) throw domain_error("Thresholds: need 0 < delta_L <= 1 <= delta_U");
    return {dl, du, std::log(dl), std::log(du)};
  }
  static Thresholds from_gammas(double gl, double gu) {
    if (!(gl <= 0.0) || !(gu >= 0.0)) throw domain_error("Thresholds: need gamma_L <= 0 <= gamma_U");
    return {std::exp(gl), std::exp(gu), gl, gu};
  }
};

namespace detail {

// log(x) / (1 - x), continuous at x = 1 where it tends to -1.
inline double log_over_one_minus(double x) {
  const double u = 1.0 - x;
  if (std::abs(u) < 1e-9) return -1.0 - 0.5 * u;
  return std::log1p(x - 1.0) / u;
}

inline void check_cost_domain(double dl, double du) {
  if (!(dl > 0.0 && dl < 1.0)) throw domain_error("cost_C: delta_L must lie in (0, 1)");
  if (!(du > 1.0)) throw domain_error("cost_C: delta_U must exceed 1");
}

}  // namespace detail

// Approximate expected observations plus switching cost as a function of the
// exponentiated thresholds.
inline double cost_C(double dl, double du, const BayesConfig& cfg) {
  detail::check_cost_domain(dl, du);
  const double pi = cfg.pi_hat;
  const double denom = 1.0 + pi * (du - 1.0);
  const double r = detail::log_over_one_minus(dl);  // log(dl) / (1 - dl)
  const double log_du = std::log(du);
  const double nominal = (1.0 - pi) / (-cfg.D01) * (log_du + (du - 1.0) * r) / denom;
  const double target = pi / cfg.D10 * (du * log_du + dl * (du - 1.0) * r) / denom;
  const double switching = cfg.lambda_bar * ((du - dl) / (1.0 - dl)) / denom;
  return nominal + target + switching;
}

// d cost_C / d delta_L.
inline double cost_C_ddl(double dl, double du, const BayesConfig& cfg) {
  detail::check_cost_domain(dl, du);
  const double pi = cfg.pi_hat;
  const double scale = (du - 1.0) / (1.0 + pi * (du - 1.0));
  const double u = 1.0 - dl;
  const double lg = std::log(dl);
  const double dr = (u / dl + lg) / (u * u);            // d/dx [log x / (1 - x)]
  const double dq = (lg + 1.0) / u + dl * lg / (u * u);  // d/dx [x log x / (1 - x)]
  return scale * (-(1.0 - pi) / cfg.D01 * dr + pi / cfg.D10 * dq + cfg.lambda_bar / (u * u));
}

// Lower bound on the second derivative of cost_C in delta_L on (0, 1].
inline double strong_convexity_modulus(double du, const BayesConfig& cfg) {
  const double pi = cfg.pi_hat;
  return (du - 1.0) / (1.0 + pi * (du - 1.0)) *
         (2.0 / 3.0 * (1.0 - pi) / cfg.D01 + 1.0 / 3.0 * pi / cfg.D10 + cfg.lambda_bar);
}

inline double delta_u_star(double pi_hat, double eps) {
  if (!(pi_hat > 0.0 && pi_hat < 1.0)) throw domain_error("delta_u_star: pi_hat must lie in (0, 1)");
  if (!(eps > 0.0 && eps < 1.0)) throw domain_error("delta_u_star: eps must lie in (0, 1)");
  return (1.0 - pi_hat) / pi_hat * ((1.0 - eps) / eps);
}

// Upper bound on the probability that the declared stream is nominal.
inline double error_probability_bound(double pi_hat, double delta_U) {
  return (1.0 - pi_hat) / (1.0 + pi_hat * (delta_U - 1.0));
}

class bayes_convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Minimiser of cost_C(., delta_U) on (0, 1]: golden-section search narrows
// the interval until cost differences sink into rounding, then a safeguarded
// Newton iteration finds the zero of the analytic derivative. lambda_bar == 0
// puts the minimiser on the boundary delta_L = 1.
inline double delta_l_star(const BayesConfig& cfg, double delta_U, double tol = 1e-10) {
  cfg.validate();
  if (!(delta_U > 1.0)) throw domain_error("delta_l_star: delta_U must exceed 1");
  if (cfg.lambda_bar == 0.0) return 1.0;
  auto f = [&](double x) { return cost_C(x, delta_U, cfg); };
  auto g = [&](double x) { return cost_C_ddl(x, delta_U, cfg); };
  const double floor = std::numeric_limits<double>::min() * 1e6;
  const double ceil = 1.0 - 1e-15;

  constexpr double inv_phi = 0.6180339887498949;
  double a = floor, b = ceil;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; b - a > 1e-6; ++it) {
    if (it > 400) throw bayes_convergence_error("delta_l_star: golden-section search did not converge");
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }

  // Widen until the derivative changes sign across [lo, hi].
  double lo = a, hi = b;
  for (double w = b - a; g(lo) > 0.0 && lo > floor; w *= 2.0) lo = std::max(floor, lo - w);
  for (double w = b - a; g(hi) < 0.0 && hi < ceil; w *= 2.0) hi = std::min(ceil, hi + w);
  if (g(hi) <= 0.0) return hi;
  if (g(lo) >= 0.0) return lo;

  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double gx = g(x);
    if (gx == 0.0) return x;
    if (gx > 0.0) hi = x; else lo = x;
    if (hi - lo <= std::min(tol, 4.0 * std::numeric_limits<double>::epsilon() * hi)) break;
    const double h = std::max(1e-9, 1e-7 * x);
    const double curv = (g(std::min(x + h, ceil)) - g(std::max(x - h, floor))) / (std::min(x + h, ceil) - std::max(x - h, floor));
    double next = curv > 0.0 ? x - gx / curv : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
  }
  if (!(hi - lo <= tol) && std::abs(g(x)) > 1e-9 * strong_convexity_modulus(delta_U, cfg))
    throw bayes_convergence_error("delta_l_star: derivative root not resolved");
  return x;
}

inline double delta_l_star(const BayesConfig& cfg) { return delta_l_star(cfg, delta_u_star(cfg.pi_hat, cfg.eps)); }

inline Thresholds optimal_thresholds(const BayesConfig& cfg) {
  cfg.validate();
  const double du = delta_u_star(cfg.pi_hat, cfg.eps);
  return Thresholds::from_deltas(delta_l_star(cfg, du), du);
}

struct WaldRates {
  double alpha = 0.0;
  double beta = 0.0;
};

// Stage error rates implied by treating the threshold inequalities as equalities.
inline WaldRates wald_maps(const Thresholds& t) {
  const double dl = t.delta_L, du = t.delta_U;
  if (!(dl > 0.0 && dl < 1.0) || !(du > 1.0)) throw domain_error("wald_maps: need 0 < delta_L < 1 < delta_U");
  return {(1.0 - dl) / (du - dl), dl * (du - 1.0) / (du - dl)};
}

// Expected number of streams visited for stage error rates (alpha, beta).
inline double expected_streams_visited(double pi_hat, double alpha, double beta) {
  return 1.0 / ((1.0 - pi_hat) * alpha + pi_hat * (1.0 - beta));
}

// Stream population: each new stream is a target with probability pi_hat and
// each switch costs a Gamma(shape, 1) draw (zero when shape == 0).
template <class Rng = std::mt19937_64>
class StreamEnvironment {
 public:
  StreamEnvironment(GaussianPair pair, double pi_hat, double gamma_shape, Rng& rng)
      : pair_(pair), pi_hat_(pi_hat), shape_(gamma_shape), rng_(&rng) {
    if (!(pi_hat >= 0.0 && pi_hat <= 1.0)) throw domain_error("StreamEnvironment: pi_hat must lie in [0, 1]");
    if (gamma_shape < 0.0) throw domain_error("StreamEnvironment: gamma shape must be nonnegative");
  }

  bool next_stream() {
    std::bernoulli_distribution coin(pi_hat_);
    return coin(*rng_);
  }
  double switch_cost() {
    if (shape_ == 0.0) return 0.0;
    std::gamma_distribution<double> g(shape_, 1.0);
    return g(*rng_);
  }
  double observe(bool target) {
    std::normal_distribution<double> d(target ? pair_.mean1 : pair_.mean0, target ? pair_.sd1 : pair_.sd0);
    return d(*rng_);
  }
  double llr(double x) const { return pair_.llr(x); }

 private:
  GaussianPair pair_;
  double pi_hat_;
  double shape_;
  Rng* rng_;
};

struct BayesSearchResult {
  std::int64_t tau = 0;            // observations
  std::int64_t streams_visited = 0;  // k_tau
  double switch_cost = 0.0;        // s
  bool declared_is_target = false;
  bool capped = false;
};

// Per stream: accumulate log f1/f0 from zero, move to a fresh stream (paying a
// switch cost) when it falls below gamma_L, declare once it reaches gamma_U.
template <class Env>
BayesSearchResult run_bayes_search(Env& env, const Thresholds& th, std::int64_t sample_cap = 10'000'000) {
  if (!(th.gamma_L <= 0.0 && th.gamma_U >= 0.0)) throw domain_error("run_bayes_search: need gamma_L <= 0 <= gamma_U");
  BayesSearchResult r;
  r.streams_visited = 1;
  bool target = env.next_stream();
  double stat = 0.0;
  while (stat < th.gamma_U) {
    if (stat >= th.gamma_L) {
      stat += env.llr(env.observe(target));
      ++r.tau;
      if (stat < th.gamma_U && r.tau >= sample_cap) {
        r.capped = true;
        break;
      }
    } else {
      ++r.streams_visited;
      r.switch_cost += env.switch_cost();
      target = env.next_stream();
      stat = 0.0;
    }
  }
  r.declared_is_target = target;
  return r;
}

}  // namespace anomsearch
