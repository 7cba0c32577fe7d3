#pragma once

// Block schedule and 1/2-Tsallis mirror-descent step of the block-sampling
// bandit policy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "anomsearch/core_model.hpp"

namespace anomsearch {

struct BlockSchedule {
  std::int64_t n = 1;
  double a = 0.0;        // a_n = (3 lambda / 2) sqrt(n / K)
  std::int64_t B = 1;    // block length max(ceil(a_n), 1)
  double eta = 0.0;      // learning rate (2 / (a_n + 1)) sqrt(2 / n)
};

inline BlockSchedule block_schedule(std::int64_t n, double lambda, int K) {
  if (n < 1 || K < 1 || lambda < 0.0) throw domain_error("block_schedule: need n >= 1, K >= 1, lambda >= 0");
  BlockSchedule s;
  s.n = n;
  s.a = 1.5 * lambda * std::sqrt(static_cast<double>(n) / K);
  s.B = std::max<std::int64_t>(static_cast<std::int64_t>(std::ceil(s.a)), 1);
  s.eta = 2.0 / (s.a + 1.0) * std::sqrt(2.0 / static_cast<double>(n));
  return s;
}

// Sum of the first m block lengths.
inline std::int64_t psi(std::int64_t m, double lambda, int K) {
  if (m < 1) throw domain_error("psi: m must be >= 1");
  std::int64_t total = 0;
  for (std::int64_t j = 1; j <= m; ++j) total += block_schedule(j, lambda, K).B;
  return total;
}

// Importance-weighted cumulative losses, one entry per channel (0-based storage).
struct CumLossVector {
  std::vector<double> values;

  CumLossVector() = default;
  explicit CumLossVector(int K) : values(static_cast<std::size_t>(K), 0.0) {}
  explicit CumLossVector(std::vector<double> v) : values(std::move(v)) {}

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int channel) const { return values.at(static_cast<std::size_t>(channel - 1)); }
};

// Adds block_loss / p_i to the entry of the 1-based channel i.
inline void update_cumloss_inplace(CumLossVector& C, int channel, double block_loss, double p_i) {
  if (!(p_i > 0.0)) throw domain_error("update_cumloss: p_i must be positive");
  if (block_loss < 0.0) throw domain_error("update_cumloss: block loss must be nonnegative");
  if (channel < 1 || channel > C.size()) throw domain_error("update_cumloss: channel out of range");
  C.values[static_cast<std::size_t>(channel - 1)] += block_loss / p_i;
}

inline CumLossVector update_cumloss(CumLossVector C, int channel, double block_loss, double p_i) {
  update_cumloss_inplace(C, channel, block_loss, p_i);
  return C;
}

// <p, C> - sum_i (2 sqrt(p_i) - 2 p_i) / eta
inline double omd_objective(const std::vector<double>& p, const std::vector<double>& C, double eta) {
  double lin = 0.0, reg = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    lin += p[i] * C[i];
    reg += 2.0 * std::sqrt(std::max(p[i], 0.0)) - 2.0 * p[i];
  }
  return lin - reg / eta;
}

class omd_convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OmdSolverOptions {
  double tolerance = 1e-12;
  int max_iterations = 200;
};

// Minimiser of omd_objective over the probability simplex.
//
// Stationarity gives p_i = (eta (C_i + nu) + 2)^-2 for a scalar multiplier nu,
// so the problem reduces to the root of g(nu) = sum_i p_i(nu) - 1. g is
// decreasing and convex on the admissible half-line; Newton steps are taken
// from the left end of the bracket and replaced by bisection whenever they
// leave it. C is shifted by its minimum first so (eta C)^2 stays bounded.
inline std::vector<double> omd_weights(const std::vector<double>& C, double eta, OmdSolverOptions opt = {}) {
  if (C.empty()) throw domain_error("omd_weights: empty loss vector");
  if (!(eta > 0.0)) throw domain_error("omd_weights: eta must be positive");
  const std::size_t K = C.size();
  const double cmin = *std::min_element(C.begin(), C.end());
  std::vector<double> shifted(K);
  for (std::size_t i = 0; i < K; ++i) {
    if (!std::isfinite(C[i])) throw domain_error("omd_weights: non-finite loss");
    shifted[i] = C[i] - cmin;
  }

  auto eval = [&](double nu, double& g, double& dg) {
    g = -1.0;
    dg = 0.0;
    for (double c : shifted) {
      const double z = eta * (c + nu) + 2.0;
      const double inv = 1.0 / z;
      const double p = inv * inv;
      g += p;
      dg -= 2.0 * eta * p * inv;
    }
  };

  double lo = -1.0 / eta;
  double hi = (std::sqrt(static_cast<double>(K)) - 2.0) / eta;
  double nu = lo;
  double g = 0.0, dg = 0.0;
  bool converged = false;
  for (int it = 0; it < opt.max_iterations; ++it) {
    eval(nu, g, dg);
    if (std::abs(g) < opt.tolerance) {
      converged = true;
      break;
    }
    if (g > 0.0) lo = nu; else hi = nu;
    double next = nu - g / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == nu) {
      converged = true;
      break;
    }
    nu = next;
  }
  if (!converged) throw omd_convergence_error("omd_weights: no convergence within iteration cap");

  std::vector<double> p(K);
  double total = 0.0;
  for (std::size_t i = 0; i < K; ++i) {
    const double z = eta * (shifted[i] + nu) + 2.0;
    p[i] = 1.0 / (z * z);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

inline std::vector<double> omd_weights(const CumLossVector& C, double eta, OmdSolverOptions opt = {}) {
  return omd_weights(C.values, eta, opt);
}

}  // namespace anomsearch
