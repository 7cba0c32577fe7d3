#pragma once

// Search policies over K channels: the Tsallis block-sampling search
// (`run_proposed`), cyclic Round-Robin CUSUM (`run_round_robin`) and the
// fixed-horizon bandit mode used for regret measurements.
//
// Policies are templates over an observation source `Env` providing
//   double observe(int channel);          // one sample from a 1-based channel
//   double llr(double x) const;           // log f1(x) / f0(x)
//   int draw_channel(const std::vector<double>& p);   // 1-based draw from p
//   const ChannelModel& model() const;
// GaussianEnvironment is the production source; tests substitute scripted ones.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "anomsearch/core_model.hpp"
#include "anomsearch/tsallis_omd.hpp"

namespace anomsearch {

inline constexpr std::int64_t kDefaultSampleCap = 10'000'000;

struct RunOptions {
  std::int64_t sample_cap = kDefaultSampleCap;
  // When set, every observation is appended here.
  std::vector<Observation>* trace = nullptr;
};

struct SearchResult {
  int declared = 0;
  std::int64_t tau = 0;
  std::int64_t switches = 0;
  std::int64_t tau_tilde = 0;       // tau + switches (unit switch delay)
  double tau_tilde_lambda = 0.0;    // tau + lambda * switches
  bool correct = false;
  std::int64_t blocks = 0;          // blocks executed (Round-Robin: CUSUM restarts + 1)
  bool capped = false;
};

inline double cusum_step(double Y, double increment) { return std::max(Y, 0.0) + increment; }

namespace detail {

inline SearchResult finish(int declared, std::int64_t tau, std::int64_t switches, std::int64_t blocks,
                           double lambda, bool capped, const ChannelModel& model) {
  SearchResult r;
  r.declared = declared;
  r.tau = tau;
  r.switches = switches;
  r.tau_tilde = tau + switches;
  r.tau_tilde_lambda = static_cast<double>(tau) + lambda * static_cast<double>(switches);
  r.correct = declared == model.anomalous_index;
  r.blocks = blocks;
  r.capped = capped;
  return r;
}

inline void record(const RunOptions& opt, double x, int channel, std::int64_t t) {
  if (opt.trace) opt.trace->push_back(Observation{x, channel, t});
}

}  // namespace detail

// Block-sampling Tsallis search with a finite CUSUM threshold b.
//
// Each block draws one channel from the OMD weights and runs a CUSUM phase on
// it until Y > b (declare) or Y < 0. The phase always executes at least once,
// so a negative statistic carried from the previous block is clamped to zero
// by the first update. Filler samples bring the block up to B_n; only the
// first B_n samples of a block contribute to its importance-weighted loss.
template <class Env, class Loss = GaussianTailLoss>
SearchResult run_proposed(Env& env, double b, double lambda, const RunOptions& opt = {}, Loss loss_fn = {}) {
  if (!(b > 0.0)) throw domain_error("run_proposed: b must be positive");
  if (lambda < 0.0) throw domain_error("run_proposed: lambda must be nonnegative");
  const ChannelModel& model = env.model();
  const int K = model.K;

  CumLossVector C(K);
  double Y = 0.0;
  std::int64_t tau = 0, switches = 0, n = 1;
  int previous = 0;

  for (;; ++n) {
    const BlockSchedule sched = block_schedule(n, lambda, K);
    const std::vector<double> p = omd_weights(C, sched.eta);
    const int i = env.draw_channel(p);
    if (previous != 0 && i != previous) ++switches;
    previous = i;

    std::int64_t s = 0;
    double block_loss = 0.0;
    do {
      const double x = env.observe(i);
      ++s;
      ++tau;
      detail::record(opt, x, i, tau);
      if (s <= sched.B) block_loss += loss_fn(x);
      Y = cusum_step(Y, env.llr(x));
      if (Y > b) return detail::finish(i, tau, switches, n, lambda, false, model);
      if (tau >= opt.sample_cap) return detail::finish(i, tau, switches, n, lambda, true, model);
    } while (Y >= 0.0);

    while (s < sched.B) {
      const double x = env.observe(i);
      ++s;
      ++tau;
      detail::record(opt, x, i, tau);
      block_loss += loss_fn(x);
      if (tau >= opt.sample_cap) return detail::finish(i, tau, switches, n, lambda, true, model);
    }
    update_cumloss_inplace(C, i, block_loss, p[static_cast<std::size_t>(i - 1)]);
  }
}

// Cyclic CUSUM search starting at channel 1: moves to the next channel
// whenever the statistic drops below zero. `lambda` only affects the
// tau_tilde_lambda accounting.
template <class Env>
SearchResult run_round_robin(Env& env, double b, const RunOptions& opt = {}, double lambda = 1.0) {
  if (!(b > 0.0)) throw domain_error("run_round_robin: b must be positive");
  const ChannelModel& model = env.model();
  const int K = model.K;
  double Y = 0.0;
  int i = 1;
  std::int64_t tau = 0, switches = 0, restarts = 0;
  while (Y <= b) {
    if (Y < 0.0) {
      ++restarts;
      if (K > 1) {
        i = i < K ? i + 1 : 1;
        ++switches;
      }
    }
    const double x = env.observe(i);
    ++tau;
    detail::record(opt, x, i, tau);
    Y = cusum_step(Y, env.llr(x));
    if (Y <= b && tau >= opt.sample_cap) return detail::finish(i, tau, switches, restarts + 1, lambda, true, model);
  }
  return detail::finish(i, tau, switches, restarts + 1, lambda, false, model);
}

struct BanditResult {
  double pseudo_regret = 0.0;    // sum over samples of (mean loss of arm - best mean) + lambda * switches
  double realized_regret = 0.0;  // realised losses - samples * best mean + lambda * switches
  std::int64_t switches = 0;
  std::int64_t samples = 0;
  std::int64_t blocks = 0;
};

// Fixed-horizon bandit play (threshold disabled): T blocks of exactly B_n
// samples each. `arm_mean_loss` holds E[loss] per channel, 0-based.
template <class Env, class Loss = GaussianTailLoss>
BanditResult run_bandit_mode(Env& env, std::int64_t T, double lambda, const std::vector<double>& arm_mean_loss,
                             Loss loss_fn = {}) {
  if (T < 1) throw domain_error("run_bandit_mode: T must be >= 1");
  const int K = env.model().K;
  if (static_cast<int>(arm_mean_loss.size()) != K) throw domain_error("run_bandit_mode: need one mean loss per arm");
  const double best = *std::min_element(arm_mean_loss.begin(), arm_mean_loss.end());

  CumLossVector C(K);
  BanditResult r;
  double realized = 0.0, gap_sum = 0.0;
  int previous = 0;
  for (std::int64_t n = 1; n <= T; ++n) {
    const BlockSchedule sched = block_schedule(n, lambda, K);
    const std::vector<double> p = omd_weights(C, sched.eta);
    const int i = env.draw_channel(p);
    if (previous != 0 && i != previous) ++r.switches;
    previous = i;
    double block_loss = 0.0;
    for (std::int64_t s = 0; s < sched.B; ++s) block_loss += loss_fn(env.observe(i));
    realized += block_loss;
    gap_sum += static_cast<double>(sched.B) * (arm_mean_loss[static_cast<std::size_t>(i - 1)] - best);
    r.samples += sched.B;
    update_cumloss_inplace(C, i, block_loss, p[static_cast<std::size_t>(i - 1)]);
  }
  r.blocks = T;
  const double switch_cost = lambda * static_cast<double>(r.switches);
  r.pseudo_regret = gap_sum + switch_cost;
  r.realized_regret = realized - static_cast<double>(r.samples) * best + switch_cost;
  return r;
}

// Default-loss arm means for the Gaussian channel model.
inline std::vector<double> gaussian_arm_mean_losses(const ChannelModel& model) {
  std::vector<double> m(static_cast<std::size_t>(model.K));
  for (int i = 1; i <= model.K; ++i) m[static_cast<std::size_t>(i - 1)] = expected_loss(model.mean(i));
  return m;
}

template <class Env>
BanditResult run_bandit_mode(Env& env, std::int64_t T, double lambda) {
  return run_bandit_mode(env, T, lambda, gaussian_arm_mean_losses(env.model()));
}

}  // namespace anomsearch
