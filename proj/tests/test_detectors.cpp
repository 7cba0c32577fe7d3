#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "anomsearch/bounds.hpp"
#include "anomsearch/detectors.hpp"
#include "scripted_env.hpp"

using namespace anomsearch;

TEST(CusumStep, ClampThenAdd) {
  EXPECT_DOUBLE_EQ(cusum_step(-3.2, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(cusum_step(1.0, -0.4), 0.6);
  EXPECT_EQ(cusum_step(0.0, 0.0), 0.0);
}

TEST(RunProposed, ScriptedSingleChannelClimb) {
  ScriptedEnvironment env(2, {2, 2}, {0.2, 0.2});
  const auto r = run_proposed(env, 0.3, 0.0);
  EXPECT_EQ(r.declared, 2);
  EXPECT_EQ(r.tau, 2);
  EXPECT_EQ(r.switches, 0);
  EXPECT_EQ(r.tau_tilde, 2);
  EXPECT_TRUE(r.correct);
  EXPECT_FALSE(r.capped);
}

TEST(RunProposed, ScriptedSwitchAndClampAtBlockStart) {
  ScriptedEnvironment env(2, {1, 2}, {-0.1, 0.4});
  const auto r = run_proposed(env, 0.3, 0.0);
  EXPECT_EQ(r.declared, 2);
  EXPECT_EQ(r.tau, 2);
  EXPECT_EQ(r.switches, 1);
  EXPECT_EQ(r.tau_tilde, 3);
  EXPECT_EQ(r.blocks, 2);
  // First block's loss was importance weighted into channel 1 only.
  ASSERT_EQ(env.weights.size(), 2u);
  EXPECT_DOUBLE_EQ(env.weights[0][0], 0.5);
  EXPECT_GT(env.weights[1][1], env.weights[1][0]);
}

TEST(RunProposed, NegativeExitAtBlockEndSkipsFiller) {
  // K = 2, lambda = 1.5: B_1 = ceil(2.25 / sqrt 2) = 2. The CUSUM phase ends
  // exactly at s = B_1, so no filler sample is drawn before block 2.
  ASSERT_EQ(block_schedule(1, 1.5, 2).B, 2);
  ScriptedEnvironment env(2, {1, 2}, {0.1, -0.3, 0.5});
  const auto r = run_proposed(env, 0.3, 1.5);
  EXPECT_EQ(r.declared, 2);
  EXPECT_EQ(r.tau, 3);
  EXPECT_EQ(r.switches, 1);
  EXPECT_EQ(env.remaining_observations(), 0u);
}

TEST(RunProposed, FillerSamplesDoNotMoveTheStatistic) {
  // Block 1: CUSUM exits after one sample, one filler sample follows. The
  // filler's huge llr must not trigger a declaration.
  ScriptedEnvironment env(2, {1, 2}, {-0.1, 5.0, 0.4});
  const auto r = run_proposed(env, 0.3, 1.5);
  EXPECT_EQ(r.declared, 2);
  EXPECT_EQ(r.tau, 3);
  EXPECT_EQ(env.observed, (std::vector<int>{1, 1, 2}));
}

TEST(RunProposed, LongCusumPhaseCountsEverySample) {
  // B_1 = 1 but the CUSUM phase keeps going while 0 <= Y <= b.
  ScriptedEnvironment env(3, {3}, {0.1, 0.1, 0.1, 0.1, 0.1});
  const auto r = run_proposed(env, 0.45, 0.0);
  EXPECT_EQ(r.tau, 5);
  EXPECT_EQ(r.declared, 3);
  EXPECT_EQ(r.blocks, 1);
}

TEST(RunProposed, Errors) {
  ScriptedEnvironment env(2, {1}, {0.1});
  EXPECT_THROW(run_proposed(env, 0.0, 0.0), domain_error);
  EXPECT_THROW(run_proposed(env, 1.0, -0.5), domain_error);
}

TEST(RunProposed, CapFlagsResult) {
  std::mt19937_64 rng(1);
  GaussianEnvironment env(ChannelModel(4, 0.05), rng);
  RunOptions opt;
  opt.sample_cap = 50;
  const auto r = run_proposed(env, 1e6, 0.5, opt);
  EXPECT_TRUE(r.capped);
  EXPECT_EQ(r.tau, 50);
}

namespace {

// Counts loss evaluations; used to check how many samples enter block losses.
struct CountingLoss {
  std::int64_t* calls;
  double operator()(double x) const {
    ++*calls;
    return loss(x);
  }
};

}  // namespace

TEST(RunProposed, BlockLossUsesAtMostBnSamples) {
  for (double lambda : {0.0, 0.7, 2.0}) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      std::mt19937_64 rng(seed);
      GaussianEnvironment env(ChannelModel(5, 0.3), rng);
      std::int64_t calls = 0;
      const auto r = run_proposed(env, 3.0, lambda, {}, CountingLoss{&calls});
      if (lambda == 0.0) {
        EXPECT_EQ(calls, r.blocks);
      }
      EXPECT_LE(calls, psi(r.blocks, lambda, 5));
      EXPECT_LE(calls, r.tau);
    }
  }
}

TEST(RunProposed, InvariantsOnRandomRuns) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    std::mt19937_64 rng(seed);
    const ChannelModel model(6, 0.4, Placement::UniformRandom);
    GaussianEnvironment env(model.realize(rng), rng);
    std::vector<Observation> trace;
    RunOptions opt;
    opt.trace = &trace;
    const auto r = run_proposed(env, 2.5, 0.3, opt);
    EXPECT_EQ(r.tau_tilde, r.tau + r.switches);
    EXPECT_DOUBLE_EQ(r.tau_tilde_lambda, r.tau + 0.3 * r.switches);
    EXPECT_LE(r.switches, std::max<std::int64_t>(0, r.blocks - 1));
    ASSERT_EQ(static_cast<std::int64_t>(trace.size()), r.tau);
    EXPECT_EQ(trace.back().channel, r.declared);
    EXPECT_EQ(r.correct, r.declared == env.model().anomalous_index);
    for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_GT(trace[i].time_index, trace[i - 1].time_index);
    std::int64_t sample_switches = 0;
    for (std::size_t i = 1; i < trace.size(); ++i) sample_switches += trace[i].channel != trace[i - 1].channel;
    EXPECT_EQ(sample_switches, r.switches);
  }
}

TEST(RunProposed, Deterministic) {
  for (std::uint64_t seed : {3u, 99u}) {
    std::mt19937_64 a(seed), b(seed);
    GaussianEnvironment ea(ChannelModel(8, 0.4), a), eb(ChannelModel(8, 0.4), b);
    const auto ra = run_proposed(ea, 4.0, 0.025), rb = run_proposed(eb, 4.0, 0.025);
    EXPECT_EQ(ra.tau, rb.tau);
    EXPECT_EQ(ra.switches, rb.switches);
    EXPECT_EQ(ra.declared, rb.declared);
    EXPECT_EQ(ra.blocks, rb.blocks);
  }
}

TEST(RunRoundRobin, ScriptedSwitchThenDeclare) {
  ScriptedEnvironment env(3, {}, {-0.5, 0.2});
  const auto r = run_round_robin(env, 0.1);
  EXPECT_EQ(r.declared, 2);
  EXPECT_EQ(r.tau, 2);
  EXPECT_EQ(r.switches, 1);
  EXPECT_EQ(r.tau_tilde, 3);
  EXPECT_EQ(env.observed, (std::vector<int>{1, 2}));
}

TEST(RunRoundRobin, SingleChannelNeverSwitches) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    GaussianEnvironment env(ChannelModel(1, 0.2), rng);
    const auto r = run_round_robin(env, 2.0);
    EXPECT_EQ(r.declared, 1);
    EXPECT_EQ(r.switches, 0);
    EXPECT_TRUE(r.correct);
  }
}

TEST(RunRoundRobin, CyclicOrderAndTerminalStatistic) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(seed);
    const ChannelModel model(5, 0.3);
    GaussianEnvironment env(model, rng);
    std::vector<Observation> trace;
    RunOptions opt;
    opt.trace = &trace;
    const auto r = run_round_robin(env, 3.0, opt);
    ASSERT_EQ(static_cast<std::int64_t>(trace.size()), r.tau);
    EXPECT_EQ(r.tau_tilde, r.tau + r.switches);
    EXPECT_EQ(trace.front().channel, 1);
    int expected = 1;
    double Y = 0.0;
    std::int64_t switches = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      if (i > 0 && trace[i].channel != trace[i - 1].channel) {
        expected = expected % 5 + 1;
        ++switches;
        EXPECT_LT(Y, 0.0);
      }
      EXPECT_EQ(trace[i].channel, expected);
      Y = cusum_step(Y, llr(trace[i].value, model.mu));
    }
    EXPECT_GT(Y, 3.0);
    EXPECT_EQ(switches, r.switches);
    EXPECT_EQ(trace.back().channel, r.declared);
  }
}

TEST(RunRoundRobin, CapFlagsResult) {
  std::mt19937_64 rng(1);
  GaussianEnvironment env(ChannelModel(3, 0.05), rng);
  RunOptions opt;
  opt.sample_cap = 40;
  const auto r = run_round_robin(env, 1e6, opt);
  EXPECT_TRUE(r.capped);
  EXPECT_EQ(r.tau, 40);
}

namespace {

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * (i + j);
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

TEST(RunRoundRobin, HardSettingFalseAlarmFallsWithThreshold) {
  const ChannelModel model(22, 0.1);
  std::vector<double> bs{2.0, 4.0, 6.0, 8.0, 10.0}, pfa;
  for (std::size_t k = 0; k < bs.size(); ++k) {
    int errors = 0;
    for (int t = 0; t < 1000; ++t) {
      std::mt19937_64 rng(derive_seed(7, 1, static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(t)));
      GaussianEnvironment env(model, rng);
      errors += !run_round_robin(env, bs[k]).correct;
    }
    pfa.push_back(errors / 1000.0);
  }
  EXPECT_LT(spearman(bs, pfa), -0.9);
}

TEST(RunBanditMode, ZeroLambdaIsPerSamplePlay) {
  std::mt19937_64 rng(4);
  GaussianEnvironment env(ChannelModel(3, 0.4), rng);
  const auto r = run_bandit_mode(env, 500, 0.0);
  EXPECT_EQ(r.samples, 500);
  EXPECT_EQ(r.blocks, 500);
}

TEST(RunBanditMode, SingleBlockRegretBounded) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    GaussianEnvironment env(ChannelModel(4, 0.4), rng);
    const auto r = run_bandit_mode(env, 1, 0.3);
    EXPECT_GE(r.pseudo_regret, 0.0);
    EXPECT_LE(r.pseudo_regret, 1.3);
    EXPECT_EQ(r.switches, 0);
  }
}

TEST(RunBanditMode, SamplesFollowSchedule) {
  std::mt19937_64 rng(8);
  GaussianEnvironment env(ChannelModel(2, 0.4), rng);
  const auto r = run_bandit_mode(env, 300, 1.0);
  EXPECT_EQ(r.samples, psi(300, 1.0, 2));
  EXPECT_LE(r.switches, 299);
}

TEST(RunBanditMode, MeanRegretBelowExplicitBound) {
  const double Delta = loss_gap(0.4);
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    GaussianEnvironment env(ChannelModel(2, 0.4), rng);
    total += run_bandit_mode(env, 2000, 0.025).pseudo_regret;
  }
  EXPECT_LE(total / 50.0, regret_bound_explicit(static_cast<double>(psi(2000, 0.025, 2)), 0.025, 2, Delta));
}
