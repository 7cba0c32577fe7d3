#pragma once

// Channel world for the K-channel Gaussian anomaly search: one anomalous
// channel emitting N(mu, 1) among nominal channels emitting N(-mu, 1).

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace anomsearch {

// Thrown for out-of-range arguments across the library.
class domain_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Placement { FixedLast, UniformRandom };

inline const char* to_string(Placement p) {
  return p == Placement::FixedLast ? "fixed_last" : "uniform_random";
}

inline Placement placement_from_string(const std::string& s) {
  if (s == "fixed_last") return Placement::FixedLast;
  if (s == "uniform_random") return Placement::UniformRandom;
  throw domain_error("unknown placement '" + s + "'");
}

// Standard normal c.d.f. via erfc, which keeps the lower tail accurate.
inline double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// Default loss map 1 - Phi(x). Nominal channels are penalised more on average.
struct GaussianTailLoss {
  double operator()(double x) const { return 0.5 * std::erfc(x / std::numbers::sqrt2); }
};

inline double loss(double x) { return GaussianTailLoss{}(x); }

// log f1(x)/f0(x) for N(mu,1) against N(-mu,1).
inline double llr(double x, double mu) { return 2.0 * mu * x; }

// Delta = E[loss | nominal] - E[loss | anomalous].
// For X ~ N(m,1), E[1 - Phi(X)] = Phi(-m / sqrt 2).
inline double loss_gap(double mu) {
  if (!(mu > 0.0)) throw domain_error("loss_gap: mu must be positive");
  return 2.0 * std_normal_cdf(mu / std::numbers::sqrt2) - 1.0;
}

// Inverse of loss_gap by bisection; Delta must lie in (0, 1).
inline double mu_from_loss_gap(double Delta) {
  if (!(Delta > 0.0 && Delta < 1.0)) throw domain_error("mu_from_loss_gap: Delta must lie in (0, 1)");
  double lo = 0.0, hi = 1.0;
  while (loss_gap(hi) < Delta) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid > 0.0 && loss_gap(mid) < Delta ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Expected default loss of a channel with mean m (unit variance).
inline double expected_loss(double mean) { return std_normal_cdf(-mean / std::numbers::sqrt2); }

struct Observation {
  double value = 0.0;
  int channel = 0;
  std::int64_t time_index = 0;
};

// Channels are 1-based to match the usual indexing of the search problem.
struct ChannelModel {
  int K = 1;
  int anomalous_index = 1;
  double mu = 0.1;
  Placement placement = Placement::FixedLast;

  ChannelModel() = default;
  ChannelModel(int k, double m, Placement pl = Placement::FixedLast, std::optional<int> anomalous = {})
      : K(k), anomalous_index(anomalous.value_or(k)), mu(m), placement(pl) {
    validate();
  }

  void validate() const {
    if (K < 1) throw domain_error("ChannelModel: K must be >= 1");
    if (anomalous_index < 1 || anomalous_index > K)
      throw domain_error("ChannelModel: anomalous index out of [1, K]");
    if (!(mu > 0.0)) throw domain_error("ChannelModel: mu must be positive");
  }

  bool is_anomalous(int channel) const { return channel == anomalous_index; }
  double mean(int channel) const { return is_anomalous(channel) ? mu : -mu; }

  // Resolves the placement for one trial. FixedLast keeps i* = K.
  template <class Rng>
  ChannelModel realize(Rng& rng) const {
    ChannelModel out = *this;
    if (placement == Placement::UniformRandom) {
      std::uniform_int_distribution<int> pick(1, K);
      out.anomalous_index = pick(rng);
    }
    return out;
  }
};

template <class Rng>
double sample_value(const ChannelModel& model, int channel, Rng& rng) {
  if (channel < 1 || channel > model.K) throw domain_error("sample_channel: channel index out of range");
  std::normal_distribution<double> dist(model.mean(channel), 1.0);
  return dist(rng);
}

template <class Rng>
Observation sample_channel(const ChannelModel& model, int channel, Rng& rng, std::int64_t time_index = 1) {
  return Observation{sample_value(model, channel, rng), channel, time_index};
}

// Observation source backed by the Gaussian model and a random engine.
// Policies are written against this shape so scripted sources can replace it.
template <class Rng = std::mt19937_64>
class GaussianEnvironment {
 public:
  GaussianEnvironment(ChannelModel model, Rng& rng) : model_(model), rng_(&rng) {}

  const ChannelModel& model() const { return model_; }
  double observe(int channel) { return sample_value(model_, channel, *rng_); }
  double llr(double x) const { return anomsearch::llr(x, model_.mu); }

  // Draws a 1-based channel index from the probability vector p.
  int draw_channel(const std::vector<double>& p) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double r = u(*rng_);
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      acc += p[i];
      if (r < acc) return static_cast<int>(i) + 1;
    }
    return static_cast<int>(p.size());
  }

 private:
  ChannelModel model_;
  Rng* rng_;
};

}  // namespace anomsearch
