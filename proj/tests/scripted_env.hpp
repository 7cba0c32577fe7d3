#pragma once

// Observation source replaying fixed channel draws and log-likelihood ratios.
// With mu = 0.5 the Gaussian llr 2 mu x equals x, so observations are the
// scripted llr values themselves.

#include <deque>
#include <stdexcept>
#include <vector>

#include "anomsearch/core_model.hpp"

class ScriptedEnvironment {
 public:
  ScriptedEnvironment(int K, std::vector<int> draws, std::vector<double> llrs, int anomalous = -1)
      : model_(K, 0.5, anomsearch::Placement::FixedLast, anomalous < 0 ? K : anomalous),
        draws_(draws.begin(), draws.end()),
        llrs_(llrs.begin(), llrs.end()) {}

  const anomsearch::ChannelModel& model() const { return model_; }
  double llr(double x) const { return anomsearch::llr(x, model_.mu); }

  double observe(int channel) {
    if (llrs_.empty()) throw std::logic_error("script exhausted: observation");
    observed.push_back(channel);
    const double v = llrs_.front();
    llrs_.pop_front();
    return v / (2.0 * model_.mu);
  }

  int draw_channel(const std::vector<double>& p) {
    if (draws_.empty()) throw std::logic_error("script exhausted: channel draw");
    weights.push_back(p);
    const int c = draws_.front();
    draws_.pop_front();
    return c;
  }

  std::size_t remaining_observations() const { return llrs_.size(); }

  std::vector<int> observed;
  std::vector<std::vector<double>> weights;

 private:
  anomsearch::ChannelModel model_;
  std::deque<int> draws_;
  std::deque<double> llrs_;
};
