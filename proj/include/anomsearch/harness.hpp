#pragma once

// Seeded Monte Carlo sweeps over detection thresholds with CSV and SVG output.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "anomsearch/bayes_baseline.hpp"
#include "anomsearch/core_model.hpp"
#include "anomsearch/detectors.hpp"
#include "anomsearch/parallel.hpp"
#include "anomsearch/stats.hpp"

namespace anomsearch {

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Policy { Proposed = 0, RoundRobin = 1, Bayes = 2 };

inline const char* to_string(Policy p) {
  switch (p) {
    case Policy::Proposed: return "proposed";
    case Policy::RoundRobin: return "round_robin";
    case Policy::Bayes: return "bayes";
  }
  return "?";
}

inline Policy policy_from_string(const std::string& s) {
  if (s == "proposed") return Policy::Proposed;
  if (s == "round_robin") return Policy::RoundRobin;
  if (s == "bayes") return Policy::Bayes;
  throw domain_error("unknown policy '" + s + "'");
}

// Parameters of the stream-population policy. Each b in the grid is used as
// gamma_U; gamma_L is the cost-optimal lower threshold for that gamma_U.
struct BayesSettings {
  double pi_hat = 0.1;
  double eps = 0.01;
  double gamma_shape = 5.0;  // switching costs ~ Gamma(shape, 1), so lambda_bar = shape
  bool spread_is_sd = false;

  BayesConfig config() const {
    const GaussianPair pair = companion_pair(spread_is_sd);
    BayesConfig c;
    c.pi_hat = pi_hat;
    c.eps = eps;
    c.lambda_bar = gamma_shape;
    c.D10 = pair.d10();
    c.D01 = pair.d01();
    return c;
  }
};

struct ExperimentSpec {
  std::string name = "custom";
  int K = 8;
  double mu = 0.4;
  double lambda = 0.025;
  std::vector<Policy> policies{Policy::Proposed, Policy::RoundRobin};
  std::vector<double> b_grid;
  std::int64_t trials = 10'000;
  std::uint64_t seed = 1;
  std::int64_t sample_cap = kDefaultSampleCap;
  Placement placement = Placement::FixedLast;
  BayesSettings bayes;

  bool uses_channels() const {
    return std::any_of(policies.begin(), policies.end(), [](Policy p) { return p != Policy::Bayes; });
  }

  void validate() const {
    if (policies.empty()) throw domain_error("ExperimentSpec: empty policy set");
    if (b_grid.empty()) throw domain_error("ExperimentSpec: empty b_grid");
    for (std::size_t i = 0; i < b_grid.size(); ++i) {
      if (!(b_grid[i] > 0.0)) throw domain_error("ExperimentSpec: b values must be positive");
      if (i > 0 && !(b_grid[i] > b_grid[i - 1])) throw domain_error("ExperimentSpec: b_grid must be strictly increasing");
    }
    if (b_grid.size() > 0xffffff) throw domain_error("ExperimentSpec: b_grid too long");
    if (trials < 1 || trials > 0xffffffffLL) throw domain_error("ExperimentSpec: trials out of range");
    if (sample_cap < 1) throw domain_error("ExperimentSpec: sample_cap must be positive");
    if (lambda < 0.0) throw domain_error("ExperimentSpec: lambda must be nonnegative");
    if (uses_channels()) ChannelModel(K, mu, placement).validate();
    if (std::find(policies.begin(), policies.end(), Policy::Bayes) != policies.end()) bayes.config().validate();
  }
};

// Outcome of one trial, policy independent.
struct TrialOutcome {
  bool correct = false;
  std::int64_t tau = 0;
  std::int64_t switches = 0;
  double tau_lambda = 0.0;  // tau + accumulated switching cost
  bool capped = false;

  static TrialOutcome from(const SearchResult& r) {
    return {r.correct, r.tau, r.switches, r.tau_tilde_lambda, r.capped};
  }
  static TrialOutcome from(const BayesSearchResult& r) {
    return {r.declared_is_target, r.tau, r.streams_visited - 1, static_cast<double>(r.tau) + r.switch_cost, r.capped};
  }
};

struct SummaryRow {
  std::string policy;
  double b = 0.0;
  std::int64_t trials = 0;  // trials requested; capped ones are excluded from every statistic below
  double p_fa = 0.0;
  double p_fa_lo = 0.0;
  double p_fa_hi = 1.0;
  double mean_tau = 0.0;
  double mean_switches = 0.0;
  double mean_tau_tilde = 0.0;
  double mean_tau_lambda = 0.0;
  double se_tau = 0.0;
  std::int64_t capped = 0;

  bool operator==(const SummaryRow&) const = default;
};

// Aggregates trial outcomes in index order so the result never depends on
// how trials were scheduled.
inline SummaryRow summarize(const std::string& policy, double b, const std::vector<TrialOutcome>& outcomes) {
  SummaryRow row;
  row.policy = policy;
  row.b = b;
  row.trials = static_cast<std::int64_t>(outcomes.size());
  std::int64_t used = 0, errors = 0, tau_sum = 0, switch_sum = 0;
  long double tau_sq = 0.0L, lambda_sum = 0.0L;
  for (const auto& o : outcomes) {
    if (o.capped) {
      ++row.capped;
      continue;
    }
    ++used;
    errors += o.correct ? 0 : 1;
    tau_sum += o.tau;
    switch_sum += o.switches;
    tau_sq += static_cast<long double>(o.tau) * static_cast<long double>(o.tau);
    lambda_sum += o.tau_lambda;
  }
  if (used == 0) return row;
  const double n = static_cast<double>(used);
  row.p_fa = static_cast<double>(errors) / n;
  const Interval ci = wilson_interval(errors, used);
  row.p_fa_lo = ci.low;
  row.p_fa_hi = ci.high;
  row.mean_tau = static_cast<double>(tau_sum) / n;
  row.mean_switches = static_cast<double>(switch_sum) / n;
  row.mean_tau_tilde = static_cast<double>(tau_sum + switch_sum) / n;
  row.mean_tau_lambda = static_cast<double>(lambda_sum / used);
  if (used > 1) {
    const long double mean = static_cast<long double>(tau_sum) / used;
    const long double var = (tau_sq - used * mean * mean) / (used - 1);
    row.se_tau = std::sqrt(static_cast<double>(std::max(var, 0.0L)) / n);
  }
  return row;
}

// Runs one trial of `policy` at threshold b from a derived seed.
inline TrialOutcome run_trial(const ExperimentSpec& spec, Policy policy, double b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RunOptions opt;
  opt.sample_cap = spec.sample_cap;
  switch (policy) {
    case Policy::Proposed: {
      const ChannelModel model = ChannelModel(spec.K, spec.mu, spec.placement).realize(rng);
      GaussianEnvironment env(model, rng);
      return TrialOutcome::from(run_proposed(env, b, spec.lambda, opt));
    }
    case Policy::RoundRobin: {
      const ChannelModel model = ChannelModel(spec.K, spec.mu, spec.placement).realize(rng);
      GaussianEnvironment env(model, rng);
      return TrialOutcome::from(run_round_robin(env, b, opt, spec.lambda));
    }
    case Policy::Bayes: {
      const BayesConfig cfg = spec.bayes.config();
      const double du = std::exp(b);
      const Thresholds th = Thresholds::from_deltas(delta_l_star(cfg, du), du);
      StreamEnvironment env(companion_pair(spec.bayes.spread_is_sd), cfg.pi_hat, spec.bayes.gamma_shape, rng);
      return TrialOutcome::from(run_bayes_search(env, th, spec.sample_cap));
    }
  }
  throw domain_error("run_trial: unknown policy");
}

// TrialFn: (Policy, double b, std::uint64_t seed) -> TrialOutcome.
template <class TrialFn>
std::vector<SummaryRow> run_experiment(const ExperimentSpec& spec, unsigned threads, TrialFn&& trial) {
  spec.validate();
  const std::size_t P = spec.policies.size(), G = spec.b_grid.size();
  const std::size_t N = static_cast<std::size_t>(spec.trials);
  std::vector<TrialOutcome> outcomes(P * G * N);
  parallel_for(outcomes.size(), threads, [&](std::size_t idx) {
    const std::size_t t = idx % N, g = (idx / N) % G, p = idx / (N * G);
    const Policy pol = spec.policies[p];
    const std::uint64_t seed = derive_seed(spec.seed, static_cast<std::uint32_t>(pol), static_cast<std::uint32_t>(g),
                                           static_cast<std::uint32_t>(t));
    outcomes[idx] = trial(pol, spec.b_grid[g], seed);
  });
  std::vector<SummaryRow> rows;
  rows.reserve(P * G);
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t g = 0; g < G; ++g) {
      const auto first = outcomes.begin() + static_cast<std::ptrdiff_t>((p * G + g) * N);
      rows.push_back(summarize(to_string(spec.policies[p]), spec.b_grid[g], std::vector<TrialOutcome>(first, first + static_cast<std::ptrdiff_t>(N))));
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
    return a.policy != b.policy ? a.policy < b.policy : a.b < b.b;
  });
  return rows;
}

inline std::vector<SummaryRow> run_experiment(const ExperimentSpec& spec, unsigned threads = 1) {
  return run_experiment(spec, threads,
                        [&spec](Policy p, double b, std::uint64_t seed) { return run_trial(spec, p, b, seed); });
}

inline std::vector<double> linear_grid(double lo, double hi, int steps) {
  if (steps < 1) throw domain_error("linear_grid: steps must be >= 1");
  if (steps == 1) return {lo};
  if (!(hi > lo)) throw domain_error("linear_grid: need b_max > b_min");
  std::vector<double> g(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (steps - 1);
  return g;
}

// Reference experiment settings. Each b grid spans false-alarm
// rates from roughly 0.3 down to below 0.01 for its setting.
inline ExperimentSpec preset(const std::string& name) {
  ExperimentSpec s;
  s.name = name;
  s.trials = 10'000;
  s.seed = 20230302;
  if (name == "hard") {
    s.K = 22;
    s.mu = 0.1;
    s.lambda = 1.0;
    s.b_grid = {2.0, 4.0, 6.0, 8.0, 10.0};
  } else if (name == "easy") {
    s.K = 8;
    s.mu = 0.4;
    s.lambda = 0.025;
    s.b_grid = {2.5, 3.5, 4.5, 5.5, 6.5};
  } else if (name == "companion") {
    s.K = 1;
    s.mu = 1.0;
    s.lambda = 0.0;
    s.policies = {Policy::Bayes};
    s.bayes = BayesSettings{0.1, 0.01, 5.0, false};
    s.b_grid = {std::log(delta_u_star(0.1, 0.01))};
  } else {
    throw domain_error("unknown preset '" + name + "'");
  }
  return s;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kCsvHeader =
    "policy,b,trials,p_fa,p_fa_lo,p_fa_hi,mean_tau,mean_switches,mean_tau_tilde,mean_tau_lambda,se_tau,capped";

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string to_csv(const std::vector<SummaryRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += r.policy + ',' + format_double(r.b) + ',' + std::to_string(r.trials) + ',' + format_double(r.p_fa) + ',' +
           format_double(r.p_fa_lo) + ',' + format_double(r.p_fa_hi) + ',' + format_double(r.mean_tau) + ',' +
           format_double(r.mean_switches) + ',' + format_double(r.mean_tau_tilde) + ',' +
           format_double(r.mean_tau_lambda) + ',' + format_double(r.se_tau) + ',' + std::to_string(r.capped) + '\n';
  }
  return out;
}

namespace detail {

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw io_error("failed writing '" + path + "'");
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

template <class T>
T parse_number(const std::string& s) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw domain_error("CSV: bad number '" + s + "'");
  return v;
}

}  // namespace detail

inline void emit_csv(const std::vector<SummaryRow>& rows, const std::string& path) {
  if (rows.empty()) throw domain_error("emit_csv: no rows");
  detail::write_file(path, to_csv(rows));
}

inline std::vector<SummaryRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw domain_error("CSV: missing or unexpected header");
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 12) throw domain_error("CSV: expected 12 columns");
    SummaryRow r;
    r.policy = f[0];
    r.b = detail::parse_number<double>(f[1]);
    r.trials = detail::parse_number<std::int64_t>(f[2]);
    r.p_fa = detail::parse_number<double>(f[3]);
    r.p_fa_lo = detail::parse_number<double>(f[4]);
    r.p_fa_hi = detail::parse_number<double>(f[5]);
    r.mean_tau = detail::parse_number<double>(f[6]);
    r.mean_switches = detail::parse_number<double>(f[7]);
    r.mean_tau_tilde = detail::parse_number<double>(f[8]);
    r.mean_tau_lambda = detail::parse_number<double>(f[9]);
    r.se_tau = detail::parse_number<double>(f[10]);
    r.capped = detail::parse_number<std::int64_t>(f[11]);
    rows.push_back(r);
  }
  return rows;
}

inline std::vector<SummaryRow> read_csv(const std::string& path) { return parse_csv(detail::read_file(path)); }

// ---------------------------------------------------------------------------
// Matched false-alarm comparison

struct CurvePoint {
  double p_fa = 0.0;
  double tau_tilde = 0.0;
};

namespace detail {

// Pool-adjacent-violators fit, nondecreasing when `increasing`.
inline std::vector<double> isotonic(const std::vector<double>& y, bool increasing) {
  std::vector<double> val, wt;
  std::vector<std::size_t> len;
  for (double v : y) {
    val.push_back(increasing ? v : -v);
    wt.push_back(1.0);
    len.push_back(1);
    while (val.size() > 1 && val[val.size() - 2] > val.back()) {
      const double w = wt[wt.size() - 2] + wt.back();
      const double m = (val[val.size() - 2] * wt[wt.size() - 2] + val.back() * wt.back()) / w;
      const std::size_t l = len[len.size() - 2] + len.back();
      val.pop_back(); wt.pop_back(); len.pop_back();
      val.back() = m; wt.back() = w; len.back() = l;
    }
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < val.size(); ++i) out.insert(out.end(), len[i], increasing ? val[i] : -val[i]);
  return out;
}

}  // namespace detail

// (P_FA, mean tau~) curve of one policy along increasing b, made monotone
// (P_FA nonincreasing, delay nondecreasing) so it can be inverted.
inline std::vector<CurvePoint> monotone_curve(const std::vector<SummaryRow>& rows, const std::string& policy) {
  std::vector<SummaryRow> sel;
  for (const auto& r : rows)
    if (r.policy == policy) sel.push_back(r);
  std::sort(sel.begin(), sel.end(), [](const auto& a, const auto& b) { return a.b < b.b; });
  std::vector<double> pf, tt;
  for (const auto& r : sel) {
    pf.push_back(r.p_fa);
    tt.push_back(r.mean_tau_tilde);
  }
  pf = detail::isotonic(pf, false);
  tt = detail::isotonic(tt, true);
  std::vector<CurvePoint> c;
  for (std::size_t i = 0; i < pf.size(); ++i) c.push_back({pf[i], tt[i]});
  return c;
}

// Piecewise-linear delay at a given false-alarm rate; nullopt outside the curve.
inline std::optional<double> interpolate_delay(const std::vector<CurvePoint>& curve, double p_fa) {
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    const double p0 = curve[i].p_fa, p1 = curve[i + 1].p_fa;
    if (p_fa <= p0 && p_fa >= p1) {
      if (p0 == p1) return 0.5 * (curve[i].tau_tilde + curve[i + 1].tau_tilde);
      const double w = (p0 - p_fa) / (p0 - p1);
      return curve[i].tau_tilde + w * (curve[i + 1].tau_tilde - curve[i].tau_tilde);
    }
  }
  if (curve.size() == 1 && curve[0].p_fa == p_fa) return curve[0].tau_tilde;
  return std::nullopt;
}

struct MatchedSavings {
  bool valid = false;  // false when the curves share no P_FA range inside the window
  double p_lo = 0.0, p_hi = 0.0;
  double mean = 0.0, min = 0.0, max = 0.0;  // 1 - tau~(candidate) / tau~(baseline)
  int points = 0;
};

// Relative delay savings of `candidate` over `baseline` at matched false-alarm
// rates, averaged over log-spaced P_FA values in the common range within
// [window_lo, window_hi].
inline MatchedSavings matched_savings(const std::vector<SummaryRow>& rows, const std::string& candidate,
                                      const std::string& baseline, double window_lo, double window_hi,
                                      int samples = 50) {
  const auto a = monotone_curve(rows, candidate), b = monotone_curve(rows, baseline);
  MatchedSavings m;
  if (a.size() < 2 || b.size() < 2) return m;
  const double lo = std::max({window_lo, a.back().p_fa, b.back().p_fa});
  const double hi = std::min({window_hi, a.front().p_fa, b.front().p_fa});
  if (!(hi > lo) || !(lo > 0.0)) return m;
  m.p_lo = lo;
  m.p_hi = hi;
  double sum = 0.0;
  m.min = 1e300;
  m.max = -1e300;
  for (int k = 0; k < samples; ++k) {
    const double p = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * k / (samples - 1));
    const auto da = interpolate_delay(a, p), db = interpolate_delay(b, p);
    if (!da || !db || *db <= 0.0) continue;
    const double s = 1.0 - *da / *db;
    sum += s;
    m.min = std::min(m.min, s);
    m.max = std::max(m.max, s);
    ++m.points;
  }
  if (m.points > 0) {
    m.valid = true;
    m.mean = sum / m.points;
  }
  return m;
}

// ---------------------------------------------------------------------------
// SVG plot: P_FA (log x axis) against mean tau~, one series per policy.

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline std::string render_svg(const std::vector<SummaryRow>& rows) {
  if (rows.empty()) throw domain_error("emit_plot: no rows");
  constexpr double W = 640, H = 440, L = 70, R = 20, T = 30, B = 60;
  std::map<std::string, std::vector<SummaryRow>> series;
  for (const auto& r : rows) series[r.policy].push_back(r);

  double pmin = 1.0, pmax = 0.0, ymin = 1e300, ymax = -1e300;
  for (const auto& r : rows) {
    if (r.p_fa > 0.0) {
      pmin = std::min(pmin, r.p_fa);
      pmax = std::max(pmax, r.p_fa);
    }
    ymin = std::min(ymin, r.mean_tau_tilde);
    ymax = std::max(ymax, r.mean_tau_tilde);
  }
  if (pmax <= 0.0) {
    pmin = 1e-3;
    pmax = 1.0;
  }
  const double lx0 = std::floor(std::log10(pmin)), lx1 = std::max(lx0 + 1.0, std::ceil(std::log10(pmax)));
  if (!(ymax > ymin)) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto sx = [&](double p) {
    const double lp = std::log10(std::max(p, std::pow(10.0, lx0)));
    return L + (lp - lx0) / (lx1 - lx0) * (W - L - R);
  };
  auto sy = [&](double y) { return T + (ymax - y) / (ymax - ymin) * (H - T - B); };
  auto f = [](double v) { return format_double(std::round(v * 100.0) / 100.0); };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\">\n";
  o << "  <rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  o << "  <g stroke=\"black\" stroke-width=\"1\">\n";
  o << "    <line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\"/>\n";
  o << "    <line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\"/>\n";
  o << "  </g>\n";
  o << "  <g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (double e = lx0; e <= lx1 + 1e-9; e += 1.0) {
    const double x = sx(std::pow(10.0, e));
    o << "    <line x1=\"" << f(x) << "\" y1=\"" << H - B << "\" x2=\"" << f(x) << "\" y2=\"" << H - B + 5
      << "\" stroke=\"black\"/>\n";
    o << "    <text x=\"" << f(x) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">1e" << static_cast<int>(e)
      << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double v = ymin + (ymax - ymin) * k / 4.0;
    o << "    <text x=\"" << L - 6 << "\" y=\"" << f(sy(v) + 4) << "\" text-anchor=\"end\">" << f(v) << "</text>\n";
  }
  o << "    <text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">false-alarm rate</text>\n";
  o << "    <text x=\"18\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << (T + H - B) / 2 << ")\">mean delay incl. switches</text>\n";
  o << "  </g>\n";

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  int idx = 0;
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.b < b.b; });
    const char* c = colors[idx % 5];
    o << "  <polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) o << (i ? " " : "") << f(sx(pts[i].p_fa)) << ',' << f(sy(pts[i].mean_tau_tilde));
    o << "\"/>\n";
    for (const auto& p : pts)
      o << "  <circle cx=\"" << f(sx(p.p_fa)) << "\" cy=\"" << f(sy(p.mean_tau_tilde)) << "\" r=\"3\" fill=\"" << c
        << "\"/>\n";
    const double ly = T + 14 + 16 * idx;
    o << "  <line x1=\"" << W - R - 130 << "\" y1=\"" << ly << "\" x2=\"" << W - R - 110 << "\" y2=\"" << ly
      << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
    o << "  <text x=\"" << W - R - 104 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"11\">"
      << detail::xml_escape(name) << "</text>\n";
    ++idx;
  }
  o << "</svg>\n";
  return o.str();
}

inline void emit_plot(const std::vector<SummaryRow>& rows, const std::string& path) {
  detail::write_file(path, render_svg(rows));
}

}  // namespace anomsearch
