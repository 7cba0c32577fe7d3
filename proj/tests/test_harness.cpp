#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <unordered_set>

#include "anomsearch/config.hpp"
#include "anomsearch/harness.hpp"

using namespace anomsearch;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec s = preset("easy");
  s.trials = 60;
  s.b_grid = {1.5, 3.0, 4.5};
  s.seed = 77;
  return s;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("anomsearch_test_" + name)).string();
}

}  // namespace

TEST(RunExperiment, SingleTrialRowEqualsResult) {
  SearchResult r;
  r.declared = 3;
  r.tau = 41;
  r.switches = 6;
  r.tau_tilde = 47;
  r.tau_tilde_lambda = 41.15;
  r.correct = false;
  ExperimentSpec s = small_spec();
  s.trials = 1;
  s.policies = {Policy::Proposed};
  s.b_grid = {2.0};
  const auto rows = run_experiment(s, 1, [&](Policy, double, std::uint64_t) { return TrialOutcome::from(r); });
  ASSERT_EQ(rows.size(), 1u);
  const auto& row = rows[0];
  EXPECT_EQ(row.policy, "proposed");
  EXPECT_EQ(row.b, 2.0);
  EXPECT_EQ(row.trials, 1);
  EXPECT_EQ(row.p_fa, 1.0);
  EXPECT_EQ(row.mean_tau, 41.0);
  EXPECT_EQ(row.mean_switches, 6.0);
  EXPECT_EQ(row.mean_tau_tilde, 47.0);
  EXPECT_EQ(row.mean_tau_lambda, 41.15);
  EXPECT_EQ(row.se_tau, 0.0);
  EXPECT_EQ(row.capped, 0);
}

TEST(RunExperiment, RowCountAndOrder) {
  const auto s = small_spec();
  const auto rows = run_experiment(s, 2);
  ASSERT_EQ(rows.size(), s.policies.size() * s.b_grid.size());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const bool ordered = rows[i - 1].policy < rows[i].policy ||
                         (rows[i - 1].policy == rows[i].policy && rows[i - 1].b < rows[i].b);
    EXPECT_TRUE(ordered);
  }
  for (const auto& r : rows) {
    EXPECT_GE(r.p_fa, 0.0);
    EXPECT_LE(r.p_fa, 1.0);
    EXPECT_LE(r.p_fa_lo, r.p_fa);
    EXPECT_GE(r.p_fa_hi, r.p_fa);
    EXPECT_NEAR(r.mean_tau_tilde, r.mean_tau + r.mean_switches, 1e-9 * r.mean_tau_tilde);
    EXPECT_EQ(r.trials, 60);
  }
}

TEST(RunExperiment, ByteIdenticalAcrossRunsAndThreads) {
  const auto s = small_spec();
  const std::string ref = to_csv(run_experiment(s, 1));
  EXPECT_EQ(to_csv(run_experiment(s, 1)), ref);
  for (unsigned t : {4u, 8u}) EXPECT_EQ(to_csv(run_experiment(s, t)), ref) << t;
}

TEST(RunExperiment, CappedTrialsExcludedAndCounted) {
  ExperimentSpec s = small_spec();
  s.trials = 4;
  s.policies = {Policy::RoundRobin};
  s.b_grid = {1.0};
  const auto rows = run_experiment(s, 1, [](Policy, double, std::uint64_t seed) {
    TrialOutcome o;
    o.tau = 10;
    o.tau_lambda = 10;
    o.correct = true;
    o.capped = seed % 2 == 0;
    return o;
  });
  EXPECT_EQ(rows[0].trials, 4);
  EXPECT_GE(rows[0].capped, 0);
  if (rows[0].capped < 4) {
    EXPECT_EQ(rows[0].mean_tau, 10.0);
  }
  ExperimentSpec all = s;
  const auto capped = run_experiment(all, 1, [](Policy, double, std::uint64_t) {
    TrialOutcome o;
    o.tau = 5;
    o.capped = true;
    return o;
  });
  EXPECT_EQ(capped[0].capped, 4);
  EXPECT_EQ(capped[0].mean_tau, 0.0);
}

TEST(RunExperiment, SpecErrors) {
  ExperimentSpec s = small_spec();
  s.policies.clear();
  EXPECT_THROW(run_experiment(s), domain_error);
  s = small_spec();
  s.b_grid.clear();
  EXPECT_THROW(run_experiment(s), domain_error);
  s = small_spec();
  s.b_grid = {3.0, 2.0};
  EXPECT_THROW(run_experiment(s), domain_error);
  s = small_spec();
  s.trials = 0;
  EXPECT_THROW(run_experiment(s), domain_error);
}

TEST(DeriveSeed, NoCollisionsOverMillion) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(1 << 21);
  std::size_t n = 0;
  for (std::uint32_t pol = 0; pol < 3; ++pol)
    for (std::uint32_t g = 0; g < 10; ++g)
      for (std::uint32_t t = 0; t < 33334; ++t, ++n) seen.insert(derive_seed(20230302, pol, g, t));
  EXPECT_GE(n, 1000000u);
  EXPECT_EQ(seen.size(), n);
}

TEST(Presets, Values) {
  const auto h = preset("hard");
  EXPECT_EQ(h.K, 22);
  EXPECT_EQ(h.mu, 0.1);
  EXPECT_EQ(h.lambda, 1.0);
  const auto e = preset("easy");
  EXPECT_EQ(e.K, 8);
  EXPECT_EQ(e.mu, 0.4);
  EXPECT_EQ(e.lambda, 0.025);
  const auto c = preset("companion");
  EXPECT_EQ(c.bayes.pi_hat, 0.1);
  EXPECT_EQ(c.bayes.eps, 0.01);
  EXPECT_EQ(c.trials, 10000);
  EXPECT_THROW(preset("medium"), domain_error);
  for (const auto& p : {h, e, c}) EXPECT_NO_THROW(p.validate());
}

TEST(Csv, HeaderAndColumns) {
  const auto rows = run_experiment(small_spec(), 1);
  const std::string text = to_csv(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')), kCsvHeader);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  std::istringstream in(text);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 11);
    ++lines;
  }
  EXPECT_EQ(lines, rows.size() + 1);
}

TEST(Csv, RoundTripIsExact) {
  SummaryRow r;
  r.policy = "round_robin";
  r.b = 0.1 + 0.2;
  r.trials = 1000;
  r.p_fa = 1.0 / 3.0;
  r.p_fa_lo = 0.30384;
  r.p_fa_hi = 0.36444444444444446;
  r.mean_tau = 123.456789012345678;
  r.mean_switches = 1e-300;
  r.mean_tau_tilde = 5e20;
  r.mean_tau_lambda = 3.0000000000000004;
  r.se_tau = 0.0;
  r.capped = 2;
  const auto back = parse_csv(to_csv({r}));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], r);
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(Csv, FileIoAndErrors) {
  const auto rows = run_experiment(small_spec(), 1);
  const auto path = temp_path("rows.csv");
  emit_csv(rows, path);
  EXPECT_EQ(read_csv(path), rows);
  std::filesystem::remove(path);
  EXPECT_THROW(emit_csv(rows, "/nonexistent-dir/x.csv"), io_error);
  EXPECT_THROW(read_csv("/nonexistent-dir/x.csv"), io_error);
  EXPECT_THROW(parse_csv("bad,header\n"), domain_error);
  EXPECT_THROW(parse_csv(std::string(kCsvHeader) + "\nproposed,1,2\n"), domain_error);
  EXPECT_THROW(emit_csv({}, path), domain_error);
}

TEST(Config, JsonRoundTrip) {
  const auto s = small_spec();
  const auto back = spec_from_json(spec_to_json(s));
  EXPECT_EQ(to_csv(run_experiment(back, 1)), to_csv(run_experiment(s, 1)));
  EXPECT_EQ(spec_to_json(back), spec_to_json(s));
}

TEST(Config, RejectsUnknownAndInvalid) {
  auto j = spec_to_json(small_spec());
  j["trails"] = 5;
  EXPECT_THROW(spec_from_json(j), config_error);
  j = spec_to_json(small_spec());
  j["bayes"]["pi"] = 0.2;
  EXPECT_THROW(spec_from_json(j), config_error);
  j = spec_to_json(small_spec());
  j.erase("b_grid");
  EXPECT_THROW(spec_from_json(j), config_error);
  j = spec_to_json(small_spec());
  j["policies"] = nlohmann::json::array();
  EXPECT_THROW(spec_from_json(j), config_error);
  j = spec_to_json(small_spec());
  j["policies"] = {"greedy"};
  EXPECT_THROW(spec_from_json(j), config_error);
  j = spec_to_json(small_spec());
  j["K"] = "eight";
  EXPECT_THROW(spec_from_json(j), config_error);
  EXPECT_THROW(spec_from_json(nlohmann::json::array()), config_error);
}

TEST(Config, LoadFromFile) {
  const auto path = temp_path("spec.json");
  {
    std::ofstream f(path);
    f << R"({"K": 4, "mu": 0.5, "lambda": 0.1, "b_grid": [1, 2], "trials": 10, "policies": ["proposed"]})";
  }
  const auto s = load_spec(path);
  EXPECT_EQ(s.K, 4);
  EXPECT_EQ(s.policies, std::vector<Policy>{Policy::Proposed});
  {
    std::ofstream f(path);
    f << "{not json";
  }
  EXPECT_THROW(load_spec(path), config_error);
  std::filesystem::remove(path);
  EXPECT_THROW(load_spec(path), io_error);
}

TEST(Matched, CurvesAndSavings) {
  auto row = [](const char* pol, double b, double p, double t) {
    SummaryRow r;
    r.policy = pol;
    r.b = b;
    r.p_fa = p;
    r.mean_tau_tilde = t;
    return r;
  };
  // Candidate is uniformly 25% faster than the baseline at every P_FA.
  std::vector<SummaryRow> rows{row("a", 1, 0.3, 75), row("a", 2, 0.1, 150), row("a", 3, 0.01, 300),
                               row("b", 1, 0.3, 100), row("b", 2, 0.1, 200), row("b", 3, 0.01, 400)};
  const auto m = matched_savings(rows, "a", "b", 0.01, 0.2);
  ASSERT_TRUE(m.valid);
  EXPECT_NEAR(m.mean, 0.25, 1e-12);
  EXPECT_NEAR(m.min, 0.25, 1e-12);
  EXPECT_EQ(m.points, 50);
  // Noise that breaks monotonicity is pooled.
  const auto c = monotone_curve({row("a", 1, 0.3, 75), row("a", 2, 0.32, 150), row("a", 3, 0.01, 300)}, "a");
  for (std::size_t i = 1; i < c.size(); ++i) EXPECT_LE(c[i].p_fa, c[i - 1].p_fa);
  EXPECT_FALSE(matched_savings(rows, "a", "missing", 0.01, 0.2).valid);
}

TEST(Plot, SvgIsWellFormed) {
  const auto rows = run_experiment(small_spec(), 1);
  const std::string svg = render_svg(rows);
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("proposed"), std::string::npos);
  EXPECT_NE(svg.find("round_robin"), std::string::npos);
  EXPECT_EQ(detail::xml_escape("a<b&\"c\">"), "a&lt;b&amp;&quot;c&quot;&gt;");
  EXPECT_THROW(render_svg({}), domain_error);
}
