// anomsearch: command-line front end for the simulation harness, bound
// calculators and Bayesian threshold solver.
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "anomsearch/anomsearch.hpp"
#include "anomsearch/config.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

using anomsearch::ExperimentSpec;
using nlohmann::json;

void write_rows(const std::vector<anomsearch::SummaryRow>& rows, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << anomsearch::to_csv(rows);
    std::cout.flush();
  } else {
    anomsearch::emit_csv(rows, out);
  }
}

void print_summary(const std::vector<anomsearch::SummaryRow>& rows) {
  const auto savings = anomsearch::matched_savings(rows, "proposed", "round_robin", 0.0, 1.0);
  if (savings.valid)
    std::cerr << "matched-P_FA delay savings of proposed over round_robin: mean " << savings.mean * 100.0
              << "% over P_FA in [" << savings.p_lo << ", " << savings.p_hi << "]\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online anomaly search with switching delays: simulation and bounds"};
  app.require_subcommand(1);
  unsigned threads = anomsearch::default_thread_count();
  app.add_option("--threads", threads, std::string("worker threads (default from ") + anomsearch::kThreadsEnvVar + ")")
      ->check(CLI::PositiveNumber);

  // simulate
  auto* sim = app.add_subcommand("simulate", "run an experiment described by a JSON config");
  std::string config_path, sim_out, sim_plot;
  std::optional<std::int64_t> sim_trials;
  std::optional<std::uint64_t> sim_seed;
  sim->add_option("--config", config_path, "experiment JSON")->required();
  sim->add_option("--trials", sim_trials, "override trial count");
  sim->add_option("--seed", sim_seed, "override base seed");
  sim->add_option("--out", sim_out, "CSV output path")->required();
  sim->add_option("--plot", sim_plot, "optional SVG plot path");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a preset over a linear threshold grid");
  std::string preset_name, sweep_out = "-", sweep_plot;
  double b_min = 0.0, b_max = 0.0;
  int b_steps = 5;
  std::optional<std::int64_t> sweep_trials;
  std::optional<std::uint64_t> sweep_seed;
  sweep->add_option("--preset", preset_name, "hard | easy | companion")
      ->required()
      ->check(CLI::IsMember({"hard", "easy", "companion"}));
  sweep->add_option("--b-min", b_min, "smallest threshold")->required();
  sweep->add_option("--b-max", b_max, "largest threshold")->required();
  sweep->add_option("--b-steps", b_steps, "number of thresholds")->required();
  sweep->add_option("--trials", sweep_trials, "override trial count");
  sweep->add_option("--seed", sweep_seed, "override base seed");
  sweep->add_option("--out", sweep_out, "CSV output path (default stdout)");
  sweep->add_option("--plot", sweep_plot, "optional SVG plot path");

  // bound
  auto* bound = app.add_subcommand("bound", "false-alarm bound from SPRT stage error rates");
  anomsearch::BoundParams bp;
  std::optional<double> alpha, beta, mu_opt;
  std::int64_t mc_trials = 0;
  std::uint64_t bound_seed = 1;
  bound->add_option("--K", bp.K, "number of channels")->required();
  bound->add_option("--lambda", bp.lambda, "switching cost")->required();
  bound->add_option("--delta", bp.Delta, "loss gap")->required();
  bound->add_option("--b", bp.b, "CUSUM threshold")->required();
  bound->add_option("--c-const", bp.C_const, "absolute constant C (default from the explicit regret constants)");
  auto* a_opt = bound->add_option("--alpha", alpha, "stage type-I error");
  auto* b_opt = bound->add_option("--beta", beta, "stage type-II error");
  auto* mc_opt = bound->add_option("--mc-trials", mc_trials, "estimate alpha, beta by Monte Carlo");
  bound->add_option("--mu", mu_opt, "Gaussian mean offset for --mc-trials (default: inverted from --delta)");
  bound->add_option("--seed", bound_seed, "seed for --mc-trials");
  a_opt->needs(b_opt);
  b_opt->needs(a_opt);
  mc_opt->excludes(a_opt)->excludes(b_opt);

  // thresholds
  auto* thr = app.add_subcommand("thresholds", "optimal thresholds of the Bayesian stream search");
  anomsearch::BayesConfig bc;
  bool sd_reading = false;
  std::optional<double> d01, d10;
  thr->add_option("--pi", bc.pi_hat, "prior target probability")->required();
  thr->add_option("--eps", bc.eps, "error tolerance")->required();
  thr->add_option("--lambda-bar", bc.lambda_bar, "mean switching cost")->required();
  thr->add_option("--d01", d01, "D(f0||f1) (default: N(0,1.5) nominal vs N(0,1) target)");
  thr->add_option("--d10", d10, "D(f1||f0)");
  thr->add_flag("--sd-reading", sd_reading, "read the nominal spread 1.5 as a standard deviation");

  // plot
  auto* plot = app.add_subcommand("plot", "render a summary CSV as SVG");
  std::string plot_in, plot_out;
  plot->add_option("--in", plot_in, "summary CSV")->required();
  plot->add_option("--out", plot_out, "SVG output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sim) {
      ExperimentSpec spec = anomsearch::load_spec(config_path);
      if (sim_trials) spec.trials = *sim_trials;
      if (sim_seed) spec.seed = *sim_seed;
      spec.validate();
      const auto rows = anomsearch::run_experiment(spec, threads);
      anomsearch::emit_csv(rows, sim_out);
      if (!sim_plot.empty()) anomsearch::emit_plot(rows, sim_plot);
      print_summary(rows);
    } else if (*sweep) {
      ExperimentSpec spec = anomsearch::preset(preset_name);
      spec.b_grid = anomsearch::linear_grid(b_min, b_max, b_steps);
      if (sweep_trials) spec.trials = *sweep_trials;
      if (sweep_seed) spec.seed = *sweep_seed;
      spec.validate();
      const auto rows = anomsearch::run_experiment(spec, threads);
      write_rows(rows, sweep_out);
      if (!sweep_plot.empty()) anomsearch::emit_plot(rows, sweep_plot);
      print_summary(rows);
    } else if (*bound) {
      bp.validate();
      json out;
      if (!alpha) {
        if (mc_trials < 1) throw anomsearch::domain_error("bound: give --alpha/--beta or --mc-trials");
        const double mu = mu_opt ? *mu_opt : anomsearch::mu_from_loss_gap(bp.Delta);
        const auto rates = anomsearch::sprt_error_rates(bp.b, mu, mc_trials, bound_seed, threads);
        alpha = rates.alpha;
        beta = rates.beta;
        out["mu"] = mu;
        out["mc_trials"] = mc_trials;
        out["alpha_ci"] = {rates.alpha_ci.low, rates.alpha_ci.high};
        out["beta_ci"] = {rates.beta_ci.low, rates.beta_ci.high};
      }
      const auto fab = anomsearch::false_alarm_bound(*alpha, *beta, bp);
      out["K"] = bp.K;
      out["lambda"] = bp.lambda;
      out["delta"] = bp.Delta;
      out["b"] = bp.b;
      out["c_const"] = fab.C_const;
      out["alpha"] = *alpha;
      out["beta"] = *beta;
      out["phi_1"] = anomsearch::solve_phi(1, bp);
      out["false_alarm_bound"] = fab.value;
      out["series_terms"] = fab.terms;
      out["truncation_error"] = fab.truncation_error;
      std::cout << out.dump(2) << '\n';
    } else if (*thr) {
      const auto pair = anomsearch::companion_pair(sd_reading);
      bc.D01 = d01.value_or(pair.d01());
      bc.D10 = d10.value_or(pair.d10());
      bc.validate();
      const auto th = anomsearch::optimal_thresholds(bc);
      json out{{"pi_hat", bc.pi_hat},     {"eps", bc.eps},         {"lambda_bar", bc.lambda_bar},
               {"d01", bc.D01},           {"d10", bc.D10},         {"delta_U", th.delta_U},
               {"gamma_U", th.gamma_U},   {"delta_L", th.delta_L}, {"gamma_L", th.gamma_L},
               {"error_bound", anomsearch::error_probability_bound(bc.pi_hat, th.delta_U)}};
      if (th.delta_L < 1.0) {
        const auto w = anomsearch::wald_maps(th);
        out["alpha"] = w.alpha;
        out["beta"] = w.beta;
        out["expected_streams"] = anomsearch::expected_streams_visited(bc.pi_hat, w.alpha, w.beta);
        out["cost"] = anomsearch::cost_C(th.delta_L, th.delta_U, bc);
      }
      std::cout << out.dump(2) << '\n';
    } else if (*plot) {
      anomsearch::emit_plot(anomsearch::read_csv(plot_in), plot_out);
    }
  } catch (const anomsearch::io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const anomsearch::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const anomsearch::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
