#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"

namespace cli = atomdeconv::cli;

namespace {

void add_common_estimation_flags(CLI::App* cmd,
                                 cli::EstimateCommonOptions& options) {
  cmd->add_option("--data", options.data, "sample CSV (column 'z')")
      ->required();
  cmd->add_option("--noise", options.noise,
                  "noise law: gamma:k,theta or calib:file.csv")
      ->required();
  cmd->add_option("--kde-bandwidth", options.kde_bandwidth,
                  "Gaussian KDE bandwidth for calibration noise "
                  "(default: Scott's rule)");
  cmd->add_option("--nu", options.nu,
                  "decay exponent for calibration noise (default 2)");
  cmd->add_option("--beta", options.beta, "Lepskii penalty constant");
  cmd->add_option("--eps", options.eps, "smoothness grid spacing");
  cmd->add_option("--s-max", options.s_max, "top of the smoothness ladder");
  cmd->add_option("--a", options.a, "truncation/penalty log exponent");
  cmd->add_option("--quad-points", options.quad_points,
                  "quadrature nodes per integral (odd)");
  cmd->add_option("--threads", options.threads, "worker threads (0 = auto)");
  cmd->add_flag("--log10-transform", options.log10_transform,
                "apply log10 to observations, dropping nonpositive values");
  cmd->add_option("--out", options.out, "result JSON path")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive atomic deconvolution"};
  app.require_subcommand(1);

  cli::SimulateOptions simulate;
  CLI::App* sim = app.add_subcommand("simulate", "draw Z = U + A X samples");
  sim->add_option("--dataset", simulate.dataset, "1 or 2");
  sim->add_option("--gamma", simulate.gamma, "gamma parameter of the study");
  sim->add_option("--n", simulate.n, "sample size")->required();
  sim->add_option("--seed", simulate.seed, "RNG seed");
  sim->add_option("--p", simulate.p, "non-response weight P[A=0]");
  sim->add_option("--out", simulate.out, "output CSV path")->required();

  cli::EstimatePOptions est_p;
  CLI::App* ep = app.add_subcommand("estimate-p",
                                    "adaptive non-response weight estimate");
  add_common_estimation_flags(ep, est_p.common);
  ep->add_option("--subsample-curve", est_p.subsample_curve,
                 "CSV of p_hat on increasing sub-samples");

  cli::EstimateFOptions est_f;
  CLI::App* ef = app.add_subcommand("estimate-f",
                                    "adaptive response density estimate");
  add_common_estimation_flags(ef, est_f.common);
  ef->add_option("--known-p", est_f.known_p,
                 "skip the plug-in step and use this mixing weight");
  ef->add_option("--density", est_f.density_out, "density CSV path")
      ->required();
  ef->add_option("--posterior", est_f.posterior_out,
                 "posterior non-response CSV path");
  ef->add_option("--fit-check", est_f.fit_check_out,
                 "implied density-of-Z CSV path");
  ef->add_option("--x-points", est_f.x_points, "reconstruction grid size");

  cli::McStudyOptions mc;
  CLI::App* ms = app.add_subcommand("mc-study", "Monte-Carlo study harness");
  ms->add_option("--config", mc.config, "study config JSON")->required();
  ms->add_option("--out", mc.out, "results CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);
    }
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (*sim) {
      return cli::cmd_simulate(simulate);
    }
    if (*ep) {
      return cli::cmd_estimate_p(est_p);
    }
    if (*ef) {
      return cli::cmd_estimate_f(est_f);
    }
    return cli::cmd_mc_study(mc);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
