#include "cli_commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

int
main(int argc, char** argv)
{
  using namespace transmodel;
  using namespace transmodel::cli;

  RunConfig cfg;
  CLI::App app{ "Error-density estimation in semiparametric transformation models" };
  app.set_config("--config", "", "Flat key = value file; command-line flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  auto* fit = app.add_subcommand("fit", "Estimate theta and the error density from an (x, y) file");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo tables of theta-hat and density MSE");
  auto* theorem1 = app.add_subcommand("theorem1", "Feasible vs oracle density gap across n");
  auto* theorem2 = app.add_subcommand("theorem2", "Asymptotic normality check of the density estimate");
  auto* curves = app.add_subcommand("curves", "Mean standardized density curves vs N(0,1)");

  fit->add_option("input", cfg.input, "Two-column numeric file (x, y)")->required();
  fit->add_option("--family", cfg.family, "manly | boxcox | identity")
    ->check(CLI::IsMember({ "manly", "boxcox", "identity" }));
  fit->set_help_flag("--help", "Print this help message and exit");
  fit->add_option("--h", cfg.h, "Regression bandwidth (default h-const * n^-1/5)");
  fit->add_option("--g", cfg.g, "Fixed likelihood density bandwidth (default Silverman per theta)");
  fit->add_option("--b", cfg.b, "Final density bandwidth (default Silverman)");
  fit->add_option("--points", cfg.density_points, "Density curve resolution");
  theorem2->add_option("--t", cfg.t, "Evaluation point");

  std::map<std::string, BandwidthMode> bw_modes{ { "paper", BandwidthMode::paper },
                                                 { "undersmooth", BandwidthMode::undersmooth } };
  std::map<std::string, SilvermanMode> sv_modes{ { "per-replication", SilvermanMode::per_replication },
                                                 { "pooled", SilvermanMode::pooled } };
  std::map<std::string, TruthLaw> truths{ { "truncated", TruthLaw::truncated }, { "normal", TruthLaw::normal } };
  std::map<std::string, OutputFormat> formats{ { "csv", OutputFormat::csv }, { "json", OutputFormat::json } };

  app.add_option("--model", cfg.models, "Simulation model(s) 1, 2, 3")->check(CLI::Range(1, 3));
  app.add_option("--n", cfg.ns, "Sample size(s)");
  app.add_option("--theta0", cfg.theta0s, "True theta value(s)");
  app.add_option("--reps", cfg.reps, "Monte Carlo replications");
  app.add_option("--seed", cfg.seed, "Root RNG seed (required for simulation commands)");
  app.add_option("--grid-lo", cfg.grid.lo, "Theta grid lower end")->capture_default_str();
  app.add_option("--grid-hi", cfg.grid.hi, "Theta grid upper end")->capture_default_str();
  app.add_option("--grid-step", cfg.grid.step, "Theta grid step")->capture_default_str();
  app.add_option("--h-const", cfg.h_const, "h = h-const * n^-1/5")->capture_default_str();
  app.add_option("--silverman-const", cfg.silverman_const, "Silverman constant")->capture_default_str();
  app.add_option("--trim", cfg.trim, "Central covariate fraction kept in the likelihood")
    ->check(CLI::Range(0.0, 1.0))
    ->capture_default_str();
  auto* bw_opt = app.add_option("--bandwidth-mode", cfg.bandwidth_mode, "paper | undersmooth")
                   ->transform(CLI::CheckedTransformer(bw_modes, CLI::ignore_case));
  app.add_option("--silverman-mode", cfg.silverman_mode, "per-replication | pooled")
    ->transform(CLI::CheckedTransformer(sv_modes, CLI::ignore_case));
  app.add_option("--truth", cfg.truth, "truncated | normal")->transform(CLI::CheckedTransformer(truths, CLI::ignore_case));
  app.add_option("--kernel", cfg.kernel, "quartic | epanechnikov | gaussian_trunc")
    ->check(CLI::IsMember({ "quartic", "epanechnikov", "gaussian_trunc" }));
  app.add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
  app.add_option("--format", cfg.format, "csv | json")->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  cfg.bandwidth_mode_set = bw_opt->count() > 0;
  if (*fit)
    cfg.command = Command::fit;
  else if (*simulate)
    cfg.command = Command::simulate;
  else if (*theorem1)
    cfg.command = Command::theorem1;
  else if (*theorem2)
    cfg.command = Command::theorem2;
  else if (*curves)
    cfg.command = Command::curves;

  const CommandResult res = run(cfg);
  for (const auto& p : res.written)
    std::cout << "wrote " << p.string() << '\n';
  if (!res.message.empty())
    (res.code == exit_ok ? std::cout : std::cerr) << res.message << '\n';
  return res.code;
}
