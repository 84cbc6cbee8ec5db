#pragma once

// Command implementations behind the `transmodel` executable. Kept apart
// from main() so the test suites can drive them without a subprocess.

#include <transmodel/error_density.hpp>
#include <transmodel/errors.hpp>
#include <transmodel/kernels.hpp>
#include <transmodel/profile_likelihood.hpp>
#include <transmodel/report_io.hpp>
#include <transmodel/simulation.hpp>
#include <transmodel/smoothing.hpp>
#include <transmodel/transforms.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace transmodel::cli {

enum class Command
{
  fit,
  simulate,
  theorem1,
  theorem2,
  curves
};

enum class OutputFormat
{
  csv,
  json
};

enum ExitCode : int
{
  exit_ok = 0,
  exit_usage = 1,
  exit_invalid_input = 2,
  exit_estimation_failure = 3,
  exit_check_failed = 4,
  exit_io_error = 5
};

struct RunConfig
{
  Command command = Command::simulate;
  std::string input;
  std::filesystem::path out_dir = ".";
  OutputFormat format = OutputFormat::csv;

  // Empty lists mean "the command's default".
  std::vector<int> models;
  std::vector<std::size_t> ns;
  std::vector<double> theta0s;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;

  GridSpec grid{};
  double h_const = 0.3;
  double silverman_const = 1.06;
  double trim = 0.9;
  BandwidthMode bandwidth_mode = BandwidthMode::paper;
  bool bandwidth_mode_set = false;
  SilvermanMode silverman_mode = SilvermanMode::per_replication;
  TruthLaw truth = TruthLaw::truncated;
  std::string kernel = "quartic";

  // fit only
  std::string family = "manly";
  std::optional<double> h, g, b;
  std::size_t density_points = 201;

  // theorem2 only
  double t = 0.0;
};

struct CommandResult
{
  int code = exit_ok;
  std::vector<std::filesystem::path> written;
  std::string message;
};

namespace detail {

inline void
write_text(const std::filesystem::path& path, const std::string& text, CommandResult& res)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  res.written.push_back(path);
}

inline void
write_table(const RunConfig& cfg, const std::string& stem, const CsvTable& table, CommandResult& res)
{
  if (cfg.format == OutputFormat::csv) {
    std::ostringstream os;
    table.write(os);
    write_text(cfg.out_dir / (stem + ".csv"), os.str(), res);
    return;
  }
  // Numeric cells become JSON numbers, parsed back from their 17-digit text.
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < table.header.size() && i < r.size(); ++i) {
      if (auto v = parse_double(r[i]); v && std::isfinite(*v))
        obj[table.header[i]] = *v;
      else
        obj[table.header[i]] = r[i];
    }
    rows.push_back(std::move(obj));
  }
  write_text(cfg.out_dir / (stem + ".json"), rows.dump(2) + "\n", res);
}

inline McConfig
base_mc_config(const RunConfig& cfg)
{
  if (!cfg.seed)
    throw invalid_input("--seed is required for simulation commands");
  McConfig mc;
  mc.seed = *cfg.seed;
  mc.grid = cfg.grid;
  mc.h_const = cfg.h_const;
  mc.silverman_const = cfg.silverman_const;
  mc.trim_fraction = cfg.trim;
  mc.kernel = kernel_from_name(cfg.kernel);
  mc.bandwidth_mode = cfg.bandwidth_mode;
  mc.silverman_mode = cfg.silverman_mode;
  mc.truth = cfg.truth;
  return mc;
}

template<class T>
std::vector<T>
or_default(const std::vector<T>& v, std::vector<T> fallback)
{
  return v.empty() ? std::move(fallback) : v;
}

} // namespace detail

//! Estimate θ and the error density from a two-column (x, y) file.
inline CommandResult
run_fit(const RunConfig& cfg)
{
  CommandResult res;
  const XyData data = read_xy_file(cfg.input);
  const Sample s = make_sample(data.xs, data.ys, cfg.trim);
  const TransformFamily family = family_from_name(cfg.family);
  const Kernel k = kernel_from_name(cfg.kernel);

  BandwidthSpec bw = BandwidthSpec::paper_rule(s.size(), cfg.h_const, cfg.silverman_const);
  if (cfg.h)
    bw.h = *cfg.h;
  if (cfg.g) {
    bw.rule = BandwidthRule::fixed;
    bw.g = *cfg.g;
    bw.b = cfg.b.value_or(*cfg.g);
  }
  transmodel::detail::require(bw.h > 0.0, "regression bandwidth must be positive");

  const FitResult fit = estimate_theta(s, family, cfg.grid, k, k, bw);
  const std::vector<double> eps = fit.used_residuals();
  double b = cfg.b.value_or(fit.bandwidths.b);
  if (!(b > 0.0))
    b = silverman_bandwidth(eps, cfg.silverman_const);
  const auto [lo, hi] = std::minmax_element(eps.begin(), eps.end());
  const DensityCurve curve =
    estimate_error_density(s, fit, k, b, linspace(*lo - b, *hi + b, std::max<std::size_t>(cfg.density_points, 2)));

  std::filesystem::create_directories(cfg.out_dir);
  CsvTable summary{ { "theta_hat", "objective", "h", "g", "b", "n", "n_used" }, {} };
  double best = -INFINITY;
  for (const auto& p : fit.objective_trace)
    if (p.theta == fit.theta_hat[0])
      best = p.objective;
  summary.rows.push_back({ fmt_double(fit.theta_hat[0]),
                           fmt_double(best),
                           fmt_double(fit.bandwidths.h),
                           fmt_double(fit.bandwidths.g),
                           fmt_double(b),
                           std::to_string(s.size()),
                           std::to_string(eps.size()) });
  detail::write_table(cfg, "theta_hat", summary, res);
  detail::write_table(cfg, "objective_trace", trace_table(fit), res);
  detail::write_table(cfg, "residuals", residual_table(s, fit), res);
  detail::write_table(cfg, "density", curve_table(curve), res);
  res.message = "theta_hat = " + fmt_double(fit.theta_hat[0]);
  return res;
}

//! Monte Carlo tables of θ̂ statistics and standardized density MSE.
inline CommandResult
run_simulate(const RunConfig& cfg)
{
  CommandResult res;
  McConfig mc = detail::base_mc_config(cfg);
  mc.replications = cfg.reps.value_or(100);
  CsvTable t1{ table1_header(), {} };
  CsvTable t2{ table2_header(), {} };
  for (int model : detail::or_default(cfg.models, { 1, 2, 3 }))
    for (std::size_t n : detail::or_default<std::size_t>(cfg.ns, { 50, 100 }))
      for (double theta0 : detail::or_default(cfg.theta0s, { 0.0, 0.5, 1.0 })) {
        mc.model = make_model(model, theta0);
        mc.n = n;
        const McReport rep = run_monte_carlo(mc);
        t1.rows.push_back(table1_row(rep));
        for (auto& row : table2_rows(rep))
          t2.rows.push_back(std::move(row));
      }
  std::filesystem::create_directories(cfg.out_dir);
  detail::write_table(cfg, "table1", t1, res);
  detail::write_table(cfg, "table2", t2, res);
  res.message = std::to_string(t1.rows.size()) + " cells simulated";
  return res;
}

//! Pointwise mean of the standardized density curve against N(0, 1).
inline CommandResult
run_curves(const RunConfig& cfg)
{
  CommandResult res;
  McConfig mc = detail::base_mc_config(cfg);
  mc.replications = cfg.reps.value_or(100);
  CsvTable out{ { "model", "n", "theta_o", "t", "mean_curve", "normal_reference" }, {} };
  for (int model : detail::or_default(cfg.models, { 1, 2, 3 }))
    for (std::size_t n : detail::or_default<std::size_t>(cfg.ns, { 100 }))
      for (double theta0 : detail::or_default(cfg.theta0s, { 0.0, 0.5, 1.0 })) {
        mc.model = make_model(model, theta0);
        mc.n = n;
        const McReport rep = run_monte_carlo(mc);
        for (std::size_t j = 0; j < rep.curve_points.size(); ++j)
          out.rows.push_back({ std::to_string(model),
                               std::to_string(n),
                               fmt_double(theta0),
                               fmt_double(rep.curve_points[j]),
                               fmt_double(rep.mean_curve[j]),
                               fmt_double(std_normal_pdf(rep.curve_points[j])) });
      }
  std::filesystem::create_directories(cfg.out_dir);
  detail::write_table(cfg, "figure1", out, res);
  return res;
}

inline CommandResult
run_theorem1(const RunConfig& cfg)
{
  CommandResult res;
  McConfig mc = detail::base_mc_config(cfg);
  mc.replications = cfg.reps.value_or(100);
  mc.model = make_model(detail::or_default(cfg.models, { 3 }).front(),
                        detail::or_default(cfg.theta0s, { 0.0 }).front());
  const Theorem1Summary sum = check_theorem1(mc, detail::or_default<std::size_t>(cfg.ns, { 50, 100, 200 }));
  CsvTable out{ { "n", "median_scaled_gap", "median_gap", "failures" }, {} };
  for (const auto& p : sum.profile)
    out.rows.push_back({ std::to_string(p.n),
                         fmt_double(p.median_scaled_gap),
                         fmt_double(p.median_gap),
                         std::to_string(p.failures) });
  std::filesystem::create_directories(cfg.out_dir);
  detail::write_table(cfg, "theorem1", out, res);
  res.message = sum.pass ? "scaled gap profile non-increasing: pass" : "scaled gap grows with n: FAIL";
  res.code = sum.pass ? exit_ok : exit_check_failed;
  return res;
}

inline CommandResult
run_theorem2(const RunConfig& cfg)
{
  CommandResult res;
  McConfig mc = detail::base_mc_config(cfg);
  if (!cfg.bandwidth_mode_set)
    mc.bandwidth_mode = BandwidthMode::undersmooth;
  mc.replications = cfg.reps.value_or(500);
  mc.n = detail::or_default<std::size_t>(cfg.ns, { 200 }).front();
  mc.model = make_model(detail::or_default(cfg.models, { 3 }).front(),
                        detail::or_default(cfg.theta0s, { 0.0 }).front());
  mc.normality_t = cfg.t;
  const Theorem2Summary sum = check_theorem2(mc);
  CsvTable out{ { "n", "replications", "t", "b", "mean_z", "var_z", "ks_distance", "failures", "pass" }, {} };
  out.rows.push_back({ std::to_string(sum.n),
                       std::to_string(sum.replications),
                       fmt_double(sum.t),
                       fmt_double(sum.b),
                       fmt_double(sum.stat.mean),
                       fmt_double(sum.stat.variance),
                       fmt_double(sum.stat.ks_distance),
                       std::to_string(sum.failures),
                       sum.pass ? "1" : "0" });
  std::filesystem::create_directories(cfg.out_dir);
  detail::write_table(cfg, "theorem2", out, res);
  res.message = sum.pass ? "normality check: pass" : "normality check: FAIL";
  res.code = sum.pass ? exit_ok : exit_check_failed;
  return res;
}

//! Dispatch with the exit-code contract: invalid input 2, estimation
//! failure 3, failed check 4, I/O trouble 5.
inline CommandResult
run(const RunConfig& cfg)
{
  try {
    switch (cfg.command) {
      case Command::fit:
        return run_fit(cfg);
      case Command::simulate:
        return run_simulate(cfg);
      case Command::theorem1:
        return run_theorem1(cfg);
      case Command::theorem2:
        return run_theorem2(cfg);
      case Command::curves:
        return run_curves(cfg);
    }
  } catch (const invalid_input& e) {
    return { exit_invalid_input, {}, std::string("invalid input: ") + e.what() };
  } catch (const estimation_failure& e) {
    return { exit_estimation_failure, {}, std::string("estimation failure: ") + e.what() };
  } catch (const std::exception& e) {
    return { exit_io_error, {}, std::string("error: ") + e.what() };
  }
  return { exit_usage, {}, "unknown command" };
}

} // namespace transmodel::cli
