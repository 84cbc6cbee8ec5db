#pragma once

#include "error_density.hpp"
#include "errors.hpp"
#include "kernels.hpp"
#include "profile_likelihood.hpp"
#include "rng.hpp"
#include "silverman.hpp"
#include "smoothing.hpp"
#include "transforms.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace transmodel {

// ---------------------------------------------------------------------------
// Error law
// ---------------------------------------------------------------------------

inline constexpr double truncation_bound = 3.0;

inline double
std_normal_pdf(double t)
{
  return std::exp(-0.5 * t * t) * std::numbers::inv_sqrtpi / std::numbers::sqrt2;
}

inline double
std_normal_cdf(double t)
{
  return 0.5 * std::erfc(-t / std::numbers::sqrt2);
}

//! Standard normal conditioned on [-3, 3], by rejection.
template<class Rng>
double
draw_truncated_normal(Rng& rng)
{
  for (;;) {
    const double z = rng.normal();
    if (std::abs(z) <= truncation_bound)
      return z;
  }
}

enum class TruthLaw
{
  truncated, //!< standard normal restricted to [-3, 3]
  normal     //!< untruncated standard normal
};

//! Derivative of order q of the reference error density at t.
inline double
truth_density_deriv(TruthLaw law, int q, double t)
{
  if (law == TruthLaw::truncated && std::abs(t) > truncation_bound)
    return 0.0;
  // φ^{(q)}(t) = (-1)^q He_q(t) φ(t)
  double he_prev = 1.0, he = t;
  if (q == 0)
    he = 1.0;
  for (int k = 2; k <= q; ++k) {
    const double next = t * he - (k - 1) * he_prev;
    he_prev = he;
    he = next;
  }
  double v = (q % 2 == 0 ? 1.0 : -1.0) * he * std_normal_pdf(t);
  if (law == TruthLaw::truncated)
    v /= std::erf(truncation_bound / std::numbers::sqrt2);
  return v;
}

inline double
truth_density(TruthLaw law, double t)
{
  return truth_density_deriv(law, 0, t);
}

// ---------------------------------------------------------------------------
// Data-generating models
// ---------------------------------------------------------------------------

//! Λ_{θo}(Y) = b0 + b1 X² + b2 sin(πX) + σ_e ε with X ~ U[-0.5, 0.5] and
//! ε a standard normal truncated to [-3, 3].
struct SimModel
{
  int model_id = 1;
  double b0 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double sigma_e = 1.0;
  double theta_o = 0.0;

  double m(double x) const { return b0 + b1 * x * x + b2 * std::sin(std::numbers::pi * x); }
};

inline SimModel
make_model(int model_id, double theta_o)
{
  SimModel mdl;
  mdl.model_id = model_id;
  mdl.theta_o = theta_o;
  switch (model_id) {
    case 1:
      mdl.b1 = 5.0, mdl.b2 = 2.0, mdl.sigma_e = 1.5;
      break;
    case 2:
      mdl.b1 = 3.5, mdl.b2 = 1.5, mdl.sigma_e = 1.0;
      break;
    case 3:
      mdl.b1 = 2.5, mdl.b2 = 1.0, mdl.sigma_e = 0.5;
      break;
    default:
      throw invalid_input("model id must be 1, 2 or 3, got " + std::to_string(model_id));
  }
  mdl.b0 = 3.0 * mdl.sigma_e + mdl.b2;
  return mdl;
}

//! Smallest value of m(x) + σ_e ε over the design region, scanned on a grid.
inline double
min_transformed_response(const SimModel& mdl)
{
  double lo = INFINITY;
  for (int i = 0; i <= 1000; ++i)
    lo = std::min(lo, mdl.m(-0.5 + i / 1000.0));
  return lo - truncation_bound * mdl.sigma_e;
}

struct GeneratedSample
{
  Sample sample;
  //! Λ_{θo}(Y_i) - m(X_i), i.e. σ_e·ε_i up to rounding.
  std::vector<double> errors;
};

template<class Rng>
GeneratedSample
generate_sample(const SimModel& mdl, std::size_t n, Rng& rng, double trim_fraction = 0.9)
{
  detail::require(n >= 2, "sample size must be at least 2");
  const TransformFamily manly = make_family(Family::manly);
  std::vector<double> xs(n), ys(n), errors(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = rng.uniform(-0.5, 0.5);
    const double z = mdl.m(xs[i]) + mdl.sigma_e * draw_truncated_normal(rng);
    try {
      ys[i] = inverse_transform(manly, mdl.theta_o, z);
    } catch (const invalid_input& e) {
      throw std::logic_error(std::string("model violates its positivity construction: ") + e.what());
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    errors[i] = transform(manly, mdl.theta_o, ys[i]) - mdl.m(xs[i]);
  return { make_sample(std::move(xs), std::move(ys), trim_fraction), std::move(errors) };
}

// ---------------------------------------------------------------------------
// Monte Carlo harness
// ---------------------------------------------------------------------------

enum class BandwidthMode
{
  paper,      //!< b = Silverman over the standardized residuals
  undersmooth //!< b = silverman_const · n^{-1/(2q+1)}, data independent
};

enum class SilvermanMode
{
  per_replication, //!< g, b from each replication's own residuals
  pooled           //!< g, b from the residual std averaged over replications
};

struct McConfig
{
  SimModel model = make_model(1, 0.0);
  std::size_t n = 100;
  std::size_t replications = 100;
  std::uint64_t seed = 0;
  GridSpec grid{};
  std::vector<double> eval_points{ -1.0, 0.0, 1.0 };
  //! Grid for the mean curve and the feasible-vs-oracle sup distance.
  std::vector<double> curve_points = linspace(-3.0, 3.0, 121);
  double h_const = 0.3;
  double silverman_const = 1.06;
  double trim_fraction = 0.9;
  Kernel kernel = make_kernel(KernelShape::quartic);
  BandwidthMode bandwidth_mode = BandwidthMode::paper;
  SilvermanMode silverman_mode = SilvermanMode::per_replication;
  TruthLaw truth = TruthLaw::truncated;
  double normality_t = 0.0;
  //! Multiplies the final density bandwidth b (1 = the rule's value).
  double b_scale = 1.0;
  double max_failure_fraction = 0.1;
  //! Worker threads; 0 picks TRANSMODEL_THREADS or the hardware count.
  unsigned threads = 0;
};

struct ReplicationRecord
{
  std::size_t index = 0;
  bool failed = false;
  double theta_hat = NAN;
  std::size_t n_used = 0;
  double h = NAN;
  double g = NAN;
  double b = NAN;
  double residual_std = NAN;              //!< std of the raw trimmed residuals at θ̂
  std::vector<double> density_at_eval;    //!< standardized feasible estimate at eval_points
  std::vector<double> curve;              //!< standardized feasible estimate at curve_points
  double oracle_gap = NAN;                //!< sup over curve_points of |f̂ - f̃|
  double scaled_oracle_gap = NAN;         //!< √(n_used·b)·oracle_gap
  double z_stat = NAN;                    //!< standardized asymptotic-normality statistic
};

struct ThetaStats
{
  double mean = NAN;
  double std = NAN;
  double mse = NAN;
};

struct PointMse
{
  double t;
  double mse;
};

struct NormalityStat
{
  double mean = NAN;
  double variance = NAN;
  double ks_distance = NAN;
};

struct McReport
{
  SimModel model;
  std::size_t n = 0;
  std::size_t replications = 0;
  std::size_t failures = 0;
  ThetaStats theta_stats;
  std::vector<PointMse> density_mse;
  std::vector<double> curve_points;
  std::vector<double> mean_curve;
  std::vector<double> oracle_gap;
  NormalityStat normality_stat;
  std::vector<ReplicationRecord> per_replication;
};

inline unsigned
worker_count(unsigned requested)
{
  unsigned n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("TRANSMODEL_THREADS")) {
      try {
        n = static_cast<unsigned>(std::stoul(env));
      } catch (const std::exception&) {
        n = 0;
      }
    }
  }
  if (n == 0)
    n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

//! Kolmogorov-Smirnov distance between the empirical law of `values` and
//! N(0, 1).
inline double
ks_distance_to_normal(std::vector<double> values)
{
  std::sort(values.begin(), values.end());
  const double r = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double cdf = std_normal_cdf(values[i]);
    d = std::max({ d, (i + 1) / r - cdf, cdf - i / r });
  }
  return d;
}

namespace detail {

inline double
median(std::vector<double> v)
{
  require(!v.empty(), "median of empty data");
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

template<class Body>
void
parallel_for(std::size_t count, unsigned threads, Body&& body)
{
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{ 0 };
  auto work = [&] {
    for (std::size_t r = next++; r < count; r = next++) {
      try {
        body(r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const auto workers = std::min<std::size_t>(worker_count(threads), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back(work);
  }
  for (const auto& e : errors)
    if (e)
      std::rethrow_exception(e);
}

inline GeneratedSample
replication_sample(const McConfig& cfg, std::size_t r)
{
  RngStream rng(cfg.seed, r);
  return generate_sample(cfg.model, cfg.n, rng, cfg.trim_fraction);
}

// Std of the trimmed residuals at every grid θ (NaN where undefined); the
// pilot pass of the pooled bandwidth mode.
inline std::vector<double>
residual_std_profile(const McConfig& cfg, std::size_t r, std::span<const double> thetas)
{
  const GeneratedSample gen = replication_sample(cfg, r);
  const TransformFamily manly = make_family(Family::manly);
  const double h = cfg.h_const * std::pow(static_cast<double>(cfg.n), -0.2);
  std::vector<double> out;
  out.reserve(thetas.size());
  for (double theta : thetas) {
    const auto eps = residuals(gen.sample, manly, theta, cfg.kernel, h).used_values();
    out.push_back(eps.size() >= 2 ? sample_std(eps) : NAN);
  }
  return out;
}

struct FittedReplication
{
  ReplicationRecord rec;
  std::vector<double> eps;      // standardized trimmed residuals at θ̂
  std::vector<double> true_eps; // standardized true errors, same observations
};

inline FittedReplication
fit_replication(const McConfig& cfg, std::size_t r, const BandwidthSpec& bw)
{
  FittedReplication out;
  ReplicationRecord& rec = out.rec;
  rec.index = r;
  const GeneratedSample gen = replication_sample(cfg, r);
  const Sample& s = gen.sample;

  FitResult fit;
  try {
    fit = estimate_theta(s, make_family(Family::manly), cfg.grid, cfg.kernel, cfg.kernel, bw);
  } catch (const estimation_failure&) {
    rec.failed = true;
    return out;
  }
  rec.theta_hat = fit.theta_hat[0];
  rec.h = fit.bandwidths.h;
  rec.g = fit.bandwidths.g;

  const double sigma = cfg.model.sigma_e;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!fit.used_mask[i])
      continue;
    out.eps.push_back(fit.residuals_at_theta_hat[i] / sigma);
    out.true_eps.push_back(gen.errors[i] / sigma);
  }
  rec.n_used = out.eps.size();
  if (out.eps.size() < 2 || !(sample_std(out.eps) > 0.0)) {
    rec.failed = true;
    return out;
  }
  rec.residual_std = sample_std(out.eps) * sigma;
  return out;
}

inline void
estimate_densities(const McConfig& cfg, FittedReplication& fr, double b)
{
  ReplicationRecord& rec = fr.rec;
  rec.b = b;
  const KdeEvaluator feasible(fr.eps, cfg.kernel, b);
  const KdeEvaluator oracle(fr.true_eps, cfg.kernel, b);
  rec.density_at_eval = feasible(cfg.eval_points);
  rec.curve = feasible(cfg.curve_points);
  double gap = 0.0;
  for (std::size_t j = 0; j < cfg.curve_points.size(); ++j)
    gap = std::max(gap, std::abs(rec.curve[j] - oracle(cfg.curve_points[j])));
  rec.oracle_gap = gap;
  const double root_nb = std::sqrt(static_cast<double>(rec.n_used) * b);
  rec.scaled_oracle_gap = root_nb * gap;

  const double t = cfg.normality_t;
  const double f_t = truth_density(cfg.truth, t);
  const auto c = theorem2_constants(
    cfg.kernel, f_t, truth_density_deriv(cfg.truth, cfg.kernel.order, t), b, cfg.kernel.order);
  rec.z_stat = c.variance > 0.0 ? root_nb * (feasible(t) - (f_t + c.bias)) / std::sqrt(c.variance) : NAN;
}

} // namespace detail

//! Replications are independent units keyed by index; aggregation always
//! runs in index order, so the report does not depend on thread count.
inline McReport
run_monte_carlo(const McConfig& cfg)
{
  detail::require(cfg.replications >= 1, "at least one replication is required");
  detail::require(cfg.n >= 10, "Monte Carlo sample size must be at least 10");
  detail::require(cfg.b_scale > 0.0, "bandwidth scale must be positive");
  detail::require(!cfg.curve_points.empty(), "curve grid must be nonempty");
  const std::size_t R = cfg.replications;
  const double n_rate = std::pow(static_cast<double>(cfg.n), -0.2);
  const bool pooled = cfg.silverman_mode == SilvermanMode::pooled;

  BandwidthSpec bw = BandwidthSpec::paper_rule(cfg.n, cfg.h_const, cfg.silverman_const);
  if (pooled) {
    const std::vector<double> thetas = cfg.grid.points();
    std::vector<std::vector<double>> profiles(R);
    detail::parallel_for(R, cfg.threads, [&](std::size_t r) {
      profiles[r] = detail::residual_std_profile(cfg, r, thetas);
    });
    bw.rule = BandwidthRule::tabulated;
    for (std::size_t k = 0; k < thetas.size(); ++k) {
      double sum = 0.0;
      std::size_t cnt = 0;
      for (const auto& p : profiles)
        if (std::isfinite(p[k]) && p[k] > 0.0) {
          sum += p[k];
          ++cnt;
        }
      if (cnt == 0)
        throw estimation_failure("no replication defines residuals at theta " + std::to_string(thetas[k]));
      bw.g_by_theta.push_back({ thetas[k], cfg.silverman_const * (sum / static_cast<double>(cnt)) * n_rate });
    }
  }

  std::vector<detail::FittedReplication> fits(R);
  detail::parallel_for(R, cfg.threads, [&](std::size_t r) { fits[r] = detail::fit_replication(cfg, r, bw); });

  double pooled_b = 0.0;
  if (pooled && cfg.bandwidth_mode == BandwidthMode::paper) {
    double sum = 0.0;
    std::size_t cnt = 0;
    for (const auto& fr : fits)
      if (!fr.rec.failed) {
        sum += sample_std(fr.eps);
        ++cnt;
      }
    pooled_b = cnt ? cfg.silverman_const * (sum / static_cast<double>(cnt)) * n_rate : 0.0;
  }
  detail::parallel_for(R, cfg.threads, [&](std::size_t r) {
    auto& fr = fits[r];
    if (fr.rec.failed)
      return;
    double b = 0.0;
    if (cfg.bandwidth_mode == BandwidthMode::undersmooth)
      b = undersmoothing_bandwidth(cfg.n, cfg.silverman_const, cfg.kernel.order);
    else if (pooled)
      b = pooled_b;
    else
      b = silverman_bandwidth(fr.eps, cfg.silverman_const);
    detail::estimate_densities(cfg, fr, b * cfg.b_scale);
  });

  McReport rep;
  rep.model = cfg.model;
  rep.n = cfg.n;
  rep.replications = R;
  rep.curve_points = cfg.curve_points;
  rep.per_replication.reserve(R);
  for (auto& fr : fits)
    rep.per_replication.push_back(std::move(fr.rec));

  std::vector<const ReplicationRecord*> ok;
  for (const auto& rec : rep.per_replication) {
    if (rec.failed)
      ++rep.failures;
    else
      ok.push_back(&rec);
  }
  if (static_cast<double>(rep.failures) > cfg.max_failure_fraction * static_cast<double>(R) || ok.empty())
    throw estimation_failure(std::to_string(rep.failures) + " of " + std::to_string(R) +
                             " replications failed");

  const double count = static_cast<double>(ok.size());
  const double theta_o = cfg.model.theta_o;
  double mean = 0.0, mse = 0.0;
  for (const auto* rec : ok) {
    mean += rec->theta_hat;
    mse += (rec->theta_hat - theta_o) * (rec->theta_hat - theta_o);
  }
  mean /= count;
  mse /= count;
  double ss = 0.0;
  for (const auto* rec : ok)
    ss += (rec->theta_hat - mean) * (rec->theta_hat - mean);
  rep.theta_stats = { mean, ok.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0, mse };

  for (std::size_t j = 0; j < cfg.eval_points.size(); ++j) {
    const double t = cfg.eval_points[j];
    const double truth = truth_density(cfg.truth, t);
    double acc = 0.0;
    for (const auto* rec : ok)
      acc += (rec->density_at_eval[j] - truth) * (rec->density_at_eval[j] - truth);
    rep.density_mse.push_back({ t, acc / count });
  }

  rep.mean_curve.assign(cfg.curve_points.size(), 0.0);
  for (const auto* rec : ok)
    for (std::size_t j = 0; j < rep.mean_curve.size(); ++j)
      rep.mean_curve[j] += rec->curve[j];
  for (double& v : rep.mean_curve)
    v /= count;

  std::vector<double> z;
  for (const auto* rec : ok) {
    rep.oracle_gap.push_back(rec->oracle_gap);
    z.push_back(rec->z_stat);
  }
  double zm = 0.0;
  for (double v : z)
    zm += v;
  zm /= count;
  double zv = 0.0;
  for (double v : z)
    zv += (v - zm) * (v - zm);
  rep.normality_stat = { zm, z.size() > 1 ? zv / (count - 1.0) : 0.0, ks_distance_to_normal(z) };
  return rep;
}

// ---------------------------------------------------------------------------
// Empirical checks of the asymptotic results
// ---------------------------------------------------------------------------

struct GapAtN
{
  std::size_t n;
  double median_scaled_gap; //!< median over replications of √(nb)·sup_t|f̂ - f̃|
  double median_gap;        //!< same without the √(nb) factor
  std::size_t failures;
};

struct Theorem1Summary
{
  std::vector<GapAtN> profile;
  double slack = 0.10;
  bool pass = false;
};

//! The feasible-minus-oracle distance should be negligible at the √(nb)
//! scale: its median may not grow by more than `slack` from one n to the next.
inline Theorem1Summary
check_theorem1(McConfig cfg, const std::vector<std::size_t>& ns = { 50, 100, 200 }, double slack = 0.10)
{
  Theorem1Summary out;
  out.slack = slack;
  for (std::size_t n : ns) {
    cfg.n = n;
    const McReport rep = run_monte_carlo(cfg);
    std::vector<double> scaled;
    for (const auto& rec : rep.per_replication)
      if (!rec.failed)
        scaled.push_back(rec.scaled_oracle_gap);
    out.profile.push_back({ n, detail::median(scaled), detail::median(rep.oracle_gap), rep.failures });
  }
  out.pass = true;
  for (std::size_t i = 1; i < out.profile.size(); ++i)
    if (out.profile[i].median_scaled_gap > (1.0 + slack) * out.profile[i - 1].median_scaled_gap)
      out.pass = false;
  return out;
}

struct Theorem2Summary
{
  std::size_t n = 0;
  std::size_t replications = 0;
  std::size_t failures = 0;
  double t = 0.0;
  double b = 0.0;
  NormalityStat stat;
  bool pass = false;
};

inline constexpr double theorem2_mean_bound = 0.25;
inline constexpr double theorem2_var_lo = 0.7;
inline constexpr double theorem2_var_hi = 1.3;
inline constexpr double theorem2_ks_bound = 0.08;

//! Distribution of √(nb)(f̂(t) - f̄(t)) / √(f(t)∫K²) across replications,
//! compared with N(0, 1). Requires the undersmoothing bandwidth mode.
inline Theorem2Summary
check_theorem2(const McConfig& cfg)
{
  detail::require(cfg.bandwidth_mode == BandwidthMode::undersmooth,
                  "the normality check needs the undersmoothing bandwidth mode");
  const McReport rep = run_monte_carlo(cfg);
  Theorem2Summary out;
  out.n = cfg.n;
  out.replications = cfg.replications;
  out.failures = rep.failures;
  out.t = cfg.normality_t;
  out.b = undersmoothing_bandwidth(cfg.n, cfg.silverman_const, cfg.kernel.order) * cfg.b_scale;
  out.stat = rep.normality_stat;
  out.pass = std::abs(out.stat.mean) <= theorem2_mean_bound && out.stat.variance >= theorem2_var_lo &&
             out.stat.variance <= theorem2_var_hi && out.stat.ks_distance <= theorem2_ks_bound;
  return out;
}

} // namespace transmodel
