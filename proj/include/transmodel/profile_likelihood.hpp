#pragma once

#include "errors.hpp"
#include "kernels.hpp"
#include "silverman.hpp"
#include "smoothing.hpp"
#include "transforms.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace transmodel {

//! Equally spaced θ grid lo, lo + step, ..., hi. lo == hi gives a single point.
struct GridSpec
{
  double lo = -0.5;
  double hi = 1.5;
  double step = 0.0625;

  std::vector<double> points() const
  {
    detail::require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi, "grid needs lo <= hi");
    detail::require(step > 0.0, "grid step must be positive");
    const double span = (hi - lo) / step;
    const double count = std::round(span);
    detail::require(std::abs(span - count) <= 1e-9, "grid step must divide hi - lo");
    const auto n = static_cast<std::size_t>(count) + 1;
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i)
      pts[i] = lo + static_cast<double>(i) * step;
    pts.back() = hi;
    return pts;
  }
};

// Residual densities at or below this value make the log-likelihood -inf.
inline constexpr double density_floor = 1e-12;

struct TracePoint
{
  double theta;
  double objective;
};

struct FitResult
{
  ThetaVector theta_hat;
  std::vector<TracePoint> objective_trace;
  std::vector<double> residuals_at_theta_hat;
  std::vector<bool> used_mask;
  BandwidthSpec bandwidths;

  std::vector<double> used_residuals() const
  {
    std::vector<double> out;
    for (std::size_t i = 0; i < residuals_at_theta_hat.size(); ++i)
      if (used_mask[i])
        out.push_back(residuals_at_theta_hat[i]);
    return out;
  }
};

//! Objective value together with the pieces it was built from.
struct PlEvaluation
{
  double objective = -std::numeric_limits<double>::infinity();
  Residuals residuals;
  double g = 0.0; //!< density bandwidth actually used (0 if undefined)
};

inline PlEvaluation
evaluate_pl(const Sample& s,
            const TransformFamily& f,
            std::span<const double> theta,
            const Kernel& k1,
            const Kernel& k2,
            const BandwidthSpec& bw)
{
  PlEvaluation ev;
  ev.residuals = residuals(s, f, theta, k1, bw.h);
  const std::vector<double> eps = ev.residuals.used_values();
  if (eps.empty())
    return ev;
  if (bw.rule == BandwidthRule::paper) {
    // A spread at rounding level of the transformed responses is no spread.
    double scale = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (ev.residuals.used[i])
        scale = std::max(scale, std::abs(transform(f, theta, s.ys[i])));
    if (eps.size() < 2 || !(sample_std(eps) > 1024.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, scale)))
      return ev;
    ev.g = silverman_bandwidth(eps, bw.silverman_const);
  } else if (bw.rule == BandwidthRule::tabulated) {
    ev.g = bw.g_at(theta[0]);
  } else {
    detail::require(bw.g > 0.0, "density bandwidth g must be positive");
    ev.g = bw.g;
  }
  const KdeEvaluator density(eps, k2, ev.g);
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!ev.residuals.used[i])
      continue;
    const double d = density(ev.residuals.values[i]);
    if (!(d > density_floor))
      return ev;
    total += std::log(d) + log_transform_dy(f, theta, s.ys[i]);
  }
  ev.objective = total;
  return ev;
}

//! Profile log-likelihood at θ, summed over the observations inside the
//! trim region. Returns -inf when some residual density falls to the floor.
inline double
pl_objective(const Sample& s,
             const TransformFamily& f,
             std::span<const double> theta,
             const Kernel& k1,
             const Kernel& k2,
             const BandwidthSpec& bw)
{
  return evaluate_pl(s, f, theta, k1, k2, bw).objective;
}

inline double
pl_objective(const Sample& s,
             const TransformFamily& f,
             double theta,
             const Kernel& k1,
             const Kernel& k2,
             const BandwidthSpec& bw)
{
  return pl_objective(s, f, std::span<const double>(&theta, 1), k1, k2, bw);
}

struct EstimateOptions
{
  //! Golden-section refinement of θ̂ between the neighbours of the grid
  //! argmax. Off by default: θ̂ then stays on the grid.
  bool polish = false;
  double polish_tol = 1e-6;
};

namespace detail {

// argmax over the trace; ties go to the point nearest the grid midpoint,
// then to the smaller θ.
inline std::size_t
grid_argmax(const std::vector<TracePoint>& trace, double midpoint)
{
  std::size_t best = trace.size();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double v = trace[i].objective;
    if (v == -std::numeric_limits<double>::infinity())
      continue;
    if (best == trace.size() || v > trace[best].objective) {
      best = i;
      continue;
    }
    if (v == trace[best].objective) {
      const double di = std::abs(trace[i].theta - midpoint);
      const double db = std::abs(trace[best].theta - midpoint);
      if (di < db || (di == db && trace[i].theta < trace[best].theta))
        best = i;
    }
  }
  return best;
}

} // namespace detail

//! Grid-search profile-likelihood estimate of θ.
inline FitResult
estimate_theta(const Sample& s,
               const TransformFamily& f,
               const GridSpec& grid,
               const Kernel& k1,
               const Kernel& k2,
               const BandwidthSpec& bw,
               const EstimateOptions& opts = {})
{
  const std::vector<double> pts = grid.points();
  detail::require(pts.front() >= f.theta_lo && pts.back() <= f.theta_hi,
                  "theta grid extends outside the admissible interval of the family");

  FitResult fit;
  fit.objective_trace.reserve(pts.size());
  for (double theta : pts)
    fit.objective_trace.push_back({ theta, pl_objective(s, f, theta, k1, k2, bw) });

  const std::size_t best = detail::grid_argmax(fit.objective_trace, 0.5 * (grid.lo + grid.hi));
  if (best == fit.objective_trace.size())
    throw estimation_failure("profile likelihood is -inf at every grid point");

  double theta_hat = fit.objective_trace[best].theta;
  if (opts.polish && pts.size() > 1) {
    auto objective = [&](double t) { return pl_objective(s, f, t, k1, k2, bw); };
    double a = pts[best == 0 ? 0 : best - 1];
    double b = pts[best + 1 == pts.size() ? best : best + 1];
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = objective(c), fd = objective(d);
    while (b - a > opts.polish_tol) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = objective(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = objective(d);
      }
    }
    const double cand = 0.5 * (a + b);
    if (objective(cand) > fit.objective_trace[best].objective)
      theta_hat = cand;
  }

  const PlEvaluation ev = evaluate_pl(s, f, std::span<const double>(&theta_hat, 1), k1, k2, bw);
  fit.theta_hat = { theta_hat };
  fit.residuals_at_theta_hat = ev.residuals.values;
  fit.used_mask = ev.residuals.used;
  fit.bandwidths = bw;
  if (bw.rule != BandwidthRule::fixed) {
    fit.bandwidths.g = ev.g;
    if (bw.rule == BandwidthRule::paper)
      fit.bandwidths.b = ev.g;
  }
  return fit;
}

} // namespace transmodel
