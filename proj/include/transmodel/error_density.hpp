#pragma once

#include "errors.hpp"
#include "kernels.hpp"
#include "profile_likelihood.hpp"
#include "silverman.hpp"
#include "smoothing.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace transmodel {

enum class CurveKind
{
  feasible,
  oracle,
  standardized
};

struct DensityCurve
{
  std::vector<double> ts;
  std::vector<double> values;
  double bandwidth = 0.0;
  CurveKind kind = CurveKind::feasible;
};

//! Trapezoid rule over the curve's own grid.
inline double
trapezoid_mass(const DensityCurve& c)
{
  double mass = 0.0;
  for (std::size_t i = 1; i < c.ts.size(); ++i)
    mass += 0.5 * (c.ts[i] - c.ts[i - 1]) * (c.values[i] + c.values[i - 1]);
  return mass;
}

//! n equally spaced points covering [lo, hi].
inline std::vector<double>
linspace(double lo, double hi, std::size_t n)
{
  detail::require(n >= 2 && lo < hi, "linspace needs n >= 2 and lo < hi");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  out.back() = hi;
  return out;
}

namespace detail {

inline DensityCurve
kde_curve(std::span<const double> values,
          const Kernel& k,
          double b,
          std::span<const double> ts,
          CurveKind kind)
{
  const KdeEvaluator density(values, k, b);
  DensityCurve c;
  c.ts.assign(ts.begin(), ts.end());
  c.values = density(ts);
  c.bandwidth = b;
  c.kind = kind;
  return c;
}

inline std::vector<double>
checked_used_residuals(const Sample& s, const FitResult& fit)
{
  require(fit.residuals_at_theta_hat.size() == s.size() && fit.used_mask.size() == s.size(),
          "fit does not belong to this sample");
  std::vector<double> eps = fit.used_residuals();
  if (eps.empty())
    throw estimation_failure("no residual survived trimming");
  return eps;
}

} // namespace detail

//! Feasible error-density estimate: KDE of the fitted residuals ε̂_i(θ̂) of
//! the trimmed observations.
inline DensityCurve
estimate_error_density(const Sample& s,
                       const FitResult& fit,
                       const Kernel& k3,
                       double b,
                       std::span<const double> ts)
{
  const auto eps = detail::checked_used_residuals(s, fit);
  return detail::kde_curve(eps, k3, b, ts, CurveKind::feasible);
}

//! Density of the residuals divided by a known error scale sigma.
inline DensityCurve
estimate_standardized_error_density(const Sample& s,
                                    const FitResult& fit,
                                    double sigma,
                                    const Kernel& k3,
                                    double b,
                                    std::span<const double> ts)
{
  detail::require(sigma > 0.0, "standardizing scale must be positive");
  auto eps = detail::checked_used_residuals(s, fit);
  for (double& e : eps)
    e /= sigma;
  return detail::kde_curve(eps, k3, b, ts, CurveKind::standardized);
}

//! Unfeasible estimator built from the true errors; only available when the
//! errors are known, i.e. in simulation.
inline DensityCurve
oracle_error_density(std::span<const double> true_errors,
                     const Kernel& k3,
                     double b,
                     std::span<const double> ts)
{
  return detail::kde_curve(true_errors, k3, b, ts, CurveKind::oracle);
}

//! c·n^{-1/(2q+1)}, the largest bandwidth rate with n·b^{2q+1} bounded.
inline double
undersmoothing_bandwidth(std::size_t n, double c, int q)
{
  detail::require(n > 0 && c > 0.0 && q > 0, "undersmoothing bandwidth needs n, c, q > 0");
  return c * std::pow(static_cast<double>(n), -1.0 / (2.0 * q + 1.0));
}

struct AsymptoticConstants
{
  double bias;     //!< b^q/q! · f^{(q)}(t) · ∫v^q K
  double variance; //!< f(t) · ∫K²; divide by n·b for the estimator variance
};

inline AsymptoticConstants
theorem2_constants(const Kernel& k3, double f_true_at_t, double f_q3_deriv_at_t, double b, int q3)
{
  detail::require(q3 == k3.order, "q3 must equal the kernel order");
  detail::require(std::isfinite(f_true_at_t) && std::isfinite(f_q3_deriv_at_t) && std::isfinite(b),
                  "asymptotic constants need finite inputs");
  const double bias =
    std::pow(b, q3) / std::tgamma(q3 + 1.0) * f_q3_deriv_at_t * kernel_moment(k3, q3);
  return { bias, f_true_at_t * kernel_roughness(k3) };
}

} // namespace transmodel
