#pragma once

#include "errors.hpp"
#include "kernels.hpp"
#include "transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace transmodel {

struct Interval
{
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return x >= lo && x <= hi; }
};

//! Paired observations (X_i, Y_i) and the covariate region over which the
//! likelihood is accumulated. Observations outside `trim_region` still enter
//! the regression fits but not the likelihood or the density estimate.
struct Sample
{
  std::vector<double> xs;
  std::vector<double> ys;
  Interval trim_region;

  std::size_t size() const { return xs.size(); }
};

//! Type-7 (linear interpolation) quantile of unsorted data.
inline double
quantile(std::vector<double> values, double p)
{
  detail::require(!values.empty(), "quantile of empty data");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

//! Central `fraction` quantile range of the covariates.
inline Interval
central_quantile_range(std::span<const double> xs, double fraction)
{
  detail::require(fraction > 0.0 && fraction <= 1.0, "trim fraction must lie in (0, 1]");
  std::vector<double> v(xs.begin(), xs.end());
  const double tail = 0.5 * (1.0 - fraction);
  return { quantile(v, tail), quantile(v, 1.0 - tail) };
}

inline Sample
make_sample(std::vector<double> xs, std::vector<double> ys, Interval trim)
{
  detail::require(xs.size() == ys.size(), "xs and ys differ in length");
  detail::require(xs.size() >= 2, "a sample needs at least two observations");
  for (std::size_t i = 0; i < xs.size(); ++i)
    detail::require(std::isfinite(xs[i]) && std::isfinite(ys[i]),
                    "non-finite observation at index " + std::to_string(i));
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  detail::require(trim.lo <= trim.hi && trim.lo >= *mn && trim.hi <= *mx,
                  "trim region must be an interval inside [min(xs), max(xs)]");
  return Sample{ std::move(xs), std::move(ys), trim };
}

//! Sample trimmed to the central `trim_fraction` quantile range of xs.
inline Sample
make_sample(std::vector<double> xs, std::vector<double> ys, double trim_fraction = 0.9)
{
  detail::require(xs.size() >= 2, "a sample needs at least two observations");
  const Interval trim = central_quantile_range(xs, trim_fraction);
  return make_sample(std::move(xs), std::move(ys), trim);
}

enum class BandwidthRule
{
  fixed,
  //! h = h_const·n^{-1/5}; g and b from Silverman's rule on the residuals.
  paper,
  //! g looked up per grid θ in `g_by_theta` (pooled across samples).
  tabulated
};

struct ThetaBandwidth
{
  double theta;
  double g;
};

struct BandwidthSpec
{
  double h = 0.0; //!< regression bandwidth
  double g = 0.0; //!< density bandwidth inside the likelihood
  double b = 0.0; //!< final error-density bandwidth
  BandwidthRule rule = BandwidthRule::fixed;
  double h_const = 0.3;
  double silverman_const = 1.06;
  std::vector<ThetaBandwidth> g_by_theta;

  //! Density bandwidth to use at θ under the tabulated rule.
  double g_at(double theta) const
  {
    for (const auto& e : g_by_theta)
      if (std::abs(e.theta - theta) <= 1e-12)
        return e.g;
    throw invalid_input("no tabulated density bandwidth for theta " + std::to_string(theta));
  }

  static BandwidthSpec fixed(double h, double g, double b)
  {
    detail::require(h > 0.0 && g > 0.0 && b > 0.0, "bandwidths must be positive");
    return BandwidthSpec{ h, g, b, BandwidthRule::fixed };
  }

  //! h is fixed by n; g and b are left to be filled from residuals.
  static BandwidthSpec paper_rule(std::size_t n, double h_const = 0.3, double silverman_const = 1.06)
  {
    detail::require(n > 0 && h_const > 0.0 && silverman_const > 0.0,
                    "bandwidth constants must be positive");
    BandwidthSpec bw;
    bw.h = h_const * std::pow(static_cast<double>(n), -0.2);
    bw.rule = BandwidthRule::paper;
    bw.h_const = h_const;
    bw.silverman_const = silverman_const;
    return bw;
  }
};

//! Kernel density estimate over a fixed set of values; values are sorted
//! once so each evaluation only visits the points inside the kernel window.
class KdeEvaluator
{
public:
  KdeEvaluator(std::span<const double> values, const Kernel& k, double bw)
    : sorted_(values.begin(), values.end())
    , kernel_(k)
    , bw_(bw)
  {
    detail::require(!sorted_.empty(), "kde needs at least one value");
    detail::require(bw > 0.0 && std::isfinite(bw), "kde bandwidth must be positive");
    std::sort(sorted_.begin(), sorted_.end());
  }

  double operator()(double t) const
  {
    const double reach = bw_ * kernel_.support_halfwidth;
    auto first = std::lower_bound(sorted_.begin(), sorted_.end(), t - reach);
    auto last = std::upper_bound(first, sorted_.end(), t + reach);
    double sum = 0.0;
    for (auto it = first; it != last; ++it)
      sum += eval_kernel(kernel_, (*it - t) / bw_);
    return sum / (static_cast<double>(sorted_.size()) * bw_);
  }

  std::vector<double> operator()(std::span<const double> ts) const
  {
    std::vector<double> out(ts.size());
    std::transform(ts.begin(), ts.end(), out.begin(), [this](double t) { return (*this)(t); });
    return out;
  }

  double bandwidth() const { return bw_; }
  std::size_t size() const { return sorted_.size(); }

private:
  std::vector<double> sorted_;
  Kernel kernel_;
  double bw_;
};

//! (1/(n·bw)) Σ K((v_i - t)/bw).
inline double
kde(std::span<const double> values, const Kernel& k, double bw, double t)
{
  return KdeEvaluator(values, k, bw)(t);
}

//! Λ_θ(Y_j) sorted by covariate, shared by all regression evaluations at a
//! fixed θ.
class NwSmoother
{
public:
  NwSmoother(const Sample& s,
             const TransformFamily& f,
             std::span<const double> theta,
             const Kernel& k,
             double h)
    : kernel_(k)
    , h_(h)
  {
    detail::require(h > 0.0 && std::isfinite(h), "regression bandwidth must be positive");
    const std::size_t n = s.size();
    std::vector<double> z(n);
    for (std::size_t j = 0; j < n; ++j)
      z[j] = transform(f, theta, s.ys[j]);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return s.xs[a] != s.xs[b] ? s.xs[a] < s.xs[b] : z[a] < z[b];
    });
    xs_.reserve(n);
    zs_.reserve(n);
    for (auto j : order) {
      xs_.push_back(s.xs[j]);
      zs_.push_back(z[j]);
    }
  }

  //! m̂_θ(x), or nullopt when every weight vanishes.
  std::optional<double> try_at(double x) const
  {
    const double reach = h_ * kernel_.support_halfwidth;
    const auto first = std::lower_bound(xs_.begin(), xs_.end(), x - reach) - xs_.begin();
    const auto last = std::upper_bound(xs_.begin() + first, xs_.end(), x + reach) - xs_.begin();
    double num = 0.0, den = 0.0;
    for (auto j = first; j < last; ++j) {
      const double w = eval_kernel(kernel_, (xs_[j] - x) / h_);
      num += w * zs_[j];
      den += w;
    }
    if (den < 1e-300)
      return std::nullopt;
    return num / den;
  }

  double at(double x) const
  {
    if (auto m = try_at(x))
      return *m;
    throw empty_window("no observation inside the regression window at x = " + std::to_string(x));
  }

private:
  std::vector<double> xs_;
  std::vector<double> zs_;
  Kernel kernel_;
  double h_;
};

//! Nadaraya-Watson estimate of m_θ(x) = E[Λ_θ(Y) | X = x].
inline double
nw_regress(const Sample& s,
           const TransformFamily& f,
           std::span<const double> theta,
           const Kernel& k,
           double h,
           double x)
{
  return NwSmoother(s, f, theta, k, h).at(x);
}

inline double
nw_regress(const Sample& s, const TransformFamily& f, double theta, const Kernel& k, double h, double x)
{
  return nw_regress(s, f, std::span<const double>(&theta, 1), k, h, x);
}

struct Residuals
{
  std::vector<double> values; //!< ε̂_i(θ); NaN where the window was empty
  std::vector<bool> used;     //!< X_i in the trim region and a defined fit

  std::size_t used_count() const
  {
    return static_cast<std::size_t>(std::count(used.begin(), used.end(), true));
  }

  std::vector<double> used_values() const
  {
    std::vector<double> out;
    out.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
      if (used[i])
        out.push_back(values[i]);
    return out;
  }
};

//! ε̂_i(θ) = Λ_θ(Y_i) - m̂_θ(X_i); the fit at X_i uses the full sample,
//! observation i included.
inline Residuals
residuals(const Sample& s,
          const TransformFamily& f,
          std::span<const double> theta,
          const Kernel& k,
          double h)
{
  const NwSmoother smoother(s, f, theta, k, h);
  Residuals r;
  r.values.resize(s.size());
  r.used.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto m = smoother.try_at(s.xs[i]);
    r.values[i] = m ? transform(f, theta, s.ys[i]) - *m : std::nan("");
    r.used[i] = m.has_value() && s.trim_region.contains(s.xs[i]);
  }
  return r;
}

inline Residuals
residuals(const Sample& s, const TransformFamily& f, double theta, const Kernel& k, double h)
{
  return residuals(s, f, std::span<const double>(&theta, 1), k, h);
}

} // namespace transmodel
