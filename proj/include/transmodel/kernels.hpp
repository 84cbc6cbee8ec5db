#pragma once

#include "errors.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

namespace transmodel {

enum class KernelShape
{
  quartic,
  epanechnikov,
  gaussian_trunc
};

//! Symmetric kernel with compact support [-support_halfwidth, support_halfwidth].
//! `order` is the index of the first nonzero moment beyond the zeroth; it is
//! metadata used by the bias constants, not enforced.
struct Kernel
{
  KernelShape shape = KernelShape::quartic;
  double support_halfwidth = 1.0;
  int order = 2;
};

inline Kernel
make_kernel(KernelShape shape)
{
  return Kernel{ shape, 1.0, 2 };
}

inline Kernel
kernel_from_name(std::string_view name)
{
  if (name == "quartic")
    return make_kernel(KernelShape::quartic);
  if (name == "epanechnikov")
    return make_kernel(KernelShape::epanechnikov);
  if (name == "gaussian_trunc")
    return make_kernel(KernelShape::gaussian_trunc);
  throw invalid_input("unknown kernel '" + std::string(name) + "'");
}

inline std::string_view
kernel_name(const Kernel& k)
{
  switch (k.shape) {
    case KernelShape::quartic:
      return "quartic";
    case KernelShape::epanechnikov:
      return "epanechnikov";
    case KernelShape::gaussian_trunc:
      return "gaussian_trunc";
  }
  return "unknown";
}

namespace detail {

// Standard normal truncated to [-3, 3], rescaled onto [-1, 1].
inline constexpr double gauss_trunc_scale = 3.0;

inline double
gauss_trunc_norm()
{
  static const double c =
    gauss_trunc_scale * std::numbers::inv_sqrtpi / std::numbers::sqrt2 /
    std::erf(gauss_trunc_scale / std::numbers::sqrt2);
  return c;
}

inline double
eval_inside(KernelShape shape, double v)
{
  switch (shape) {
    case KernelShape::quartic: {
      const double u = 1.0 - v * v;
      return 0.9375 * u * u;
    }
    case KernelShape::epanechnikov:
      return 0.75 * (1.0 - v * v);
    case KernelShape::gaussian_trunc: {
      const double s = gauss_trunc_scale * v;
      return gauss_trunc_norm() * std::exp(-0.5 * s * s);
    }
  }
  return 0.0;
}

//! Gauss-Legendre rule on [-1, 1], nodes from Newton iteration on P_N.
template<int N>
struct GaussLegendre
{
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendre()
  {
    for (int i = 0; i < N; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= N; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = N * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16)
          break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  template<class F>
  double integrate(F&& f, double lo, double hi) const
  {
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    double sum = 0.0;
    for (int i = 0; i < N; ++i)
      sum += weights[i] * f(mid + half * nodes[i]);
    return half * sum;
  }
};

inline const GaussLegendre<64>&
gauss_legendre64()
{
  static const GaussLegendre<64> rule;
  return rule;
}

} // namespace detail

//! K(v); zero outside the support.
inline double
eval_kernel(const Kernel& k, double v)
{
  const double u = v / k.support_halfwidth;
  if (std::abs(u) > 1.0)
    return 0.0;
  return detail::eval_inside(k.shape, u) / k.support_halfwidth;
}

//! First or second derivative of K. At the support endpoints the one-sided
//! interior limit is returned; outside, zero.
inline double
eval_kernel_deriv(const Kernel& k, int order, double v)
{
  if (order != 1 && order != 2)
    throw invalid_input("kernel derivative order must be 1 or 2, got " +
                        std::to_string(order));
  const double a = k.support_halfwidth;
  const double u = v / a;
  if (std::abs(u) > 1.0)
    return 0.0;
  const double scale = order == 1 ? a * a : a * a * a;
  double d = 0.0;
  switch (k.shape) {
    case KernelShape::quartic:
      d = order == 1 ? -3.75 * u * (1.0 - u * u) : 0.9375 * (12.0 * u * u - 4.0);
      break;
    case KernelShape::epanechnikov:
      d = order == 1 ? -1.5 * u : -1.5;
      break;
    case KernelShape::gaussian_trunc: {
      constexpr double s2 = detail::gauss_trunc_scale * detail::gauss_trunc_scale;
      const double base = detail::eval_inside(k.shape, u);
      d = order == 1 ? -s2 * u * base : (s2 * s2 * u * u - s2) * base;
      break;
    }
  }
  return d / scale;
}

//! ∫ v^p K(v) dv over the support (64-node Gauss-Legendre, exact for the
//! polynomial shapes).
inline double
kernel_moment(const Kernel& k, int p)
{
  detail::require(p >= 0, "kernel moment order must be nonnegative");
  const double a = k.support_halfwidth;
  return detail::gauss_legendre64().integrate(
    [&](double v) { return std::pow(v, p) * eval_kernel(k, v); }, -a, a);
}

//! ∫ K(v)^2 dv, the roughness constant in the KDE variance.
inline double
kernel_roughness(const Kernel& k)
{
  const double a = k.support_halfwidth;
  return detail::gauss_legendre64().integrate(
    [&](double v) {
      const double kv = eval_kernel(k, v);
      return kv * kv;
    },
    -a,
    a);
}

} // namespace transmodel
