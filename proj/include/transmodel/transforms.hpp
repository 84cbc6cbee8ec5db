#pragma once

#include "errors.hpp"

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace transmodel {

enum class Family
{
  manly,
  boxcox,
  identity
};

//! Transformation parameter. The built-in families are scalar; the vector
//! form keeps room for multi-parameter families.
using ThetaVector = std::vector<double>;

//! Parametric family y ↦ Λ_θ(y) of strictly increasing maps together with
//! the interval of admissible θ.
struct TransformFamily
{
  Family family = Family::manly;
  double theta_lo = -0.5;
  double theta_hi = 1.5;

  std::size_t dimension() const { return 1; }
};

inline TransformFamily
make_family(Family f)
{
  switch (f) {
    case Family::manly:
      return { Family::manly, -0.5, 1.5 };
    case Family::boxcox:
      return { Family::boxcox, -2.0, 2.0 };
    case Family::identity:
      return { Family::identity, -1e300, 1e300 };
  }
  return {};
}

inline TransformFamily
family_from_name(std::string_view name)
{
  if (name == "manly")
    return make_family(Family::manly);
  if (name == "boxcox")
    return make_family(Family::boxcox);
  if (name == "identity")
    return make_family(Family::identity);
  throw invalid_input("unknown transform family '" + std::string(name) + "'");
}

inline std::string_view
family_name(const TransformFamily& f)
{
  switch (f.family) {
    case Family::manly:
      return "manly";
    case Family::boxcox:
      return "boxcox";
    case Family::identity:
      return "identity";
  }
  return "unknown";
}

namespace detail {

// Below this |θ| the Manly and Box-Cox closed forms lose all precision and
// the Taylor series in θ is used instead.
inline constexpr double series_threshold = 1e-8;

inline double
scalar_theta(const TransformFamily& f, std::span<const double> theta)
{
  require(theta.size() == f.dimension(),
          "theta has dimension " + std::to_string(theta.size()) + ", family expects " +
            std::to_string(f.dimension()));
  const double t = theta[0];
  require(std::isfinite(t) && t >= f.theta_lo && t <= f.theta_hi,
          "theta " + std::to_string(t) + " outside the admissible interval of " +
            std::string(family_name(f)));
  return t;
}

inline double
boxcox_log(double y)
{
  require(y > 0.0, "Box-Cox transform requires y > 0, got " + std::to_string(y));
  return std::log(y);
}

} // namespace detail

//! Λ_θ(y).
inline double
transform(const TransformFamily& f, std::span<const double> theta, double y)
{
  const double t = detail::scalar_theta(f, theta);
  switch (f.family) {
    case Family::identity:
      return y;
    case Family::manly:
      if (std::abs(t) < detail::series_threshold)
        return y + t * y * y / 2.0 + t * t * y * y * y / 6.0;
      return std::expm1(t * y) / t;
    case Family::boxcox: {
      const double ly = detail::boxcox_log(y);
      if (std::abs(t) < detail::series_threshold)
        return ly + t * ly * ly / 2.0 + t * t * ly * ly * ly / 6.0;
      return std::expm1(t * ly) / t;
    }
  }
  return y;
}

//! ∂Λ_θ(y)/∂y, strictly positive.
inline double
transform_dy(const TransformFamily& f, std::span<const double> theta, double y)
{
  const double t = detail::scalar_theta(f, theta);
  switch (f.family) {
    case Family::identity:
      return 1.0;
    case Family::manly:
      return std::exp(t * y);
    case Family::boxcox:
      return std::exp((t - 1.0) * detail::boxcox_log(y));
  }
  return 1.0;
}

//! log ∂Λ_θ(y)/∂y, computed without forming the exponential.
inline double
log_transform_dy(const TransformFamily& f, std::span<const double> theta, double y)
{
  const double t = detail::scalar_theta(f, theta);
  switch (f.family) {
    case Family::identity:
      return 0.0;
    case Family::manly:
      return t * y;
    case Family::boxcox:
      return (t - 1.0) * detail::boxcox_log(y);
  }
  return 0.0;
}

//! ∂Λ_θ(y)/∂θ, returned with one entry per parameter.
inline ThetaVector
transform_dtheta(const TransformFamily& f, std::span<const double> theta, double y)
{
  const double t = detail::scalar_theta(f, theta);
  // d/dθ of (e^{θu} - 1)/θ, with limit u²/2 at θ = 0.
  // The closed form cancels badly for small θu, so sum u² Σ_k x^{k-2} (k-1)/k!
  // there instead (x = θu).
  auto manly_dtheta = [t](double u) {
    const double x = t * u;
    if (std::abs(x) < 0.5) {
      double term = 0.5, sum = 0.0; // x^{k-2}/k! at k = 2
      for (int k = 2; k < 24; ++k) {
        sum += term * (k - 1);
        term *= x / (k + 1);
      }
      return u * u * sum;
    }
    const double e = std::exp(x);
    return (x * e - e + 1.0) / (t * t);
  };
  switch (f.family) {
    case Family::identity:
      return { 0.0 };
    case Family::manly:
      return { manly_dtheta(y) };
    case Family::boxcox:
      return { manly_dtheta(detail::boxcox_log(y)) };
  }
  return { 0.0 };
}

//! Λ_θ^{-1}(z).
inline double
inverse_transform(const TransformFamily& f, std::span<const double> theta, double z)
{
  const double t = detail::scalar_theta(f, theta);
  switch (f.family) {
    case Family::identity:
      return z;
    case Family::manly:
    case Family::boxcox: {
      double u;
      if (std::abs(t) < detail::series_threshold) {
        u = z - t * z * z / 2.0 + t * t * z * z * z / 3.0;
      } else {
        const double arg = t * z;
        detail::require(arg > -1.0,
                        "z = " + std::to_string(z) + " outside the range of the transform at theta " +
                          std::to_string(t));
        u = std::log1p(arg) / t;
      }
      return f.family == Family::manly ? u : std::exp(u);
    }
  }
  return z;
}

inline double
transform(const TransformFamily& f, double theta, double y)
{
  return transform(f, std::span<const double>(&theta, 1), y);
}

inline double
transform_dy(const TransformFamily& f, double theta, double y)
{
  return transform_dy(f, std::span<const double>(&theta, 1), y);
}

inline double
log_transform_dy(const TransformFamily& f, double theta, double y)
{
  return log_transform_dy(f, std::span<const double>(&theta, 1), y);
}

inline ThetaVector
transform_dtheta(const TransformFamily& f, double theta, double y)
{
  return transform_dtheta(f, std::span<const double>(&theta, 1), y);
}

inline double
inverse_transform(const TransformFamily& f, double theta, double z)
{
  return inverse_transform(f, std::span<const double>(&theta, 1), z);
}

} // namespace transmodel
