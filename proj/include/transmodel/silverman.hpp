#pragma once

#include "errors.hpp"

#include <cmath>
#include <span>

namespace transmodel {

//! Sample standard deviation (divisor n - 1).
inline double
sample_std(std::span<const double> values)
{
  detail::require(values.size() >= 2, "standard deviation needs at least two values");
  double mean = 0.0;
  for (double v : values)
    mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values)
    ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

//! Silverman's rule of thumb, c·std·n^{-1/5} (c = 1.06 by default).
inline double
silverman_bandwidth(std::span<const double> values, double c = 1.06)
{
  const double sd = sample_std(values);
  if (!(sd > 0.0) || !std::isfinite(sd))
    throw invalid_input("Silverman bandwidth of degenerate (zero-variance) data");
  return c * sd * std::pow(static_cast<double>(values.size()), -0.2);
}

} // namespace transmodel
