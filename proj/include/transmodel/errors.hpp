#pragma once

#include <stdexcept>
#include <string>

namespace transmodel {

//! Input outside the documented domain of an operation (bad θ, y ≤ 0 for
//! Box-Cox, malformed files, non-positive bandwidths, ...).
class invalid_input : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

//! Every kernel weight at the query point vanished; the regression estimate
//! is undefined there.
class empty_window : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! The estimator could not produce a value: all grid points had a -inf
//! objective, no observation survived trimming, or too many Monte Carlo
//! replications failed.
class estimation_failure : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void
require(bool cond, const std::string& what)
{
  if (!cond)
    throw invalid_input(what);
}

} // namespace detail

} // namespace transmodel
