#include "oracle/direct_transcription.hpp"

#include <transmodel/error_density.hpp>
#include <transmodel/profile_likelihood.hpp>

#include <gtest/gtest.h>

using namespace transmodel;

namespace {

struct Built
{
  Sample sample;
  BandwidthSpec bw;
};

Built
build(const oracle::Toy& d)
{
  return { make_sample(d.xs, d.ys, Interval{ d.trim_lo, d.trim_hi }), BandwidthSpec::fixed(d.h, d.g, d.b) };
}

const Kernel quartic = make_kernel(KernelShape::quartic);
const TransformFamily manly = make_family(Family::manly);

} // namespace

TEST(OracleEquivalence, DirectTranscriptionMatchesHighPrecisionScript)
{
  const auto toys = oracle::toys();
  const auto frozen = oracle::frozen();
  ASSERT_EQ(toys.size(), frozen.size());
  for (std::size_t k = 0; k < toys.size(); ++k) {
    EXPECT_NEAR(oracle::objective(toys[k], toys[k].theta), frozen[k].objective, 1e-12) << "toy " << k;
    EXPECT_NEAR(oracle::density(toys[k], toys[k].theta, toys[k].t), frozen[k].density, 1e-12) << "toy " << k;
  }
}

TEST(OracleEquivalence, ProfileLikelihoodObjective)
{
  const auto toys = oracle::toys();
  const auto frozen = oracle::frozen();
  for (std::size_t k = 0; k < toys.size(); ++k) {
    const auto [s, bw] = build(toys[k]);
    const double got = pl_objective(s, manly, toys[k].theta, quartic, quartic, bw);
    EXPECT_NEAR(got, oracle::objective(toys[k], toys[k].theta), 1e-10) << "toy " << k;
    EXPECT_NEAR(got, frozen[k].objective, 1e-10) << "toy " << k;
    for (double theta : { -0.5, -0.0625, 0.3125, 1.5 })
      EXPECT_NEAR(pl_objective(s, manly, theta, quartic, quartic, bw), oracle::objective(toys[k], theta), 1e-10)
        << "toy " << k << " theta " << theta;
  }
}

TEST(OracleEquivalence, FeasibleErrorDensity)
{
  const auto toys = oracle::toys();
  const auto frozen = oracle::frozen();
  for (std::size_t k = 0; k < toys.size(); ++k) {
    const auto [s, bw] = build(toys[k]);
    const GridSpec single{ toys[k].theta, toys[k].theta, 1.0 };
    const FitResult fit = estimate_theta(s, manly, single, quartic, quartic, bw);
    ASSERT_EQ(fit.theta_hat[0], toys[k].theta);
    const std::vector<double> ts{ toys[k].t, toys[k].t + 0.3, toys[k].t - 0.45 };
    const DensityCurve c = estimate_error_density(s, fit, quartic, toys[k].b, ts);
    EXPECT_NEAR(c.values[0], frozen[k].density, 1e-12) << "toy " << k;
    for (std::size_t j = 0; j < ts.size(); ++j)
      EXPECT_NEAR(c.values[j], oracle::density(toys[k], toys[k].theta, ts[j]), 1e-12) << "toy " << k;
  }
}
