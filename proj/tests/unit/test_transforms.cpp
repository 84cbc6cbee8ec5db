#include <transmodel/transforms.hpp>

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace transmodel;

namespace {
const TransformFamily manly = make_family(Family::manly);
const TransformFamily boxcox = make_family(Family::boxcox);
const TransformFamily identity = make_family(Family::identity);
constexpr double e = std::numbers::e;
} // namespace

TEST(Transform, ManlyValues)
{
  EXPECT_EQ(transform(manly, 0.0, 2.5), 2.5);
  EXPECT_NEAR(transform(manly, 1.0, 1.0), e - 1.0, 1e-15);
  EXPECT_NEAR(transform(manly, 1e-12, 1.0), 1.0, 1e-9);
  for (double t : { -0.5, 0.0, 0.3, 1.5 })
    EXPECT_EQ(transform(manly, t, 0.0), 0.0);
}

TEST(Transform, ManlyDerivatives)
{
  EXPECT_EQ(transform_dy(manly, 0.0, 3.0), 1.0);
  EXPECT_NEAR(transform_dy(manly, 1.0, 1.0), e, 1e-15);
  EXPECT_EQ(transform_dy(manly, 0.5, 0.0), 1.0);

  EXPECT_NEAR(transform_dtheta(manly, 0.0, 2.0)[0], 2.0, 1e-15);
  EXPECT_EQ(transform_dtheta(manly, 1.0, 0.0)[0], 0.0);
  EXPECT_NEAR(transform_dtheta(manly, 1.0, 1.0)[0], 1.0, 1e-15);
}

TEST(Transform, ManlyInverse)
{
  EXPECT_EQ(inverse_transform(manly, 0.0, 4.2), 4.2);
  EXPECT_NEAR(inverse_transform(manly, 1.0, e - 1.0), 1.0, 1e-15);
  EXPECT_THROW(inverse_transform(manly, 1.0, -2.0), invalid_input);
}

TEST(Transform, DomainErrors)
{
  EXPECT_THROW(transform(boxcox, 0.5, 0.0), invalid_input);
  EXPECT_THROW(transform(boxcox, 0.5, -1.0), invalid_input);
  EXPECT_THROW(transform(manly, 2.0, 1.0), invalid_input);
  const ThetaVector two{ 0.1, 0.2 };
  EXPECT_THROW(transform(manly, two, 1.0), invalid_input);
  EXPECT_THROW(family_from_name("zellner"), invalid_input);
}

TEST(Transform, BoxCoxValues)
{
  EXPECT_NEAR(transform(boxcox, 0.0, e), 1.0, 1e-15);
  EXPECT_NEAR(transform(boxcox, 1.0, 3.0), 2.0, 1e-15);
  EXPECT_NEAR(transform(boxcox, 0.5, 4.0), 2.0, 1e-15);
  EXPECT_NEAR(transform_dy(boxcox, 0.5, 4.0), 0.5, 1e-15);
}

TEST(Transform, IdentityIsIdentity)
{
  EXPECT_EQ(transform(identity, 0.7, -3.25), -3.25);
  EXPECT_EQ(transform_dy(identity, 0.7, -3.25), 1.0);
  EXPECT_EQ(inverse_transform(identity, 0.7, -3.25), -3.25);
}

TEST(TransformProperty, RoundTrip)
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> theta_d(-0.5, 1.5), y_d(-4.0, 4.0), pos_d(0.05, 10.0), bc_d(-2.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const double th = theta_d(rng), y = y_d(rng);
    EXPECT_NEAR(inverse_transform(manly, th, transform(manly, th, y)), y, 1e-10 * std::max(1.0, std::abs(y)));
    const double tb = bc_d(rng), yb = pos_d(rng);
    EXPECT_NEAR(inverse_transform(boxcox, tb, transform(boxcox, tb, yb)), yb, 1e-10 * yb);
  }
}

TEST(TransformProperty, ContinuousAtZero)
{
  for (double y : { -3.0, -0.5, 0.25, 1.0, 4.0 }) {
    for (double th : { 1e-12, -1e-12, 1e-9, 5e-9, -5e-9, 2e-8, -2e-8 })
      EXPECT_NEAR(transform(manly, th, y), y, 1e-9 + std::abs(th) * y * y) << th;
    // both sides of the series threshold agree
    // (a θ step of 2e-10 moves Λ by about y²/2 · 2e-10)
    EXPECT_NEAR(transform(manly, 0.99e-8, y), transform(manly, 1.01e-8, y), 1.2e-10 * y * y + 1e-14);
    EXPECT_NEAR(transform_dtheta(manly, 0.99e-8, y)[0], transform_dtheta(manly, 1.01e-8, y)[0],
                1e-9 * std::abs(y * y * y) + 1e-14);
  }
}

TEST(TransformProperty, DerivativesMatchFiniteDifferences)
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> theta_d(-0.45, 1.45), y_d(-2.0, 2.0), pos_d(0.2, 4.0);
  constexpr double step = 1e-6;
  for (int i = 0; i < 500; ++i) {
    const double th = theta_d(rng), y = y_d(rng);
    const double fdy = (transform(manly, th, y + step) - transform(manly, th, y - step)) / (2 * step);
    const double fdt = (transform(manly, th + step, y) - transform(manly, th - step, y)) / (2 * step);
    EXPECT_NEAR(transform_dy(manly, th, y), fdy, 1e-5);
    EXPECT_NEAR(transform_dtheta(manly, th, y)[0], fdt, 1e-5);
    EXPECT_NEAR(log_transform_dy(manly, th, y), std::log(transform_dy(manly, th, y)), 1e-12);

    const double yb = pos_d(rng);
    const double fdb = (transform(boxcox, th, yb + step) - transform(boxcox, th, yb - step)) / (2 * step);
    const double fdbt = (transform(boxcox, th + step, yb) - transform(boxcox, th - step, yb)) / (2 * step);
    EXPECT_NEAR(transform_dy(boxcox, th, yb), fdb, 1e-5);
    EXPECT_NEAR(transform_dtheta(boxcox, th, yb)[0], fdbt, 1e-5);
  }
}

TEST(TransformProperty, StrictlyIncreasing)
{
  for (double th = -0.5; th <= 1.5; th += 0.0625) {
    double prev = transform(manly, th, -5.0);
    for (int i = 1; i <= 400; ++i) {
      const double cur = transform(manly, th, -5.0 + 0.025 * i);
      EXPECT_LT(prev, cur) << "theta " << th;
      prev = cur;
    }
    EXPECT_GT(transform_dy(manly, th, 2.0), 0.0);
  }
}
