#include <transmodel/kernels.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <array>

using namespace transmodel;

namespace {

const std::array all_shapes{ KernelShape::quartic, KernelShape::epanechnikov, KernelShape::gaussian_trunc };

template<class F>
double
gk_integral(F f)
{
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -1.0, 1.0, 15, 1e-14);
}

} // namespace

TEST(Kernel, QuarticValues)
{
  const Kernel k = make_kernel(KernelShape::quartic);
  EXPECT_DOUBLE_EQ(eval_kernel(k, 0.0), 0.9375);
  EXPECT_EQ(eval_kernel(k, 1.5), 0.0);
  EXPECT_DOUBLE_EQ(eval_kernel(k, 0.5), 0.52734375);
  EXPECT_EQ(eval_kernel(k, 1.0), 0.0);
}

TEST(Kernel, QuarticDerivatives)
{
  const Kernel k = make_kernel(KernelShape::quartic);
  EXPECT_EQ(eval_kernel_deriv(k, 1, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(eval_kernel_deriv(k, 1, 0.5), -1.40625);
  EXPECT_DOUBLE_EQ(eval_kernel_deriv(k, 2, 0.0), -3.75);
  // interior limit at the endpoint, zero outside
  EXPECT_DOUBLE_EQ(eval_kernel_deriv(k, 2, 1.0), 0.9375 * 8.0);
  EXPECT_EQ(eval_kernel_deriv(k, 2, 1.0001), 0.0);
}

TEST(Kernel, RejectsDerivativeOrder)
{
  const Kernel k = make_kernel(KernelShape::quartic);
  EXPECT_THROW(eval_kernel_deriv(k, 0, 0.1), invalid_input);
  EXPECT_THROW(eval_kernel_deriv(k, 3, 0.1), invalid_input);
}

TEST(Kernel, QuarticMoments)
{
  const Kernel k = make_kernel(KernelShape::quartic);
  EXPECT_NEAR(kernel_moment(k, 0), 1.0, 1e-12);
  EXPECT_NEAR(kernel_moment(k, 1), 0.0, 1e-12);
  EXPECT_NEAR(kernel_moment(k, 2), 1.0 / 7.0, 1e-12);
  EXPECT_NEAR(kernel_roughness(k), 5.0 / 7.0, 1e-12);
  EXPECT_THROW(kernel_moment(k, -1), invalid_input);
}

TEST(Kernel, NamesRoundTrip)
{
  for (auto shape : all_shapes) {
    const Kernel k = make_kernel(shape);
    EXPECT_EQ(kernel_from_name(kernel_name(k)).shape, shape);
  }
  EXPECT_THROW(kernel_from_name("triweight"), invalid_input);
}

TEST(Kernel, MomentsAgreeWithIndependentQuadrature)
{
  for (auto shape : all_shapes) {
    const Kernel k = make_kernel(shape);
    for (int p = 0; p <= 4; ++p) {
      const double ref = gk_integral([&](double v) { return std::pow(v, p) * eval_kernel(k, v); });
      EXPECT_NEAR(kernel_moment(k, p), ref, 1e-12) << kernel_name(k) << " p=" << p;
    }
    EXPECT_NEAR(kernel_moment(k, 0), 1.0, 1e-10);
    EXPECT_NEAR(kernel_moment(k, 1), 0.0, 1e-10);
    EXPECT_NEAR(gk_integral([&](double v) { return eval_kernel_deriv(k, 1, v); }), 0.0, 1e-10);
  }
}

TEST(Kernel, SymmetricAndCompact)
{
  for (auto shape : all_shapes) {
    const Kernel k = make_kernel(shape);
    for (int i = 0; i <= 300; ++i) {
      const double v = -1.5 + 0.01 * i;
      EXPECT_EQ(eval_kernel(k, v), eval_kernel(k, -v));
      if (std::abs(v) > 1.0)
        EXPECT_EQ(eval_kernel(k, v), 0.0);
      EXPECT_GE(eval_kernel(k, v), 0.0);
    }
  }
}

TEST(Kernel, DerivativesMatchFiniteDifferences)
{
  constexpr double step = 1e-6;
  for (auto shape : all_shapes) {
    const Kernel k = make_kernel(shape);
    for (int i = 1; i <= 100; ++i) {
      const double v = -0.99 + 1.98 * i / 101.0;
      const double fd1 = (eval_kernel(k, v + step) - eval_kernel(k, v - step)) / (2 * step);
      EXPECT_NEAR(eval_kernel_deriv(k, 1, v), fd1, 1e-6) << kernel_name(k) << " v=" << v;
      const double fd2 = (eval_kernel_deriv(k, 1, v + step) - eval_kernel_deriv(k, 1, v - step)) / (2 * step);
      EXPECT_NEAR(eval_kernel_deriv(k, 2, v), fd2, 1e-5) << kernel_name(k) << " v=" << v;
    }
  }
}

TEST(Kernel, WiderSupportStaysNormalized)
{
  Kernel k = make_kernel(KernelShape::quartic);
  k.support_halfwidth = 2.5;
  EXPECT_NEAR(kernel_moment(k, 0), 1.0, 1e-12);
  EXPECT_EQ(eval_kernel(k, 2.6), 0.0);
  EXPECT_DOUBLE_EQ(eval_kernel(k, 0.0), 0.9375 / 2.5);
}
