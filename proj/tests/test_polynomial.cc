#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ctrect/errors.h"
#include "ctrect/polynomial.h"

using namespace ctrect;

namespace {

Poly from_roots(const std::vector<double>& roots, double lead = 1.0) {
  Poly p = Poly::constant(lead);
  for (double r : roots) p = p * Poly({-r, 1.0});
  return p;
}

}  // namespace

TEST(Polynomial, Arithmetic) {
  const Poly a({1.0, 2.0}), b({-1.0, 0.0, 3.0});
  const Poly c = a * b;
  EXPECT_EQ(c.degree(), 3);
  EXPECT_DOUBLE_EQ(c(2.0), a(2.0) * b(2.0));
  EXPECT_DOUBLE_EQ((a + b)(1.5), a(1.5) + b(1.5));
  EXPECT_DOUBLE_EQ((a - b)(-0.5), a(-0.5) - b(-0.5));
  EXPECT_DOUBLE_EQ(b.derivative()(1.0), 6.0);
  EXPECT_EQ(Poly({1.0, 2.0, 1e-20}).trimmed(1e-12).degree(), 1);
}

TEST(Polynomial, RootsInsideWindow) {
  const auto r = real_roots_quartic(from_roots({-3.0, -1.0, 0.5, 2.0}));
  ASSERT_EQ(r.size(), 3u);
  EXPECT_NEAR(r[0], -3.0, 1e-13);
  EXPECT_NEAR(r[1], -1.0, 1e-13);
  EXPECT_NEAR(r[2], 0.5, 1e-13);
  EXPECT_EQ(real_roots_quartic(from_roots({-3.0, 2.0}), kAllReals).size(), 2u);
}

TEST(Polynomial, FactoredExamples) {
  // (x + 2)(x - 3)(x^2 + 1)
  const auto r = real_roots_quartic(Poly({-6.0, -1.0, -5.0, -1.0, 1.0}), kAllReals);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[0], -2.0, 1e-14);
  EXPECT_NEAR(r[1], 3.0, 1e-14);
  // Vanishing leading coefficients.
  const auto d = real_roots_quartic(Poly({-8.0, 0.0, 2.0, 0.0, 0.0}), kAllReals);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_NEAR(d[0], -2.0, 1e-15);
  EXPECT_NEAR(d[1], 2.0, 1e-15);
  EXPECT_EQ(Poly({1.0, 1.0}) * Poly({1.0, -1.0}), Poly({1.0, 0.0, -1.0}));
}

TEST(Polynomial, DoubleRootAndComplexPair) {
  const auto r = real_roots_quartic(from_roots({0.3, 0.3, -2.0, 5.0}));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[0], -2.0, 1e-12);
  EXPECT_NEAR(r[1], 0.3, 1e-7);
  // (x^2 + 1)(x + 0.5): one real root.
  const auto c = real_roots_quartic(Poly({1.0, 0.0, 1.0}) * Poly({0.5, 1.0}));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR(c[0], -0.5, 1e-14);
}

TEST(Polynomial, RandomQuarticsAgainstKnownRoots) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> root(-7.5, 0.9), lead(0.5, 3.0);
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> roots{root(rng), root(rng), root(rng), root(rng)};
    std::sort(roots.begin(), roots.end());
    bool separated = true;
    for (int k = 1; k < 4; ++k) separated = separated && roots[k] - roots[k - 1] > 1e-2;
    if (!separated) continue;
    const Poly p = from_roots(roots, lead(rng));
    const auto r = real_roots_quartic(p);
    ASSERT_EQ(r.size(), 4u);
    for (double x : r) {
      EXPECT_LE(std::abs(p(x)), 1e-8 * p.max_abs_coeff() * std::pow(std::max(1.0, std::abs(x)), 4));
    }
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(r[k], roots[k], 1e-9 * std::max(1.0, std::abs(roots[k])));
  }
}

TEST(Polynomial, IdenticallyZero) {
  try {
    real_roots_quartic(Poly({1e-14, -1e-14}), Interval{}, 1e-12);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIdenticallyZero);
  }
  std::array<double, Poly::kMaxDegree> out{};
  EXPECT_EQ(real_roots_into(Poly(), Interval{}, 0.0, out), -1);
  EXPECT_EQ(real_roots_into(Poly::constant(2.0), Interval{}, 0.0, out), 0);
}
