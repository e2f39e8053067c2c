#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "shearlab/moebius.hpp"

using namespace shearlab;

namespace {

MobiusMap random_psl(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  while (true) {
    MobiusMap m{u(rng), u(rng), u(rng), u(rng)};
    if (m.det() > 0.2) return normalized(m);
  }
}

MobiusMap random_parabolic(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const double x = u(rng);
  double k = u(rng);
  if (std::abs(k) < 0.1) k = 0.5;
  const double sign = u(rng) > 0 ? 1.0 : -1.0;
  return {sign * (1.0 + k * x), sign * (-k * x * x), sign * k, sign * (1.0 - k * x)};
}

}  // namespace

TEST(Compose, IdentityIsNeutral) {
  const MobiusMap m = normalized({2.0, 1.0, 3.0, 2.0});
  EXPECT_TRUE(approx_equal_psl(compose(MobiusMap::identity(), m), m, 1e-15));
}

TEST(Compose, ProductOfBasicParabolics) {
  const MobiusMap pp{1.5, 0.5, -0.5, 0.5};
  const MobiusMap pm{1.5, -0.5, 0.5, 0.5};
  const MobiusMap r = compose(pp, pm);
  EXPECT_NEAR(r.a, 2.5, 1e-15);
  EXPECT_NEAR(r.b, -0.5, 1e-15);
  EXPECT_NEAR(r.c, -0.5, 1e-15);
  EXPECT_NEAR(r.d, 0.5, 1e-15);
  EXPECT_NEAR(r.trace(), 3.0, 1e-15);
}

TEST(Compose, InverseGivesIdentityAndDeterminantStaysOne) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    const MobiusMap m = random_psl(rng);
    const MobiusMap r = compose(m, inverse(m));
    EXPECT_TRUE(approx_equal_psl(r, MobiusMap::identity(), 1e-12));
    EXPECT_NEAR(compose(m, random_psl(rng)).det(), 1.0, 1e-12);
  }
}

TEST(Classify, StableUnderSignFlip) {
  const MobiusMap h{2.0, 1.0, 1.0, 1.0};
  const MobiusMap e = normalized({0.5, -1.0, 1.0, 0.5});
  const MobiusMap p{1.0, 1.0, 0.0, 1.0};
  for (const MobiusMap& m : {h, e, p}) {
    EXPECT_EQ(classify(m), classify(MobiusMap{-m.a, -m.b, -m.c, -m.d}));
  }
  EXPECT_EQ(classify(h), MobiusType::hyperbolic);
  EXPECT_EQ(classify(e), MobiusType::elliptic);
  EXPECT_EQ(classify(p), MobiusType::parabolic);
  EXPECT_EQ(classify(MobiusMap{-1, 0, 0, -1}), MobiusType::identity);
}

TEST(TraceToLength, KnownValues) {
  EXPECT_DOUBLE_EQ(trace_to_length(2.0), 0.0);
  EXPECT_NEAR(trace_to_length(3.0), 1.9248473002384139, 1e-12);
  EXPECT_NEAR(trace_to_length(-2.5), 2.0 * std::log(2.0), 1e-12);
  EXPECT_THROW(trace_to_length(1.5), GeometryError);
}

TEST(TraceToLength, InvertsTwoCosh) {
  for (double l = 1e-6; l <= 40.0; l *= 1.7) {
    EXPECT_NEAR(trace_to_length(length_to_trace(l)), l, 1e-9 * std::max(1.0, l)) << l;
  }
  EXPECT_NEAR(trace_to_length(length_to_trace(40.0)), 40.0, 1e-9 * 40);
}

TEST(ParabolicFixedPoint, Cases) {
  EXPECT_DOUBLE_EQ(parabolic_fixed_point({1, 0, 3, 1}).value(), 0.0);
  EXPECT_TRUE(parabolic_fixed_point({1, 1, 0, 1}).is_infinite());
  const double c = 0.7;
  EXPECT_NEAR(parabolic_fixed_point({1 + c, -c, c, 1 - c}).value(), 1.0, 1e-15);
  EXPECT_THROW(parabolic_fixed_point({2, 1, 1, 1}), GeometryError);
  EXPECT_THROW(parabolic_fixed_point(MobiusMap::identity()), GeometryError);
}

TEST(CrossRatioShear, Examples) {
  const auto inf = BoundaryPoint::infinity();
  EXPECT_NEAR(cross_ratio_shear(-1.0, 0.0, 1.0, inf), 0.0, 1e-15);
  EXPECT_NEAR(cross_ratio_shear(0.0, 1.0, 2.0, 3.0), std::log(1.0 / 3.0), 1e-15);
  EXPECT_THROW(cross_ratio_shear(0.0, 0.0, 2.0, 3.0), GeometryError);
  EXPECT_THROW(cross_ratio_shear(0.0, 2.0, 1.0, 3.0), GeometryError);
  EXPECT_THROW(cross_ratio_shear(inf, 0.0, inf, 3.0), GeometryError);
}

TEST(CrossRatioShear, InfinityLimitsMatchLargeValues) {
  const auto inf = BoundaryPoint::infinity();
  const double big = 1e9;
  EXPECT_NEAR(cross_ratio_shear(inf, -2.0, 0.5, 3.0), cross_ratio_shear(-big, -2.0, 0.5, 3.0), 1e-8);
  EXPECT_NEAR(cross_ratio_shear(-1.0, inf, -3.0, -2.0), cross_ratio_shear(-1.0, big, -3.0, -2.0), 1e-8);
  EXPECT_NEAR(cross_ratio_shear(-1.0, 0.5, inf, -3.0), cross_ratio_shear(-1.0, 0.5, big, -3.0), 1e-8);
  EXPECT_NEAR(cross_ratio_shear(-1.0, 0.5, 2.0, inf), cross_ratio_shear(-1.0, 0.5, 2.0, big), 1e-8);
}

TEST(CrossRatioShear, MoebiusInvarianceAndTriangleOrder) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  int checked = 0;
  for (int k = 0; k < 500; ++k) {
    std::array<double, 4> x{u(rng), u(rng), u(rng), u(rng)};
    std::sort(x.begin(), x.end());
    const double s = cross_ratio_shear(x[0], x[1], x[2], x[3]);
    EXPECT_NEAR(cross_ratio_shear(x[2], x[3], x[0], x[1]), s, 1e-12);
    const MobiusMap g = random_psl(rng);
    std::array<BoundaryPoint, 4> y;
    for (int i = 0; i < 4; ++i) y[i] = apply(g, x[i]);
    EXPECT_NEAR(cross_ratio_shear(y[0], y[1], y[2], y[3]), s, 1e-9);
    ++checked;
  }
  EXPECT_EQ(checked, 500);
}

TEST(TraceProductParabolics, WorkedExample) {
  const MobiusMap g1{1, 0, 1, 1};
  const MobiusMap g2{-3, 4, -4, 5};
  EXPECT_NEAR(trace_product_parabolics(g1, g2), 6.0, 1e-14);
  EXPECT_NEAR(compose(g1, g2).trace(), 6.0, 1e-14);
}

TEST(TraceProductParabolics, CommonFixedPoint) {
  const MobiusMap g1{1 + 0.5, -0.5, 0.5, 1 - 0.5};
  const MobiusMap g2{-(1 + 2.0), 2.0, -2.0, -(1 - 2.0)};
  EXPECT_NEAR(std::abs(trace_product_parabolics(g1, g2)), 2.0, 1e-14);
}

TEST(TraceProductParabolics, RandomPairsAndConjugation) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 2000; ++k) {
    const MobiusMap g1 = random_parabolic(rng), g2 = random_parabolic(rng);
    const double direct = compose(g1, g2).trace();
    EXPECT_NEAR(trace_product_parabolics(g1, g2), direct, 1e-9 * std::max(1.0, std::abs(direct)));
    const MobiusMap h = random_psl(rng);
    const MobiusMap c1 = compose(compose(h, g1), inverse(h));
    const MobiusMap c2 = compose(compose(h, g2), inverse(h));
    const double q0 = 0.5 * g1.trace() * g2.trace() - trace_product_parabolics(g1, g2);
    const double q1 = 0.5 * c1.trace() * c2.trace() - trace_product_parabolics(c1, c2);
    EXPECT_NEAR(q0, q1, 1e-9 * std::max(1.0, std::abs(q0)));
  }
}

TEST(TraceProductParabolics, InfiniteFixedPointNeedsConjugation) {
  EXPECT_THROW(trace_product_parabolics({1, 1, 0, 1}, {1, 0, 1, 1}), GeometryError);
}

TEST(FrameFromPoints, SendsStandardTriple) {
  const auto inf = BoundaryPoint::infinity();
  const std::vector<std::array<BoundaryPoint, 3>> triples{
      {0.5, 2.0, -1.0}, {inf, 0.0, 1.0}, {-3.0, inf, -7.0}, {-1.0, 4.0, inf}};
  for (const auto& t : triples) {
    const MobiusMap f = frame_from_points(t[0], t[1], t[2]);
    EXPECT_NEAR(f.det(), 1.0, 1e-12);
    const BoundaryPoint images[3] = {apply(f, 0.0), apply(f, BoundaryPoint::infinity()),
                                     apply(f, -1.0)};
    for (int i = 0; i < 3; ++i) {
      if (t[i].is_infinite()) {
        EXPECT_TRUE(images[i].is_infinite() || std::abs(images[i].value()) > 1e12);
      } else {
        EXPECT_NEAR(images[i].value(), t[i].value(), 1e-12);
      }
    }
  }
  EXPECT_THROW(frame_from_points(2.0, 0.5, -1.0), GeometryError);
}
