#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "shearlab/shear.hpp"

using namespace shearlab;

namespace {

std::shared_ptr<const IdealTriangulation> surface(const std::string& name) {
  return std::make_shared<const IdealTriangulation>(builtin_surface(name));
}

// Closed-form flip rule used as an independent oracle.
std::vector<double> mutation_oracle(const ShearVector& s, int e) {
  const auto& tri = s.triangulation();
  const auto [st, stp] = tri.edge_sides(e);
  const double x = s[e];
  std::vector<double> out = s.values();
  out[e] = -x;
  for (Side side : {Side{st.triangle, next3(st.index)}, Side{stp.triangle, next3(stp.index)}}) {
    out[tri.edge_of(side)] += std::log1p(std::exp(x));
  }
  for (Side side : {Side{st.triangle, prev3(st.index)}, Side{stp.triangle, prev3(stp.index)}}) {
    out[tri.edge_of(side)] -= std::log1p(std::exp(-x));
  }
  return out;
}

}  // namespace

TEST(CheckComplete, TorusExamples) {
  const auto t = surface("s_1_1");
  auto r = check_complete(ShearVector(t, {1, 2, -3}));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0], 0.0, 1e-15);
  r = check_complete(ShearVector(t, {1, 1, 1}));
  EXPECT_NEAR(r[0], 6.0, 1e-15);
  EXPECT_FALSE(is_complete(ShearVector(t, {1, 1, 1})));
  const auto r3 = check_complete(ShearVector(surface("s_0_3"), {0, 0, 0}));
  EXPECT_EQ(r3, (std::vector<double>{0, 0, 0}));
}

TEST(ShearVector, ValidatesSizeAndClamps) {
  const auto t = surface("s_1_1");
  EXPECT_THROW(ShearVector(t, {1, 2}), ValidationError);
  const ShearVector s(t, {900, -900, 0});
  EXPECT_EQ(s[0], kShearClamp);
  EXPECT_EQ(s[1], -kShearClamp);
}

TEST(BasicMatrices, ZeroShearAndParabolicity) {
  for (int eps : {+1, -1}) {
    EXPECT_TRUE(approx_equal_psl(basic_matrix_H(eps, 0.0), MobiusMap::identity(), 1e-15));
    EXPECT_TRUE(approx_equal_psl(basic_matrix_V(eps, 0.0), basic_matrix_P(eps), 1e-15));
    EXPECT_NEAR(basic_matrix_P(eps).trace(), 2.0, 1e-15);
  }
}

TEST(BasicMatrices, ThirdVertexImage) {
  for (int eps : {+1, -1}) {
    for (double s : {-2.0, -0.3, 0.0, 0.7, 3.0}) {
      const auto img = apply(basic_matrix_V(eps, s), BoundaryPoint::infinity());
      EXPECT_NEAR(img.value(), -eps * (1.0 + 2.0 * std::exp(-eps * s)), 1e-12);
      // The leaving edge is fixed pointwise by the shear translation.
      const double end = eps > 0 ? -1.0 : 1.0;
      EXPECT_NEAR(apply(basic_matrix_H(eps, s), end).value(), end, 1e-12);
    }
  }
}

TEST(HolonomyOfWord, Examples) {
  const ShearVector s(surface("s_1_1"), {0, 0, 0});
  auto h = holonomy_of_word(s, {{0, +1}, {1, -1}});
  EXPECT_NEAR(std::abs(h.matrix.trace()), 3.0, 1e-14);
  EXPECT_EQ(h.word_length, 2);
  EXPECT_EQ(h.classification, MobiusType::hyperbolic);
  h = holonomy_of_word(s, {});
  EXPECT_TRUE(h.degenerate);
  EXPECT_TRUE(approx_equal_psl(h.matrix, MobiusMap::identity(), 0.0));
  h = holonomy_of_word(s, lr_word(s.triangulation(), puncture_curve(s.triangulation(), {0, 0})));
  EXPECT_NEAR(std::abs(h.matrix.trace()), 2.0, 1e-12);
  EXPECT_THROW(holonomy_of_word(s, {{5, 1}}), ValidationError);
}

TEST(CurveLength, ModularTorus) {
  const ShearVector s(surface("s_1_1"), {0, 0, 0});
  const double sys = 2.0 * std::acosh(1.5);
  for (const char* name : {"a", "b", "ab"}) {
    EXPECT_NEAR(curve_length(s, named_curve(s.triangulation(), name)), sys, 1e-12) << name;
  }
  auto twice = named_curve(s.triangulation(), "a");
  const auto once = twice.steps;
  twice.steps.insert(twice.steps.end(), once.begin(), once.end());
  EXPECT_NEAR(curve_length(s, twice), 2.0 * sys, 1e-12);
  EXPECT_THROW(curve_length(s, named_curve(s.triangulation(), "puncture:0")), GeometryError);
}

TEST(CurveLength, CompletenessCharacterization) {
  std::mt19937_64 rng(21);
  for (const char* name : {"s_1_1", "s_0_3", "s_0_4", "s_1_2"}) {
    const auto t = surface(name);
    const auto curves = puncture_curves(*t);
    for (int k = 0; k < 200; ++k) {
      const auto s = random_complete_shear(t, rng);
      for (const auto& c : curves) {
        const double tr = holonomy_of_word(s, lr_word(*t, c)).matrix.trace();
        EXPECT_NEAR(std::abs(tr), 2.0, 1e-7);
      }
      std::vector<double> bumped = s.values();
      std::uniform_real_distribution<double> u(0.1, 1.0);
      bumped[k % bumped.size()] += (k % 2 ? -1.0 : 1.0) * u(rng);
      const ShearVector b(t, bumped);
      double worst = 0.0;
      for (const auto& c : curves) {
        const double tr = holonomy_of_word(b, lr_word(*t, c)).matrix.trace();
        worst = std::max(worst, std::abs(std::abs(tr) - 2.0));
      }
      EXPECT_GT(worst, 1e-3);
    }
  }
}

TEST(CurveLength, PositiveTraceAgreesWithMatrixProduct) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const auto tri = surface("s_1_2");
  for (int k = 0; k < 300; ++k) {
    std::vector<double> v(tri->num_edges());
    for (double& x : v) x = u(rng);
    const ShearVector s(tri, v);
    LRSequence w;
    const int len = 1 + static_cast<int>(rng() % 9);
    for (int i = 0; i < len; ++i) w.push_back({static_cast<int>(rng() % 6), (rng() % 2) ? 1 : -1});
    const double direct = std::abs(holonomy_of_word(s, w).matrix.trace());
    EXPECT_NEAR(log_abs_trace(s, w), std::log(direct), 1e-10);
  }
}

TEST(CurveLength, AccurateAlongRepeatedDehnTwist) {
  // Flipping edge 1 and swapping the labels of edges 1 and 2 is a Dehn twist
  // about the (1,0) curve, which keeps its length while the shears grow.
  const auto tri = surface("s_1_1");
  const auto a = named_curve(*tri, "a");
  ShearVector s(tri, {-0.4, 1.1, -0.7});
  const double l0 = curve_length(s, a);
  for (int k = 1; k <= 60; ++k) {
    const ShearVector f = flip_shears(s, 1);
    s = ShearVector(tri, {f[0], f[2], f[1]});
    EXPECT_NEAR(curve_length(s, a), l0, 1e-9) << k;
  }
  EXPECT_GT(std::abs(s[1]), 40.0);
}

TEST(HolonomyOfWord, RotationAndChunkingInvariance) {
  std::mt19937_64 rng(8);
  const auto t = surface("s_1_2");
  for (int k = 0; k < 50; ++k) {
    const auto s = random_complete_shear(t, rng);
    const auto w = lr_word(*t, random_closed_curve(*t, rng));
    const double tr = std::abs(holonomy_of_word(s, w).matrix.trace());
    for (std::size_t r = 1; r < w.size(); ++r) {
      LRSequence rot(w.begin() + r, w.end());
      rot.insert(rot.end(), w.begin(), w.begin() + r);
      EXPECT_NEAR(std::abs(holonomy_of_word(s, rot).matrix.trace()), tr, 1e-9 * std::max(1.0, tr));
    }
    for (int chunk : {1, 2, 3, 7}) {
      EXPECT_NEAR(std::abs(holonomy_of_word(s, w, chunk).matrix.trace()), tr,
                  1e-9 * std::max(1.0, tr));
    }
  }
}

TEST(HolonomyOfWord, TraceIsLaurentPolynomialInOneShear) {
  const auto t = surface("s_1_1");
  const auto w = lr_word(*t, named_curve(*t, "slope:2/3"));
  const int j = 0;
  int n = 0;
  for (const auto& l : w) n += (l.edge == j);
  auto trace_at = [&](double x) {
    return holonomy_of_word(ShearVector(t, {x, 0.4, -0.4 - x}), w).matrix.trace();
  };
  // The other edges also vary, so count their letters too.
  int m = 0;
  for (const auto& l : w) m += (l.edge == 2);
  const int deg = 2 * (n + m);
  Eigen::MatrixXd a(deg + 1, deg + 1);
  Eigen::VectorXd b(deg + 1);
  for (int r = 0; r <= deg; ++r) {
    const double x = -1.0 + 2.0 * r / deg;
    const double u = std::exp(x / 2.0);
    for (int c = 0; c <= deg; ++c) a(r, c) = std::pow(u, c);
    b(r) = std::pow(u, deg / 2) * trace_at(x);
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
  for (double x : {-0.77, 0.13, 0.91}) {
    const double u = std::exp(x / 2.0);
    double p = 0.0;
    for (int c = deg; c >= 0; --c) p = p * u + coef(c);
    const double expected = std::pow(u, deg / 2) * trace_at(x);
    EXPECT_NEAR(p, expected, 1e-6 * std::abs(expected));
  }
}

TEST(FlipShears, ModularTorusFlip) {
  const ShearVector s(surface("s_1_1"), {0, 0, 0});
  const auto f = flip_shears(s, 2);
  EXPECT_NEAR(f[2], 0.0, 1e-14);
  EXPECT_NEAR(std::max(f[0], f[1]), 2.0 * std::log(2.0), 1e-12);
  EXPECT_NEAR(std::min(f[0], f[1]), -2.0 * std::log(2.0), 1e-12);
  EXPECT_NEAR(check_complete(f)[0], 0.0, 1e-12);
  const auto oracle = mutation_oracle(s, 2);
  for (int e = 0; e < 3; ++e) EXPECT_NEAR(f[e], oracle[e], 1e-12);
}

TEST(FlipShears, MatchesMutationOracleAndIsInvolution) {
  std::mt19937_64 rng(4);
  for (const auto& name : builtin_names()) {
    const auto t = surface(name);
    for (int k = 0; k < 100; ++k) {
      const auto s = random_complete_shear(t, rng, 3.0);
      const int e = static_cast<int>(rng() % t->num_edges());
      if (t->is_self_folded(e)) continue;
      const auto f = flip_shears(s, e);
      const auto oracle = mutation_oracle(s, e);
      for (int i = 0; i < s.size(); ++i) EXPECT_NEAR(f[i], oracle[i], 1e-9);
      for (double r : check_complete(f)) EXPECT_NEAR(r, 0.0, 1e-9);
      if (f.triangulation().is_self_folded(e)) continue;
      const auto back = flip_shears(f, e);
      EXPECT_EQ(back.triangulation().labeled_key(), t->labeled_key());
      for (int i = 0; i < s.size(); ++i) EXPECT_NEAR(back[i], s[i], 1e-9);
    }
  }
}

TEST(FlipShears, LargeShearsStayAccurate) {
  const auto t = surface("s_1_1");
  const ShearVector s(t, {60.0, -95.0, 35.0});
  for (int e = 0; e < 3; ++e) {
    const auto f = flip_shears(s, e);
    const auto oracle = mutation_oracle(s, e);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(f[i], oracle[i], 1e-9);
    const auto back = flip_shears(f, e);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(back[i], s[i], 1e-9);
  }
}

TEST(FlipShears, CurveLengthsAreInvariant) {
  std::mt19937_64 rng(12);
  int checked = 0;
  for (const auto& name : builtin_names()) {
    const auto t = surface(name);
    for (int k = 0; k < 60; ++k) {
      const auto s = random_complete_shear(t, rng, 1.5);
      const auto c = random_closed_curve(*t, rng);
      if (holonomy_of_word(s, lr_word(*t, c)).classification != MobiusType::hyperbolic) continue;
      const int e = static_cast<int>(rng() % t->num_edges());
      if (t->is_self_folded(e)) continue;
      const double before = curve_length(s, c);
      const auto f = flip_shears(s, e);
      const auto rc = reroute_curve(c, t->flip(e));
      EXPECT_NEAR(curve_length(f, rc), before, 1e-8 * std::max(1.0, before));
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(FlipShears, SelfFoldedEdgeIsRejected) {
  const ShearVector s(surface("s_0_3"), {0, 0, 0});
  const auto f = flip_shears(s, 0);
  for (int e = 0; e < 3; ++e) {
    if (f.triangulation().is_self_folded(e)) {
      EXPECT_THROW(flip_shears(f, e), ValidationError);
    }
  }
}

TEST(ShearFromFourParabolics, AgreesWithFixedPoints) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-4.0, 4.0), kd(0.3, 2.0);
  for (int n = 0; n < 500; ++n) {
    std::array<double, 4> x{u(rng), u(rng), u(rng), u(rng)};
    std::sort(x.begin(), x.end());
    if (x[1] - x[0] < 1e-3 || x[2] - x[1] < 1e-3 || x[3] - x[2] < 1e-3) continue;
    const double s = shear_from_four_parabolics(parabolic_at(x[0], kd(rng)), parabolic_at(x[1], -kd(rng)),
                                                parabolic_at(x[2], kd(rng)), parabolic_at(x[3], kd(rng)));
    EXPECT_NEAR(s, cross_ratio_shear(x[0], x[1], x[2], x[3]), 1e-9);
  }
}

TEST(ShearFromFourParabolics, SymmetricQuadrilateral) {
  double prev = 1.0;
  for (double t : {1e2, 1e3, 1e4}) {
    const double s = shear_from_four_parabolics(parabolic_at(-1, 1), parabolic_at(0, 1),
                                                parabolic_at(1, 1), parabolic_at(t, 1.0 / (t * t)));
    EXPECT_NEAR(s, std::log((t - 1.0) / (t + 1.0)), 1e-9);
    EXPECT_LT(std::abs(s), prev);
    prev = std::abs(s);
  }
  EXPECT_LT(prev, 3e-4);
  EXPECT_THROW(shear_from_four_parabolics(parabolic_at(0, 1), parabolic_at(2, 1), parabolic_at(1, 1),
                                          parabolic_at(3, 1)),
               GeometryError);
}

TEST(ShearFromFourParabolics, DevelopedModularTorusEdge) {
  // Quadrilateral around an edge at zero shear: (0, 1, ∞, -1), moved to finite position.
  const MobiusMap g = normalized({1.0, 2.0, -1.0, 3.0});
  std::array<double, 4> x;
  const std::array<BoundaryPoint, 4> v{0.0, 1.0, BoundaryPoint::infinity(), -1.0};
  for (int i = 0; i < 4; ++i) x[i] = apply(g, v[i]).value();
  const double s = shear_from_four_parabolics(parabolic_at(x[0], 1), parabolic_at(x[1], 1),
                                              parabolic_at(x[2], 1), parabolic_at(x[3], 1));
  EXPECT_NEAR(s, 0.0, 1e-9);
}
