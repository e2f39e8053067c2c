#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "shearlab/fenchel_nielsen.hpp"

using namespace shearlab;

namespace {

const double kSys = 2.0 * std::acosh(1.5);

std::string random_word(std::mt19937_64& rng, const std::string& letters, int len) {
  std::string w;
  while (static_cast<int>(w.size()) < len) {
    const char c = letters[rng() % letters.size()];
    if (!w.empty() && std::tolower(w.back()) == std::tolower(c) && w.back() != c) continue;
    w.push_back(c);
  }
  return w;
}

std::string substitute(const std::string& w, char gen, const std::string& img, const std::string& inv_img) {
  std::string out;
  for (char c : w) {
    if (c == gen) out += img;
    else if (c == std::tolower(gen)) out += inv_img;
    else out.push_back(c);
  }
  return out;
}

}  // namespace

TEST(FnToHolonomy, TorusCuspAndTraces) {
  for (double l : {0.5, 1.3, 4.0}) {
    for (double t : {-3.0, 0.0, 2.2}) {
      const auto rep = fn_to_holonomy("s_1_1", {{"a"}, {l}, {t}});
      EXPECT_NEAR(rep.eval("ABab").trace(), -2.0, 1e-8);
      EXPECT_LT(rep.relator_residual, 1e-8);
      EXPECT_NEAR(std::abs(rep.eval("A").trace()), 2.0 * std::cosh(l / 2.0), 1e-12);
    }
  }
  EXPECT_THROW(fn_to_holonomy("s_1_2", {{"a"}, {1.0}, {0.0}}), ValidationError);
  EXPECT_THROW(fn_to_holonomy("s_1_1", {{"a"}, {-1.0}, {0.0}}), ValidationError);
}

TEST(FnToHolonomy, FullTwistIsDehnTwist) {
  std::mt19937_64 rng(2);
  const double l = 1.7, t = 0.4;
  const auto r0 = fn_to_holonomy("s_1_1", {{"a"}, {l}, {t}});
  const auto r1 = fn_to_holonomy("s_1_1", {{"a"}, {l}, {t + l}});
  for (int k = 0; k < 20; ++k) {
    const std::string w = random_word(rng, "ABab", 1 + static_cast<int>(rng() % 8));
    const double lhs = r1.eval(w).trace();
    const double rhs = r0.eval(substitute(w, 'B', "AB", "ba")).trace();
    EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, std::abs(lhs))) << w;
  }
}

TEST(FnToHolonomy, FourHoledSphere) {
  std::mt19937_64 rng(9);
  for (double l : {0.8, 2.0, 3.5}) {
    for (double t : {-1.5, 0.0, 0.9}) {
      const auto rep = fn_to_holonomy("s_0_4", {{"m"}, {l}, {t}});
      EXPECT_LT(rep.relator_residual, 1e-9);
      for (const auto& p : rep.peripherals) {
        EXPECT_NEAR(std::abs(rep.eval(p).trace()), 2.0, 1e-8);
        EXPECT_EQ(classify(rep.eval(p)), MobiusType::parabolic);
      }
      EXPECT_NEAR(std::abs(rep.eval("AB").trace()), 2.0 * std::cosh(l / 2.0), 1e-10);
      // A full twist conjugates C and D by the pants curve.
      const auto r1 = fn_to_holonomy("s_0_4", {{"m"}, {l}, {t + l}});
      for (int k = 0; k < 20; ++k) {
        const std::string w = random_word(rng, "ABCabc", 1 + static_cast<int>(rng() % 6));
        const MobiusMap m1 = r1.eval(w);
        const double tol = 1e-10 * std::max(1.0, std::pow(max_abs_entry(m1), 2));
        EXPECT_NEAR(rep.eval(substitute(w, 'C', "baCAB", "bacAB")).trace(), m1.trace(), tol) << w;
      }
    }
  }
}

TEST(HolonomyToShear, ModularTorus) {
  const double l = kSys;
  const auto s = torus_fn_to_shear(l, -l / 2.0);
  for (int e = 0; e < 3; ++e) EXPECT_NEAR(s[e], 0.0, 1e-8);
  const auto sp = torus_fn_to_shear(l, l / 2.0);
  EXPECT_NEAR(sp[0], -2.0 * std::log(2.0), 1e-8);
  EXPECT_NEAR(sp[1], 2.0 * std::log(2.0), 1e-8);
  EXPECT_NEAR(sp[2], 0.0, 1e-8);
}

TEST(HolonomyToShear, RoundTripGrid) {
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double l = 0.5 + 3.5 * i / 9.0;
      const double t = -3.0 + 6.0 * j / 9.0;
      const auto s = torus_fn_to_shear(l, t);
      for (double r : check_complete(s)) EXPECT_NEAR(r, 0.0, 1e-7);
      EXPECT_NEAR(curve_length(s, named_curve(s.triangulation(), "a")), l, 1e-6);
      const FNPoint p = torus_shear_to_fn(s);
      EXPECT_NEAR(p.lengths[0], l, 1e-6);
      EXPECT_NEAR(std::cosh(p.twists[0]), std::cosh(t), 1e-5 * std::cosh(t));
      if (std::abs(t) > 1e-3) {
        EXPECT_NEAR(p.twists[0], t, 1e-5) << l << " " << t;
      }
    }
  }
}

TEST(HolonomyToShear, FullTwistMatchesDirectComputation) {
  const auto tri = std::make_shared<const IdealTriangulation>(builtin_surface("s_1_1"));
  for (double l : {0.7, 1.3, 2.4}) {
    for (double t : {-4.0, -1.1, 0.5, 2.9, 6.0}) {
      if (std::abs(t) + l > 9.0) continue;
      const auto direct = holonomy_to_shear(fn_to_holonomy("s_1_1", {{"a"}, {l}, {t}}), tri, torus_lifts());
      const auto up = holonomy_to_shear(fn_to_holonomy("s_1_1", {{"a"}, {l}, {t + l}}), tri, torus_lifts());
      const auto down = holonomy_to_shear(fn_to_holonomy("s_1_1", {{"a"}, {l}, {t - l}}), tri, torus_lifts());
      const auto tw = torus_full_twist(direct, 1), bw = torus_full_twist(direct, -1);
      for (int e = 0; e < 3; ++e) {
        EXPECT_NEAR(tw[e], up[e], 1e-8);
        EXPECT_NEAR(bw[e], down[e], 1e-8);
        EXPECT_NEAR(torus_fn_to_shear(l, t)[e], direct[e], 1e-8);
      }
    }
  }
  const auto far = torus_fn_to_shear(1.3, 40.0);
  EXPECT_NEAR(curve_length(far, named_curve(far.triangulation(), "a")), 1.3, 1e-8);
  EXPECT_NEAR(torus_shear_to_fn(far).twists[0], 40.0, 1e-6);
}

TEST(HolonomyToShear, ConjugationInvariance) {
  const auto tri = std::make_shared<const IdealTriangulation>(builtin_surface("s_1_1"));
  const auto rep = fn_to_holonomy("s_1_1", {{"a"}, {1.1}, {0.6}});
  const auto s0 = holonomy_to_shear(rep, tri, torus_lifts());
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 20; ++k) {
    MobiusMap h{u(rng), u(rng), u(rng), u(rng)};
    if (h.det() < 0.3) continue;
    const auto s1 = holonomy_to_shear(rep.conjugated(normalized(h)), tri, torus_lifts());
    for (int e = 0; e < 3; ++e) EXPECT_NEAR(s1[e], s0[e], 1e-8);
  }
}

TEST(HolonomyToShear, NonParabolicLiftIsRejected) {
  const auto tri = std::make_shared<const IdealTriangulation>(builtin_surface("s_1_1"));
  const auto rep = fn_to_holonomy("s_1_1", {{"a"}, {1.1}, {0.6}});
  auto lifts = torus_lifts();
  lifts[0][0] = "AB";
  EXPECT_THROW(holonomy_to_shear(rep, tri, lifts), GeometryError);
}

TEST(TwistCase11, RecoversTwistFromForwardOracle) {
  for (double l : {0.5, 1.0, 2.5, 4.0}) {
    for (double t : {-3.0, -0.7, 0.0, 1.2, 3.0}) {
      const auto rep = fn_to_holonomy("s_1_1", {{"a"}, {l}, {t}});
      const double mu = trace_to_length(rep.eval("B").trace());
      const double alpha = trace_to_length(rep.eval("A").trace());
      EXPECT_NEAR(twist_from_lengths_case11(mu, alpha, 0.0), std::cosh(t), 1e-6 * std::cosh(t));
    }
  }
}

TEST(TwistCase11, MonotoneInMuAndRejectsInconsistentData) {
  double prev = 0.0;
  for (double mu = 3.0; mu < 7.0; mu += 0.5) {
    const double v = twist_from_lengths_case11(mu, 1.5, 0.0);
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_THROW(twist_from_lengths_case11(0.1, 0.2, 0.0), GeometryError);
}

TEST(TwistCase04, IdentitiesAndRoundTrip) {
  EXPECT_NEAR(twist_from_lengths_case04(0.7 + 1.1, 0.7, 1.1), 1.0, 1e-12);
  for (double t : {0.0, 0.3, 1.7, 4.0}) {
    for (double h : {0.2, 1.0, 2.5}) {
      const double hp = 0.6;
      const double d = perpendicular_d(t, h, hp);
      EXPECT_NEAR(twist_from_lengths_case04(d, h, hp), std::cosh(t), 1e-10 * std::cosh(t));
    }
  }
  EXPECT_THROW(twist_from_lengths_case04(1.0, 0.0, 1.0), GeometryError);
}

TEST(TwistCase04, HexagonSymmetricCase) {
  const double g = 1.3, dl = 0.9;
  const double expected = (std::cosh(dl / 2) + std::pow(std::cosh(g / 2), 2)) / std::pow(std::sinh(g / 2), 2);
  EXPECT_NEAR(std::cosh(hexagon_h(g, g, dl)), expected, 1e-12);
  // Cusp boundary and the relation back to the crossing curve length.
  const double h = hexagon_h(1.0, 2.0, 0.0);
  EXPECT_GT(h, 0.0);
  const double d = perpendicular_d(0.5, h, h);
  const double mu = mu_from_d(d, 1.0, 1.0);
  EXPECT_NEAR(std::cosh(mu / 2.0),
              std::cosh(d) * std::pow(std::sinh(0.5), 2) - std::pow(std::cosh(0.5), 2), 1e-12);
}

TEST(TwistCase04, DenominatorBoundedAwayFromZero) {
  const double lmin = 0.5;
  // With boundary lengths at least lmin the perpendicular h is bounded below.
  const double hmin = hexagon_h(20.0, 20.0, 0.0);
  double worst = 1e300;
  for (double g = lmin; g < 20.0; g += 0.25) {
    for (double b = lmin; b < 20.0; b += 0.25) {
      const double h = hexagon_h(g, b, 0.0);
      worst = std::min(worst, std::sinh(h) * std::sinh(h));
    }
  }
  EXPECT_GT(worst, 0.0);
  EXPECT_GT(hmin, 0.0);
}
