#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "shearlab/error.hpp"
#include "shearlab/moebius.hpp"
#include "shearlab/shear.hpp"
#include "shearlab/triangulation.hpp"

namespace shearlab {

/// Lengths and twists along a pants decomposition. Twists are in length
/// units, so a full Dehn twist about curve i adds lengths[i] to twists[i].
struct FNPoint {
  std::vector<std::string> pants_curves;
  std::vector<double> lengths;
  std::vector<double> twists;
};

/// Generators of a Fuchsian group. In a word, an uppercase letter stands for
/// a generator and the lowercase letter for its inverse.
struct FuchsianRep {
  std::map<char, MobiusMap> generators;
  std::vector<std::string> peripherals;
  double relator_residual = 0.0;

  MobiusMap eval(const std::string& word) const {
    detail::WideMatrix m;
    for (char ch : word) {
      const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      const auto it = generators.find(up);
      if (it == generators.end()) throw ValidationError(std::string("unknown generator '") + ch + "'");
      const MobiusMap g = (ch == up) ? it->second : inverse(it->second);
      m = m * detail::WideMatrix{g.a, g.b, g.c, g.d};
    }
    return {static_cast<double>(m.a), static_cast<double>(m.b), static_cast<double>(m.c),
            static_cast<double>(m.d)};
  }

  FuchsianRep conjugated(const MobiusMap& h) const {
    FuchsianRep r = *this;
    for (auto& [name, g] : r.generators) g = compose(compose(h, g), inverse(h));
    return r;
  }
};

namespace detail {

inline void check_fn_point(const FNPoint& p, std::size_t n) {
  if (p.lengths.size() != n || p.twists.size() != n) {
    throw ValidationError("expected " + std::to_string(n) + " length/twist pairs");
  }
  for (double l : p.lengths) {
    if (!(l > 0.0) || !std::isfinite(l)) throw ValidationError("pants curve lengths must be positive");
  }
  for (double t : p.twists) {
    if (!std::isfinite(t)) throw ValidationError("twists must be finite");
  }
}

inline double psl_distance(const MobiusMap& m, const MobiusMap& n) {
  auto dist = [](const MobiusMap& x, const MobiusMap& y) {
    return std::max({std::abs(x.a - y.a), std::abs(x.b - y.b), std::abs(x.c - y.c),
                     std::abs(x.d - y.d)});
  };
  return std::min(dist(m, n), dist(m, MobiusMap{-n.a, -n.b, -n.c, -n.d}));
}

/// Fixed points of a hyperbolic element, repelling first.
inline std::array<double, 2> hyperbolic_fixed_points(const MobiusMap& m) {
  if (classify(m) != MobiusType::hyperbolic) throw GeometryError("element is not hyperbolic");
  if (m.c == 0.0) throw GeometryError("axis through infinity");
  const double disc = std::sqrt((m.a + m.d) * (m.a + m.d) - 4.0);
  const double x1 = (m.a - m.d - disc) / (2.0 * m.c);
  const double x2 = (m.a - m.d + disc) / (2.0 * m.c);
  return {x1, x2};
}

}  // namespace detail

/// Representation realizing an FN point on s_1_1 (one length, one twist) or
/// s_0_4 (one length, one twist).
inline FuchsianRep fn_to_holonomy(const std::string& surface, const FNPoint& p) {
  FuchsianRep rep;
  if (surface == "s_1_1") {
    detail::check_fn_point(p, 1);
    const double l = p.lengths[0], tau = p.twists[0];
    const double co = 1.0 / std::tanh(l / 2.0), cs = 1.0 / std::sinh(l / 2.0);
    const double e = std::exp(tau / 2.0);
    rep.generators['A'] = {std::exp(l / 2.0), 0.0, 0.0, std::exp(-l / 2.0)};
    rep.generators['B'] = normalized({co * e, cs, cs, co / e});
    rep.peripherals = {"ABab"};
    rep.relator_residual = std::abs(rep.eval("ABab").trace() + 2.0);
    return rep;
  }
  if (surface == "s_0_4") {
    detail::check_fn_point(p, 1);
    const double l = p.lengths[0], tau = p.twists[0];
    const double k = std::cosh(l / 4.0);
    const MobiusMap a = parabolic_at(-1.0, k), b = parabolic_at(1.0, k);
    const MobiusMap m = compose(a, b);
    const auto fp = detail::hyperbolic_fixed_points(m);
    const double mid = 0.5 * (fp[0] + fp[1]), rad = 0.5 * std::abs(fp[1] - fp[0]);
    // Half-turn about the highest point of the axis of M.
    const MobiusMap g = normalized({rad, mid, 0.0, 1.0});
    const MobiusMap q = compose(compose(g, MobiusMap{0.0, -1.0, 1.0, 0.0}), inverse(g));
    // Translation by tau along the axis of M.
    const MobiusMap kraw = fp[0] > fp[1] ? MobiusMap{1.0, -fp[0], 1.0, -fp[1]}
                                         : MobiusMap{-1.0, fp[0], 1.0, -fp[1]};
    const MobiusMap kmap = normalized(kraw);
    const MobiusMap shift{std::exp(tau / 2.0), 0.0, 0.0, std::exp(-tau / 2.0)};
    const MobiusMap t = compose(compose(inverse(kmap), shift), kmap);
    const MobiusMap tq = compose(t, q);
    rep.generators['A'] = a;
    rep.generators['B'] = b;
    rep.generators['C'] = compose(compose(tq, a), inverse(tq));
    rep.generators['D'] = compose(compose(tq, b), inverse(tq));
    rep.peripherals = {"A", "B", "C", "D"};
    rep.relator_residual = detail::psl_distance(rep.eval("ABCD"), MobiusMap::identity());
    return rep;
  }
  throw ValidationError("Fenchel-Nielsen coordinates are supported on s_1_1 and s_0_4 only");
}

/// For each edge, four words whose parabolic fixed points are the vertices
/// x1..x4 of the quadrilateral around the edge, diagonal [x1, x3].
using EdgeLifts = std::vector<std::array<std::string, 4>>;

inline EdgeLifts torus_lifts() {
  return {{"BabA", "abAB", "ABab", "BABabb"},
          {"BabA", "aabABA", "abAB", "ABab"},
          {"abAB", "AbaB", "ABab", "BabA"}};
}

inline BoundaryPoint lift_fixed_point(const FuchsianRep& rep, const std::string& word) {
  const MobiusMap m = rep.eval(word);
  const double scale = std::max(1.0, max_abs_entry(m));
  if (std::abs(std::abs(m.trace()) - 2.0) > kParabolicTol * scale * scale) {
    throw GeometryError("lift '" + word + "' is not parabolic");
  }
  if (std::abs(m.c) <= 1e-14 * scale) return BoundaryPoint::infinity();
  return (m.a - m.d) / (2.0 * m.c);
}

inline ShearVector holonomy_to_shear(const FuchsianRep& rep,
                                     const std::shared_ptr<const IdealTriangulation>& tri,
                                     const EdgeLifts& lifts) {
  if (static_cast<int>(lifts.size()) != tri->num_edges()) {
    throw ValidationError("need one lift quadruple per edge");
  }
  std::vector<double> s(tri->num_edges());
  for (int e = 0; e < tri->num_edges(); ++e) {
    std::array<BoundaryPoint, 4> x;
    for (int i = 0; i < 4; ++i) x[i] = lift_fixed_point(rep, lifts[e][i]);
    s[e] = cross_ratio_shear(x[0], x[1], x[2], x[3]);
  }
  return ShearVector(tri, s);
}

/// Shears after a full positive (or negative) twist about the pants curve a
/// of the built-in s_1_1 triangulation: a flip followed by swapping the
/// labels of edges 1 and 2.
inline ShearVector torus_full_twist(const ShearVector& s, int direction) {
  const ShearVector f = flip_shears(s, direction > 0 ? 1 : 2);
  return ShearVector(s.triangulation_ptr(), {f[0], f[2], f[1]});
}

/// Shears of the FN point (l, tau) on the built-in s_1_1 triangulation. The
/// twist is reduced to [-l/2, l/2] first and restored by full twists.
inline ShearVector torus_fn_to_shear(double length, double twist) {
  const auto tri = std::make_shared<const IdealTriangulation>(builtin_surface("s_1_1"));
  if (!(length > 0.0) || !std::isfinite(twist)) {
    throw ValidationError("need a positive length and a finite twist");
  }
  const double turns = std::round(twist / length);
  if (std::abs(turns) > 1e6) throw ValidationError("twist too large");
  ShearVector s = holonomy_to_shear(
      fn_to_holonomy("s_1_1", {{"a"}, {length}, {twist - turns * length}}), tri, torus_lifts());
  for (long k = 0; k < static_cast<long>(std::abs(turns)); ++k) s = torus_full_twist(s, turns > 0 ? 1 : -1);
  return s;
}

/// cosh(tau) from the lengths of the dual curve mu, the pants curve alpha and
/// the boundary delta of a one-holed torus (delta = 0 for a cusp).
inline double twist_from_lengths_case11(double mu, double alpha, double delta) {
  if (!(mu > 0.0) || !(alpha > 0.0) || !(delta >= 0.0)) {
    throw ValidationError("lengths must be positive");
  }
  const double q = (std::cosh(mu) + 1.0) * (std::cosh(alpha) - 1.0) /
                   (std::cosh(delta / 2.0) + std::cosh(alpha));
  const double r = q - 1.0;
  if (r < 1.0 - 1e-10 * q) throw GeometryError("inconsistent length data");
  return std::max(r, 1.0);
}

/// cosh(tau) = (cosh d - cosh h cosh h') / (sinh h sinh h').
inline double twist_from_lengths_case04(double d, double h, double hp) {
  const double den = std::sinh(h) * std::sinh(hp);
  if (!(std::abs(den) > 0.0)) throw GeometryError("degenerate perpendiculars: sinh h sinh h' = 0");
  return (std::cosh(d) - std::cosh(h) * std::cosh(hp)) / den;
}

/// Distance h between boundary curves gamma and beta across the pants with
/// third boundary delta.
inline double hexagon_h(double gamma, double beta, double delta) {
  const double v = (std::cosh(delta / 2.0) + std::cosh(gamma / 2.0) * std::cosh(beta / 2.0)) /
                   (std::sinh(gamma / 2.0) * std::sinh(beta / 2.0));
  return std::acosh(v);
}

inline double perpendicular_d(double tau, double h, double hp) {
  return std::acosh(std::cosh(tau) * std::sinh(h) * std::sinh(hp) + std::cosh(h) * std::cosh(hp));
}

/// Length of the curve mu crossing the pants curve, from the distance d.
inline double mu_from_d(double d, double beta, double beta_p) {
  const double c = std::cosh(d) * std::sinh(beta / 2.0) * std::sinh(beta_p / 2.0) -
                   std::cosh(beta / 2.0) * std::cosh(beta_p / 2.0);
  if (c < 1.0) throw GeometryError("inconsistent length data");
  return 2.0 * std::acosh(c);
}

/// FN coordinates of a complete shear vector on the built-in s_1_1
/// triangulation, with pants curve a and dual curve b. The twist is positive
/// when the (1,1) curve is longer than the (1,-1) curve.
inline FNPoint torus_shear_to_fn(const ShearVector& s) {
  const auto& tri = s.triangulation();
  const double l = curve_length(s, named_curve(tri, "a"));
  const double mu = curve_length(s, named_curve(tri, "b"));
  const double ch = twist_from_lengths_case11(mu, l, 0.0);
  const double lp = curve_length(s, named_curve(tri, "ab"));
  const double lm = curve_length(s, named_curve(tri, "aB"));
  const double tau = std::acosh(ch) * (lp > lm ? 1.0 : -1.0);
  return {{"a"}, {l}, {tau}};
}

}  // namespace shearlab
