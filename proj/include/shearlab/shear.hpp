#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "shearlab/error.hpp"
#include "shearlab/moebius.hpp"
#include "shearlab/triangulation.hpp"

namespace shearlab {

inline constexpr double kShearClamp = 500.0;
inline constexpr double kCompleteTol = 1e-9;

/// One real shear per edge of a triangulation.
class ShearVector {
 public:
  ShearVector() = default;
  ShearVector(std::shared_ptr<const IdealTriangulation> tri, std::vector<double> values)
      : tri_(std::move(tri)), values_(std::move(values)) {
    if (!tri_) throw ValidationError("shear vector needs a triangulation");
    if (static_cast<int>(values_.size()) != tri_->num_edges()) {
      throw ValidationError("expected " + std::to_string(tri_->num_edges()) + " shears, got " +
                            std::to_string(values_.size()));
    }
    for (double& v : values_) {
      if (!std::isfinite(v)) throw ValidationError("shear values must be finite");
      v = std::clamp(v, -kShearClamp, kShearClamp);
    }
  }
  ShearVector(const IdealTriangulation& tri, std::vector<double> values)
      : ShearVector(std::make_shared<const IdealTriangulation>(tri), std::move(values)) {}

  const IdealTriangulation& triangulation() const { return *tri_; }
  const std::shared_ptr<const IdealTriangulation>& triangulation_ptr() const { return tri_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](int e) const { return values_.at(e); }
  int size() const { return static_cast<int>(values_.size()); }

 private:
  std::shared_ptr<const IdealTriangulation> tri_;
  std::vector<double> values_;
};

/// Sum of shears around each puncture, with multiplicity.
inline std::vector<double> check_complete(const ShearVector& s) {
  std::vector<double> res;
  for (const auto& link : s.triangulation().puncture_links()) {
    double sum = 0.0;
    for (int e : link.edges) sum += s[e];
    res.push_back(sum);
  }
  return res;
}

inline bool is_complete(const ShearVector& s, double tol = kCompleteTol) {
  for (double r : check_complete(s)) {
    if (std::abs(r) > tol) return false;
  }
  return true;
}

inline Eigen::MatrixXd incidence_matrix(const IdealTriangulation& tri) {
  const auto inc = tri.incidence();
  Eigen::MatrixXd m(inc.size(), tri.num_edges());
  for (std::size_t p = 0; p < inc.size(); ++p) {
    for (int e = 0; e < tri.num_edges(); ++e) m(p, e) = inc[p][e];
  }
  return m;
}

/// Orthogonal projection onto the complete subspace.
inline std::vector<double> project_complete(const IdealTriangulation& tri,
                                            const std::vector<double>& x) {
  const Eigen::MatrixXd a = incidence_matrix(tri);
  const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
  const Eigen::VectorXd lam = (a * a.transpose()).ldlt().solve(a * v);
  const Eigen::VectorXd p = v - a.transpose() * lam;
  return {p.data(), p.data() + p.size()};
}

template <class Rng>
ShearVector random_complete_shear(const std::shared_ptr<const IdealTriangulation>& tri,
                                  Rng& rng, double scale = 2.0) {
  std::normal_distribution<double> nd(0.0, scale);
  std::vector<double> x(tri->num_edges());
  for (double& v : x) v = nd(rng);
  return ShearVector(tri, project_complete(*tri, x));
}

inline MobiusMap basic_matrix_P(int eps) {
  const double e = eps > 0 ? 1.0 : -1.0;
  return {1.5, 0.5 * e, -0.5 * e, 0.5};
}

/// Translation along the leaving edge. The upper-right entry -2 sinh(s/2)
/// fixes the endpoints of that edge, ±1 and ∞.
inline MobiusMap basic_matrix_H(int eps, double s) {
  const double e = eps > 0 ? 1.0 : -1.0;
  return {std::exp(-e * s / 2.0), -2.0 * std::sinh(s / 2.0), 0.0, std::exp(e * s / 2.0)};
}

inline MobiusMap basic_matrix_V(int eps, double s) {
  return compose(basic_matrix_H(eps, s), basic_matrix_P(eps));
}

struct HolonomyWordResult {
  MobiusMap matrix;
  int word_length = 0;
  MobiusType classification = MobiusType::identity;
  bool degenerate = false;
};

namespace detail {

/// Extended-precision 2x2 product used for long words.
struct WideMatrix {
  long double a = 1, b = 0, c = 0, d = 1;

  WideMatrix operator*(const WideMatrix& m) const {
    WideMatrix p{a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d};
    const long double s = 1.0L / std::sqrt(p.a * p.d - p.b * p.c);
    return {p.a * s, p.b * s, p.c * s, p.d * s};
  }
};

inline WideMatrix wide_V(int eps, double shear) {
  const long double u = std::exp(static_cast<long double>(shear) / 2.0L);
  if (eps > 0) return {(2.0L / u + u) / 2.0L, (2.0L / u - u) / 2.0L, -u / 2.0L, u / 2.0L};
  return {(2.0L * u + 1.0L / u) / 2.0L, (1.0L / u - 2.0L * u) / 2.0L, 1.0L / (2.0L * u),
          1.0L / (2.0L * u)};
}

}  // namespace detail

/// Ordered product of V_{eps_i}(s_{a_i}). A positive chunk size multiplies
/// blocks of that many letters first and then the block products.
inline HolonomyWordResult holonomy_of_word(const ShearVector& s, const LRSequence& w,
                                           int chunk = 0) {
  for (const auto& l : w) s.triangulation().check_edge(l.edge);
  HolonomyWordResult r;
  r.word_length = static_cast<int>(w.size());
  if (w.empty()) {
    r.degenerate = true;
    return r;
  }
  const std::size_t block = chunk > 0 ? static_cast<std::size_t>(chunk) : w.size();
  detail::WideMatrix total;
  for (std::size_t start = 0; start < w.size(); start += block) {
    detail::WideMatrix part;
    for (std::size_t k = start; k < std::min(w.size(), start + block); ++k) {
      part = part * detail::wide_V(w[k].eps, s[w[k].edge]);
    }
    total = total * part;
  }
  r.matrix = {static_cast<double>(total.a), static_cast<double>(total.b),
              static_cast<double>(total.c), static_cast<double>(total.d)};
  r.classification = classify(r.matrix);
  return r;
}

/// log |trace| of the holonomy of w. Each letter is replaced by the
/// conjugate nonnegative matrix T_eps diag(e^{s/2}, e^{-s/2}) with
/// T_+ = [[1,1],[0,1]] and T_- = [[1,0],[1,1]], so the product has no
/// cancellation; a running scale factor keeps it finite.
inline double log_abs_trace(const ShearVector& s, const LRSequence& w) {
  for (const auto& l : w) s.triangulation().check_edge(l.edge);
  long double a = 1, b = 0, c = 0, d = 1, log_scale = 0;
  for (const auto& l : w) {
    const long double u = std::exp(static_cast<long double>(s[l.edge]) / 2.0L), v = 1.0L / u;
    long double na, nb, nc, nd;
    if (l.eps > 0) {
      na = a * u;
      nb = a * v + b * v;
      nc = c * u;
      nd = c * v + d * v;
    } else {
      na = a * u + b * u;
      nb = b * v;
      nc = c * u + d * u;
      nd = d * v;
    }
    const long double m = std::max({na, nb, nc, nd});
    a = na / m;
    b = nb / m;
    c = nc / m;
    d = nd / m;
    log_scale += std::log(m);
  }
  return static_cast<double>(std::log(a + d) + log_scale);
}

inline double curve_length(const ShearVector& s, const CurveOnSurface& c) {
  const LRSequence w = lr_word(s.triangulation(), c);
  if (w.empty()) throw GeometryError("curve degenerate for this metric / inconsistent data");
  const double lt = log_abs_trace(s, w);
  const double excess = std::expm1(lt - std::log(2.0));
  if (!(excess > kParabolicTol / 2.0)) {
    throw GeometryError("curve degenerate for this metric / inconsistent data");
  }
  if (lt < 20.0) return 2.0 * std::acosh(1.0 + excess);
  return 2.0 * (lt + std::log(0.5 * (1.0 + std::sqrt(1.0 - 4.0 * std::exp(-2.0 * lt)))));
}

namespace detail {

/// Corners of triangle `tri` placed in the frame of its side k:
/// corner k -> 0, corner k+1 -> ∞, corner k+2 -> -1.
inline std::array<BoundaryPoint, 3> side_frame(int k) {
  std::array<BoundaryPoint, 3> pos;
  pos[k] = 0.0;
  pos[next3(k)] = BoundaryPoint::infinity();
  pos[prev3(k)] = -1.0;
  return pos;
}

/// Vertex across side d of a triangle whose corners sit at `pos`.
inline BoundaryPoint develop_across(const std::array<BoundaryPoint, 3>& pos, int d, double shear) {
  const MobiusMap f = frame_from_points(pos[d], pos[next3(d)], pos[prev3(d)]);
  return apply(f, std::exp(shear));
}

}  // namespace detail

/// Shears after flipping edge e, computed by developing the quadrilateral
/// and its neighbours and evaluating cross-ratios.
inline ShearVector flip_shears(const ShearVector& s, int e) {
  const IdealTriangulation& tri = s.triangulation();
  const FlipResult f = tri.flip(e);
  const double se = s[e];
  std::vector<double> out = s.values();
  out[e] = -se;
  auto diag_side = [&](int t) { return t == f.old_t.triangle ? f.old_t.index : f.old_tp.index; };

  std::vector<char> done(tri.num_edges(), 0);
  done[e] = 1;
  try {
    for (const auto& [sigma, unused] : f.outer) {
      const int edge = tri.edge_of(sigma);
      if (done[edge]) continue;
      done[edge] = 1;
      const int k = sigma.index;
      const auto pos = detail::side_frame(k);
      const BoundaryPoint y = detail::develop_across(pos, diag_side(sigma.triangle), se);
      const Side star = tri.glued(sigma);
      BoundaryPoint z;
      if (f.map_outer(star)) {
        std::array<BoundaryPoint, 3> pos_star;
        pos_star[star.index] = BoundaryPoint::infinity();
        pos_star[next3(star.index)] = 0.0;
        pos_star[prev3(star.index)] = std::exp(s[edge]);
        z = detail::develop_across(pos_star, diag_side(star.triangle), se);
      } else {
        z = std::exp(s[edge]);
      }
      out[edge] = cross_ratio_shear(0.0, z, BoundaryPoint::infinity(), y);
    }
  } catch (const GeometryError& err) {
    throw GeometryError(std::string("development degenerate: ") + err.what());
  }
  return ShearVector(std::make_shared<const IdealTriangulation>(f.triangulation), out);
}

/// Shear of the diagonal [x1, x3] from four parabolic elements fixing the
/// vertices of the quadrilateral, using traces of pairwise products only.
inline double shear_from_four_parabolics(const MobiusMap& g1, const MobiusMap& g2,
                                         const MobiusMap& g3, const MobiusMap& g4) {
  const std::array<MobiusMap, 4> g{g1, g2, g3, g4};
  std::array<BoundaryPoint, 4> x;
  for (int i = 0; i < 4; ++i) x[i] = parabolic_fixed_point(g[i]);
  // Validates distinctness and counterclockwise order.
  cross_ratio_shear(x[0], x[1], x[2], x[3]);
  auto q = [&](int i, int j) {
    return 0.5 * g[i].trace() * g[j].trace() - compose(g[i], g[j]).trace();
  };
  const double num = q(0, 1) * q(2, 3);
  const double den = q(0, 3) * q(1, 2);
  if (!(num / den > 0.0)) throw GeometryError("points not in cyclic order");
  return 0.5 * std::log(num / den);
}

/// Parabolic element fixing x with translation parameter k.
inline MobiusMap parabolic_at(double x, double k) {
  return {1.0 + k * x, -k * x * x, k, 1.0 - k * x};
}

}  // namespace shearlab
