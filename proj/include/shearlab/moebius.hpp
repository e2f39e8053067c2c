#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <string>

#include "shearlab/error.hpp"

namespace shearlab {

/// A real 2x2 matrix of determinant one, acting on the upper half-plane.
/// Entries are stored up to an overall sign.
struct MobiusMap {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static MobiusMap identity() { return {}; }

  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }
};

inline MobiusMap normalized(const MobiusMap& m) {
  const double det = m.det();
  if (!(det > 0.0) || !std::isfinite(det)) {
    throw GeometryError("matrix has non-positive determinant");
  }
  const double s = 1.0 / std::sqrt(det);
  return {m.a * s, m.b * s, m.c * s, m.d * s};
}

inline MobiusMap compose(const MobiusMap& m1, const MobiusMap& m2) {
  MobiusMap p{m1.a * m2.a + m1.b * m2.c, m1.a * m2.b + m1.b * m2.d,
              m1.c * m2.a + m1.d * m2.c, m1.c * m2.b + m1.d * m2.d};
  return normalized(p);
}

inline MobiusMap inverse(const MobiusMap& m) { return {m.d, -m.b, -m.c, m.a}; }

inline MobiusMap operator*(const MobiusMap& m1, const MobiusMap& m2) {
  return compose(m1, m2);
}

inline double trace(const MobiusMap& m) { return m.trace(); }

inline double max_abs_entry(const MobiusMap& m) {
  return std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c), std::abs(m.d)});
}

/// Entrywise comparison modulo the sign ambiguity of PSL(2,R).
inline bool approx_equal_psl(const MobiusMap& x, const MobiusMap& y, double tol) {
  auto close = [tol](const MobiusMap& p, const MobiusMap& q) {
    return std::abs(p.a - q.a) <= tol && std::abs(p.b - q.b) <= tol &&
           std::abs(p.c - q.c) <= tol && std::abs(p.d - q.d) <= tol;
  };
  return close(x, y) || close(x, MobiusMap{-y.a, -y.b, -y.c, -y.d});
}

inline std::ostream& operator<<(std::ostream& os, const MobiusMap& m) {
  return os << "[[" << m.a << ", " << m.b << "], [" << m.c << ", " << m.d << "]]";
}

/// A point of the boundary R ∪ {∞}.
class BoundaryPoint {
 public:
  BoundaryPoint() = default;
  BoundaryPoint(double x) : value_(x) {}  // NOLINT(google-explicit-constructor)

  static BoundaryPoint infinity() {
    BoundaryPoint p;
    p.infinite_ = true;
    return p;
  }

  bool is_infinite() const { return infinite_; }
  double value() const {
    if (infinite_) throw GeometryError("boundary point is infinite");
    return value_;
  }

  friend bool operator==(const BoundaryPoint& p, const BoundaryPoint& q) {
    if (p.infinite_ || q.infinite_) return p.infinite_ == q.infinite_;
    return p.value_ == q.value_;
  }

  std::string str() const { return infinite_ ? "inf" : std::to_string(value_); }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

inline BoundaryPoint apply(const MobiusMap& m, const BoundaryPoint& z) {
  if (z.is_infinite()) {
    if (m.c == 0.0) return BoundaryPoint::infinity();
    return m.a / m.c;
  }
  const double x = z.value();
  const double den = m.c * x + m.d;
  if (den == 0.0) return BoundaryPoint::infinity();
  return (m.a * x + m.b) / den;
}

enum class MobiusType { identity, elliptic, parabolic, hyperbolic };

inline constexpr double kParabolicTol = 1e-8;

inline const char* to_string(MobiusType t) {
  switch (t) {
    case MobiusType::identity: return "identity";
    case MobiusType::elliptic: return "elliptic";
    case MobiusType::parabolic: return "parabolic";
    case MobiusType::hyperbolic: return "hyperbolic";
  }
  return "unknown";
}

inline MobiusType classify(const MobiusMap& m, double tol = kParabolicTol) {
  const double t = std::abs(m.trace());
  if (std::abs(t - 2.0) <= tol) {
    const double off = std::max({std::abs(m.b), std::abs(m.c), std::abs(m.a - m.d)});
    return off <= 1e-10 ? MobiusType::identity : MobiusType::parabolic;
  }
  return t < 2.0 ? MobiusType::elliptic : MobiusType::hyperbolic;
}

/// Hyperbolic translation length of an element with the given trace:
/// |t| = 2 cosh(l/2).
inline double trace_to_length(double t) {
  const double at = std::abs(t);
  if (!(at >= 2.0)) throw GeometryError("non-hyperbolic element");
  return 2.0 * std::acosh(at / 2.0);
}

inline double length_to_trace(double length) { return 2.0 * std::cosh(length / 2.0); }

/// Fixed point (A - D) / 2C of a parabolic element; infinity when C vanishes.
inline BoundaryPoint parabolic_fixed_point(const MobiusMap& m) {
  if (classify(m) != MobiusType::parabolic) {
    throw GeometryError(std::string("element is not parabolic (") + to_string(classify(m)) + ")");
  }
  if (std::abs(m.c) <= 1e-14 * max_abs_entry(m)) return BoundaryPoint::infinity();
  return (m.a - m.d) / (2.0 * m.c);
}

/// Shear of the diagonal [x1, x3] of the ideal quadrilateral x1 x2 x3 x4:
/// ln[(x1 - x2)(x3 - x4) / ((x1 - x4)(x2 - x3))].
inline double cross_ratio_shear(const BoundaryPoint& x1, const BoundaryPoint& x2,
                                const BoundaryPoint& x3, const BoundaryPoint& x4) {
  const std::array<BoundaryPoint, 4> x{x1, x2, x3, x4};
  int n_inf = 0;
  for (int i = 0; i < 4; ++i) {
    if (x[i].is_infinite()) ++n_inf;
    for (int j = i + 1; j < 4; ++j) {
      if (x[i] == x[j]) throw GeometryError("coincident ideal points");
    }
  }
  if (n_inf > 1) throw GeometryError("coincident ideal points");

  double log_abs = 0.0;
  int sign = 1;
  auto factor = [&](int i, int j, int power) {
    if (x[i].is_infinite() || x[j].is_infinite()) return;
    const double f = x[i].value() - x[j].value();
    if (f < 0) sign = -sign;
    log_abs += power * std::log(std::abs(f));
  };
  factor(0, 1, 1);
  factor(2, 3, 1);
  factor(0, 3, -1);
  factor(1, 2, -1);
  // The two factors containing the infinite point cancel to +1 or -1.
  if (x[1].is_infinite() || x[2].is_infinite()) sign = -sign;
  if (sign <= 0) throw GeometryError("points not in cyclic order");
  return log_abs;
}

/// Right-hand side of tr(g1 g2) = tr(g1) tr(g2) / 2 - C1 C2 (x1 - x2)^2 for
/// parabolic g1, g2 with finite fixed points x1, x2.
inline double trace_product_parabolics(const MobiusMap& g1, const MobiusMap& g2) {
  const BoundaryPoint p1 = parabolic_fixed_point(g1);
  const BoundaryPoint p2 = parabolic_fixed_point(g2);
  if (p1.is_infinite() || p2.is_infinite()) {
    throw GeometryError("fixed point at infinity: conjugate first");
  }
  const double dx = p1.value() - p2.value();
  return 0.5 * g1.trace() * g2.trace() - g1.c * g2.c * dx * dx;
}

/// The orientation-preserving map sending 0 -> a, ∞ -> b, -1 -> c.
inline MobiusMap frame_from_points(const BoundaryPoint& a, const BoundaryPoint& b,
                                   const BoundaryPoint& c) {
  if (a == b || b == c || a == c) throw GeometryError("coincident ideal points");
  MobiusMap k;
  if (a.is_infinite()) {
    k = {0.0, -(c.value() - b.value()), 1.0, -b.value()};
  } else if (b.is_infinite()) {
    k = {-1.0, a.value(), 0.0, c.value() - a.value()};
  } else if (c.is_infinite()) {
    k = {-1.0, a.value(), 1.0, -b.value()};
  } else {
    const double cb = c.value() - b.value();
    const double ca = c.value() - a.value();
    k = {-cb, a.value() * cb, ca, -b.value() * ca};
  }
  if (!(k.det() > 0.0)) throw GeometryError("ideal triple is not counterclockwise");
  return inverse(normalized(k));
}

}  // namespace shearlab
