#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "shearlab/error.hpp"

namespace shearlab {

/// Side k of a triangle runs from corner k to corner k+1; corners are listed
/// counterclockwise.
struct Side {
  int triangle = 0;
  int index = 0;

  friend bool operator==(const Side& x, const Side& y) {
    return x.triangle == y.triangle && x.index == y.index;
  }
  friend bool operator!=(const Side& x, const Side& y) { return !(x == y); }
  friend bool operator<(const Side& x, const Side& y) {
    return x.triangle != y.triangle ? x.triangle < y.triangle : x.index < y.index;
  }
};

inline int next3(int k) { return (k + 1) % 3; }
inline int prev3(int k) { return (k + 2) % 3; }

/// One puncture link: the corners around a puncture in cyclic order together
/// with the edge crossed when passing from each corner to the next.
struct PunctureLink {
  std::vector<Side> corners;  // Side::index holds the corner index here
  std::vector<int> edges;
};

struct FlipResult;

class IdealTriangulation {
 public:
  IdealTriangulation() = default;

  /// Edge id i is glued from the pair edges[i].
  IdealTriangulation(int genus, int punctures, int num_triangles,
                     const std::vector<std::pair<Side, Side>>& edges)
      : genus_(genus), punctures_(punctures), num_triangles_(num_triangles) {
    if (punctures <= 0) throw ValidationError("surface must have at least one puncture");
    if (genus < 0) throw ValidationError("genus must be nonnegative");
    if (2 * genus - 2 + punctures <= 0) {
      throw ValidationError("surface must satisfy 2g - 2 + n > 0");
    }
    const int expected_f = 4 * genus - 4 + 2 * punctures;
    const int expected_e = 6 * genus - 6 + 3 * punctures;
    if (num_triangles != expected_f) {
      throw ValidationError("Euler characteristic mismatch: expected " +
                            std::to_string(expected_f) + " triangles, got " +
                            std::to_string(num_triangles));
    }
    if (static_cast<int>(edges.size()) != expected_e) {
      throw ValidationError("Euler characteristic mismatch: expected " +
                            std::to_string(expected_e) + " edges, got " +
                            std::to_string(edges.size()));
    }
    glue_.assign(3 * num_triangles, -1);
    edge_of_.assign(3 * num_triangles, -1);
    edge_sides_.resize(edges.size());
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
      const auto& [s1, s2] = edges[e];
      for (const Side& s : {s1, s2}) {
        if (s.triangle < 0 || s.triangle >= num_triangles || s.index < 0 || s.index > 2) {
          throw ValidationError("side out of range in edge " + std::to_string(e));
        }
      }
      if (s1 == s2) throw ValidationError("side glued to itself in edge " + std::to_string(e));
      const int i1 = slot(s1), i2 = slot(s2);
      if (glue_[i1] != -1 || glue_[i2] != -1) {
        throw ValidationError("gluing is not an involution: side used twice (edge " +
                              std::to_string(e) + ")");
      }
      glue_[i1] = i2;
      glue_[i2] = i1;
      edge_of_[i1] = e;
      edge_of_[i2] = e;
      edge_sides_[e] = {s1, s2};
    }
    validate_topology();
  }

  int genus() const { return genus_; }
  int punctures() const { return punctures_; }
  int num_triangles() const { return num_triangles_; }
  int num_edges() const { return static_cast<int>(edge_sides_.size()); }
  /// Dimension of the subspace of complete shear vectors, 6g - 6 + 2n.
  int complete_dim() const { return 6 * genus_ - 6 + 2 * punctures_; }

  Side glued(const Side& s) const { return side_at(glue_.at(slot(s))); }
  int edge_of(const Side& s) const { return edge_of_.at(slot(s)); }
  std::pair<Side, Side> edge_sides(int e) const {
    check_edge(e);
    return {edge_sides_[e][0], edge_sides_[e][1]};
  }
  void check_edge(int e) const {
    if (e < 0 || e >= num_edges()) throw ValidationError("unknown edge id " + std::to_string(e));
  }

  bool is_self_folded(int e) const {
    check_edge(e);
    return edge_sides_[e][0].triangle == edge_sides_[e][1].triangle;
  }
  bool has_self_folded() const {
    for (int e = 0; e < num_edges(); ++e) {
      if (is_self_folded(e)) return true;
    }
    return false;
  }

  /// Edge ids of triangle t listed by side index.
  std::array<int, 3> triangle_edges(int t) const {
    return {edge_of_[3 * t], edge_of_[3 * t + 1], edge_of_[3 * t + 2]};
  }

  std::vector<PunctureLink> puncture_links() const {
    std::vector<PunctureLink> links;
    std::vector<char> seen(3 * num_triangles_, 0);
    for (int start = 0; start < 3 * num_triangles_; ++start) {
      if (seen[start]) continue;
      PunctureLink link;
      int cur = start;
      while (!seen[cur]) {
        seen[cur] = 1;
        const Side corner = side_at(cur);
        const Side across = glued(corner);
        link.corners.push_back(corner);
        link.edges.push_back(edge_of(corner));
        cur = 3 * across.triangle + next3(across.index);
      }
      links.push_back(std::move(link));
    }
    return links;
  }

  /// n x E matrix of how often each edge ends at each puncture.
  std::vector<std::vector<int>> incidence() const {
    const auto links = puncture_links();
    std::vector<std::vector<int>> m(links.size(), std::vector<int>(num_edges(), 0));
    for (std::size_t p = 0; p < links.size(); ++p) {
      for (int e : links[p].edges) ++m[p][e];
    }
    return m;
  }

  std::vector<std::pair<Side, Side>> gluing_table() const {
    std::vector<std::pair<Side, Side>> out;
    for (const auto& s : edge_sides_) out.emplace_back(s[0], s[1]);
    return out;
  }

  /// Labeled canonical form: invariant under renumbering and rotating
  /// triangles, sensitive to edge labels.
  std::vector<int> labeled_key() const {
    std::vector<std::array<int, 3>> tris;
    for (int t = 0; t < num_triangles_; ++t) {
      auto e = triangle_edges(t);
      std::array<int, 3> best = e;
      for (int r = 1; r < 3; ++r) {
        std::array<int, 3> rot{e[r], e[(r + 1) % 3], e[(r + 2) % 3]};
        best = std::min(best, rot);
      }
      tris.push_back(best);
    }
    std::sort(tris.begin(), tris.end());
    std::vector<int> key;
    key.reserve(3 * tris.size());
    for (const auto& t : tris) key.insert(key.end(), t.begin(), t.end());
    return key;
  }

  /// Encoding of the unlabeled triangulation seen from a starting side;
  /// also returns, for each slot of the encoding, the original side.
  std::pair<std::vector<int>, std::vector<Side>> encode_from(const Side& start) const {
    std::vector<int> number(num_triangles_, -1), rotation(num_triangles_, 0);
    std::vector<int> order;
    number[start.triangle] = 0;
    rotation[start.triangle] = start.index;
    order.push_back(start.triangle);
    std::vector<int> code;
    std::vector<Side> sides;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const int t = order[pos];
      for (int r = 0; r < 3; ++r) {
        const Side s{t, (rotation[t] + r) % 3};
        const Side p = glued(s);
        if (number[p.triangle] < 0) {
          number[p.triangle] = static_cast<int>(order.size());
          rotation[p.triangle] = p.index;
          order.push_back(p.triangle);
        }
        code.push_back(number[p.triangle]);
        code.push_back((p.index - rotation[p.triangle] + 3) % 3);
        sides.push_back(s);
      }
    }
    return {code, sides};
  }

  std::vector<int> unlabeled_key() const {
    std::vector<int> best;
    for (int t = 0; t < num_triangles_; ++t) {
      for (int k = 0; k < 3; ++k) {
        auto code = encode_from({t, k}).first;
        if (best.empty() || code < best) best = std::move(code);
      }
    }
    return best;
  }

  /// Orientation-preserving combinatorial isomorphism onto `target`, given
  /// as the target edge id for each edge of *this. Empty if none exists.
  std::optional<std::vector<int>> isomorphism_to(const IdealTriangulation& target) const {
    if (target.num_triangles_ != num_triangles_ || target.num_edges() != num_edges()) {
      return std::nullopt;
    }
    const auto [target_code, target_sides] = target.encode_from({0, 0});
    for (int t = 0; t < num_triangles_; ++t) {
      for (int k = 0; k < 3; ++k) {
        const auto [code, sides] = encode_from({t, k});
        if (code != target_code) continue;
        std::vector<int> map(num_edges(), -1);
        for (std::size_t i = 0; i < sides.size(); ++i) {
          map[edge_of(sides[i])] = target.edge_of(target_sides[i]);
        }
        return map;
      }
    }
    return std::nullopt;
  }

  FlipResult flip(int e) const;

 private:
  int slot(const Side& s) const { return 3 * s.triangle + s.index; }
  static Side side_at(int i) { return {i / 3, i % 3}; }

  void validate_topology() const {
    for (int i = 0; i < 3 * num_triangles_; ++i) {
      if (glue_[i] < 0) throw ValidationError("gluing is not an involution: unglued side");
    }
    // Connectedness of the dual graph.
    std::vector<char> seen(num_triangles_, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      for (int k = 0; k < 3; ++k) {
        const int u = glued({t, k}).triangle;
        if (!seen[u]) {
          seen[u] = 1;
          ++count;
          stack.push_back(u);
        }
      }
    }
    if (count != num_triangles_) throw ValidationError("triangulation is disconnected");
    const auto links = puncture_links();
    if (static_cast<int>(links.size()) != punctures_) {
      throw ValidationError("Euler characteristic mismatch: gluing has " +
                            std::to_string(links.size()) + " vertices, expected " +
                            std::to_string(punctures_));
    }
  }

  int genus_ = 0;
  int punctures_ = 0;
  int num_triangles_ = 0;
  std::vector<int> glue_;
  std::vector<int> edge_of_;
  std::vector<std::array<Side, 2>> edge_sides_;
};

/// Result of re-diagonalizing the quadrilateral around an edge. The two
/// triangles keep their ids; the new diagonal is side 2 of both.
struct FlipResult {
  IdealTriangulation triangulation;
  int edge = 0;
  Side old_t;       // (t, i): the old diagonal as a side of t
  Side old_tp;      // (t', j)
  /// Old outer sides and the new sides they become, in the order
  /// (t,i+1), (t,i+2), (t',j+1), (t',j+2).
  std::array<std::pair<Side, Side>, 4> outer;

  std::optional<Side> map_outer(const Side& s) const {
    for (const auto& [from, to] : outer) {
      if (from == s) return to;
    }
    return std::nullopt;
  }
};

inline FlipResult IdealTriangulation::flip(int e) const {
  check_edge(e);
  const Side st = edge_sides_[e][0];
  const Side stp = edge_sides_[e][1];
  if (st.triangle == stp.triangle) throw ValidationError("flip undefined: self-folded edge");
  const int t = st.triangle, i = st.index;
  const int tp = stp.triangle, j = stp.index;

  FlipResult res;
  res.edge = e;
  res.old_t = st;
  res.old_tp = stp;
  res.outer = {{{{t, next3(i)}, {tp, 1}},
                {{t, prev3(i)}, {t, 0}},
                {{tp, next3(j)}, {t, 1}},
                {{tp, prev3(j)}, {tp, 0}}}};

  std::vector<std::pair<Side, Side>> edges = gluing_table();
  auto remap = [&](const Side& s) { return res.map_outer(s).value_or(s); };
  for (int f = 0; f < num_edges(); ++f) {
    if (f == e) {
      edges[f] = {{t, 2}, {tp, 2}};
    } else {
      edges[f] = {remap(edges[f].first), remap(edges[f].second)};
    }
  }
  res.triangulation = IdealTriangulation(genus_, punctures_, num_triangles_, edges);
  return res;
}

inline FlipResult flip_combinatorial(const IdealTriangulation& tri, int e) { return tri.flip(e); }

/// Built-in triangulations: "s_1_1", "s_0_3", "s_0_4", "s_1_2".
inline IdealTriangulation builtin_surface(const std::string& name) {
  using P = std::pair<Side, Side>;
  if (name == "s_1_1") {
    // Square with one diagonal; edge 0 = a (horizontal), 1 = b (vertical),
    // 2 = c (diagonal).
    return IdealTriangulation(1, 1, 2,
                              {P{{0, 0}, {1, 1}}, P{{0, 1}, {1, 2}}, P{{0, 2}, {1, 0}}});
  }
  if (name == "s_0_3") {
    return IdealTriangulation(0, 3, 2,
                              {P{{0, 0}, {1, 2}}, P{{0, 1}, {1, 1}}, P{{0, 2}, {1, 0}}});
  }
  if (name == "s_0_4") {
    // Boundary of a tetrahedron with faces (0,2,1), (0,1,3), (0,3,2), (1,2,3).
    const std::array<std::array<int, 3>, 4> faces{{{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}}};
    std::vector<P> edges;
    for (int t = 0; t < 4; ++t) {
      for (int k = 0; k < 3; ++k) {
        const int u = faces[t][k], v = faces[t][next3(k)];
        for (int t2 = t + 1; t2 < 4; ++t2) {
          for (int k2 = 0; k2 < 3; ++k2) {
            if (faces[t2][k2] == v && faces[t2][next3(k2)] == u) {
              edges.push_back({{t, k}, {t2, k2}});
            }
          }
        }
      }
    }
    return IdealTriangulation(0, 4, 4, edges);
  }
  if (name == "s_1_2") {
    return IdealTriangulation(1, 2, 4,
                              {P{{0, 0}, {2, 0}}, P{{1, 0}, {3, 0}}, P{{0, 1}, {1, 2}},
                               P{{1, 1}, {2, 2}}, P{{2, 1}, {3, 2}}, P{{3, 1}, {0, 2}}});
  }
  throw ValidationError("unknown built-in surface '" + name + "'");
}

inline std::vector<std::string> builtin_names() { return {"s_1_1", "s_0_3", "s_0_4", "s_1_2"}; }

/// Random valid triangulation with the given number of triangles (even),
/// without self-folded edges. Genus and puncture count follow from the gluing.
template <class Rng>
IdealTriangulation random_triangulation(int num_triangles, Rng& rng, int max_tries = 100000) {
  if (num_triangles < 2 || num_triangles % 2) {
    throw ValidationError("random triangulation needs an even number of triangles >= 2");
  }
  const int ns = 3 * num_triangles;
  std::vector<int> perm(ns);
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::pair<Side, Side>> edges;
    bool ok = true;
    for (int k = 0; k < ns; k += 2) {
      Side s1{perm[k] / 3, perm[k] % 3}, s2{perm[k + 1] / 3, perm[k + 1] % 3};
      if (s1.triangle == s2.triangle) {
        ok = false;
        break;
      }
      edges.emplace_back(s1, s2);
    }
    if (!ok) continue;
    // Count vertex classes with a provisional genus-free walk.
    std::vector<int> glue(ns);
    for (const auto& [a, b] : edges) {
      glue[3 * a.triangle + a.index] = 3 * b.triangle + b.index;
      glue[3 * b.triangle + b.index] = 3 * a.triangle + a.index;
    }
    std::vector<char> seen(ns, 0);
    int n = 0;
    for (int s = 0; s < ns; ++s) {
      if (seen[s]) continue;
      ++n;
      int cur = s;
      while (!seen[cur]) {
        seen[cur] = 1;
        const int p = glue[cur];
        cur = 3 * (p / 3) + next3(p % 3);
      }
    }
    const int twice_g = 2 - (n - num_triangles / 2);
    if (twice_g < 0 || twice_g % 2) continue;
    try {
      return IdealTriangulation(twice_g / 2, n, num_triangles, edges);
    } catch (const ValidationError&) {
      continue;
    }
  }
  throw ValidationError("failed to generate a random triangulation");
}

/// One step of a curve through a triangle strip.
struct CurveStep {
  int triangle = 0;
  int in = 0;
  int out = 0;

  friend bool operator==(const CurveStep& x, const CurveStep& y) {
    return x.triangle == y.triangle && x.in == y.in && x.out == y.out;
  }
};

struct CurveOnSurface {
  std::vector<CurveStep> steps;
  bool cyclic = true;
};

struct LRLetter {
  int edge = 0;
  int eps = 1;

  friend bool operator==(const LRLetter& x, const LRLetter& y) {
    return x.edge == y.edge && x.eps == y.eps;
  }
};

using LRSequence = std::vector<LRLetter>;

inline void validate_curve(const IdealTriangulation& tri, const CurveOnSurface& c) {
  if (c.steps.empty()) throw ValidationError("curve has no steps");
  const int n = static_cast<int>(c.steps.size());
  for (int k = 0; k < n; ++k) {
    const CurveStep& s = c.steps[k];
    if (s.triangle < 0 || s.triangle >= tri.num_triangles() || s.in < 0 || s.in > 2 ||
        s.out < 0 || s.out > 2) {
      throw ValidationError("curve step out of range");
    }
    if (s.in == s.out) throw ValidationError("curve step enters and leaves through the same side");
    if (k + 1 == n && !c.cyclic) break;
    const CurveStep& nx = c.steps[(k + 1) % n];
    if (tri.glued({s.triangle, s.out}) != Side{nx.triangle, nx.in}) {
      throw ValidationError("incompatible crossing sequence at step " + std::to_string(k));
    }
  }
}

/// Left/right word: +1 when the curve leaves through the side on its left.
inline LRSequence lr_word(const IdealTriangulation& tri, const CurveOnSurface& c) {
  validate_curve(tri, c);
  LRSequence w;
  w.reserve(c.steps.size());
  for (const CurveStep& s : c.steps) {
    const int eps = (s.out == prev3(s.in)) ? +1 : -1;
    w.push_back({tri.edge_of({s.triangle, s.out}), eps});
  }
  return w;
}

/// Closed curve around the puncture at corner k of triangle t, turning left
/// in every triangle.
inline CurveOnSurface puncture_curve(const IdealTriangulation& tri, Side corner) {
  CurveOnSurface c;
  Side cur = corner;
  do {
    c.steps.push_back({cur.triangle, cur.index, prev3(cur.index)});
    const Side nx = tri.glued({cur.triangle, prev3(cur.index)});
    cur = nx;
  } while (cur != corner);
  return c;
}

/// One puncture curve per puncture link.
inline std::vector<CurveOnSurface> puncture_curves(const IdealTriangulation& tri) {
  std::vector<CurveOnSurface> out;
  for (const auto& link : tri.puncture_links()) out.push_back(puncture_curve(tri, link.corners[0]));
  return out;
}

/// Closed curve of slope (p, q) on the built-in once-punctured torus.
inline CurveOnSurface torus_slope_curve(int p, int q) {
  if (std::gcd(p, q) != 1) throw ValidationError("slope must be primitive");
  const double x0 = 0.3183098861837907, y0 = 0.1414213562373095;
  // Crossing parameters t in [0, 1) with the edge crossed (0 = a: y integer,
  // 1 = b: x integer, 2 = c: x - y integer).
  std::vector<std::pair<double, int>> cross;
  auto add = [&](double start, int slope, int edge) {
    if (slope == 0) return;
    const int m = std::abs(slope);
    for (int k = -m - 2; k <= 2 * m + 2; ++k) {
      const double tt = (k - start) / slope;
      if (tt >= 0.0 && tt < 1.0) cross.emplace_back(tt, edge);
    }
  };
  add(x0, p, 1);
  add(y0, q, 0);
  add(x0 - y0, p - q, 2);
  std::sort(cross.begin(), cross.end());
  // Side index of each edge in each triangle.
  const int side_in[2][3] = {{0, 1, 2}, {1, 2, 0}};
  auto frac = [](double v) { return v - std::floor(v); };
  CurveOnSurface c;
  const int n = static_cast<int>(cross.size());
  for (int k = 0; k < n; ++k) {
    const double t0 = cross[k].first;
    const double t1 = (k + 1 < n) ? cross[k + 1].first : cross[0].first + 1.0;
    const double tm = 0.5 * (t0 + t1);
    const double xm = x0 + p * tm, ym = y0 + q * tm;
    const int tri = frac(xm) > frac(ym) ? 0 : 1;
    const int e_in = cross[k].second;
    const int e_out = cross[(k + 1) % n].second;
    c.steps.push_back({tri, side_in[tri][e_in], side_in[tri][e_out]});
  }
  return c;
}

/// Named curves on a triangulation: "a", "b", "ab", "aB", "slope:p/q" on
/// s_1_1, and "puncture:k" on any surface.
inline CurveOnSurface named_curve(const IdealTriangulation& tri, const std::string& name) {
  if (name.rfind("puncture:", 0) == 0) {
    const auto curves = puncture_curves(tri);
    const int k = std::stoi(name.substr(9));
    if (k < 0 || k >= static_cast<int>(curves.size())) {
      throw ValidationError("no puncture " + std::to_string(k));
    }
    return curves[k];
  }
  const bool torus = tri.genus() == 1 && tri.punctures() == 1 &&
                     tri.labeled_key() == builtin_surface("s_1_1").labeled_key();
  if (!torus) throw ValidationError("curve '" + name + "' is only defined on s_1_1");
  if (name == "a") return torus_slope_curve(1, 0);
  if (name == "b") return torus_slope_curve(0, 1);
  if (name == "ab") return torus_slope_curve(1, 1);
  if (name == "aB") return torus_slope_curve(1, -1);
  if (name.rfind("slope:", 0) == 0) {
    const auto rest = name.substr(6);
    const auto slash = rest.find('/');
    if (slash == std::string::npos) throw ValidationError("slope must be written p/q");
    return torus_slope_curve(std::stoi(rest.substr(0, slash)), std::stoi(rest.substr(slash + 1)));
  }
  throw ValidationError("unknown curve '" + name + "'");
}

/// Rewrites a closed curve on T as the same curve on the flipped triangulation.
inline CurveOnSurface reroute_curve(const CurveOnSurface& c, const FlipResult& f) {
  if (!c.cyclic) throw ValidationError("only closed curves can be rerouted");
  const int t = f.old_t.triangle, tp = f.old_tp.triangle;
  auto in_quad = [&](const CurveStep& s) { return s.triangle == t || s.triangle == tp; };
  auto is_diag = [&](int tri, int side) {
    const Side s{tri, side};
    return s == f.old_t || s == f.old_tp;
  };
  const int n = static_cast<int>(c.steps.size());
  int start = -1;
  for (int k = 0; k < n; ++k) {
    const CurveStep& s = c.steps[k];
    if (!(in_quad(s) && is_diag(s.triangle, s.in))) {
      start = k;
      break;
    }
  }
  if (start < 0) throw ValidationError("curve crosses only the flipped edge");
  CurveOnSurface out;
  for (int m = 0; m < n;) {
    const CurveStep& s = c.steps[(start + m) % n];
    if (!in_quad(s)) {
      out.steps.push_back(s);
      ++m;
      continue;
    }
    const Side entry{s.triangle, s.in};
    Side exit{s.triangle, s.out};
    ++m;
    if (is_diag(s.triangle, s.out)) {
      const CurveStep& s2 = c.steps[(start + m) % n];
      exit = {s2.triangle, s2.out};
      ++m;
    }
    const Side ne = f.map_outer(entry).value();
    const Side nx = f.map_outer(exit).value();
    if (ne.triangle == nx.triangle) {
      out.steps.push_back({ne.triangle, ne.index, nx.index});
    } else {
      out.steps.push_back({ne.triangle, ne.index, 2});
      out.steps.push_back({nx.triangle, 2, nx.index});
    }
  }
  return out;
}

/// Random closed strip: random left/right turns until the walk returns to a
/// visited state; the loop from that state is returned.
template <class Rng>
CurveOnSurface random_closed_curve(const IdealTriangulation& tri, Rng& rng) {
  std::uniform_int_distribution<int> tri_dist(0, tri.num_triangles() - 1), side_dist(0, 2),
      turn(0, 1);
  std::vector<int> first_seen(3 * tri.num_triangles(), -1);
  std::vector<CurveStep> walk;
  Side cur{tri_dist(rng), side_dist(rng)};
  while (true) {
    const int state = 3 * cur.triangle + cur.index;
    if (first_seen[state] >= 0) {
      CurveOnSurface c;
      c.steps.assign(walk.begin() + first_seen[state], walk.end());
      return c;
    }
    first_seen[state] = static_cast<int>(walk.size());
    const int out = turn(rng) ? next3(cur.index) : prev3(cur.index);
    walk.push_back({cur.triangle, cur.index, out});
    cur = tri.glued({cur.triangle, out});
  }
}

}  // namespace shearlab
