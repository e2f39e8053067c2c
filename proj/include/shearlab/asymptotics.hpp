#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "shearlab/error.hpp"
#include "shearlab/fenchel_nielsen.hpp"
#include "shearlab/foliation.hpp"
#include "shearlab/norms.hpp"
#include "shearlab/shear.hpp"
#include "shearlab/triangulation.hpp"

namespace shearlab {

struct OrbitLimits {
  std::uint64_t max_nodes = 5'000'000;
  /// Zero selects the automatic margin.
  double prune_margin = 0.0;
  int threads = 1;
};

/// Result of counting the flip orbit of a marked surface inside norm balls.
struct OrbitCount {
  Norm norm = Norm::euclidean;
  std::vector<double> grid;
  std::vector<std::uint64_t> counts_raw;
  std::vector<std::uint64_t> counts_adjusted;
  std::uint64_t nodes_expanded = 0;
  int max_depth = 0;
  double prune_margin = 0.0;
  bool certified = false;
  int stabilizer = 1;
  std::uint64_t key_collisions = 0;
  /// Norms of the counted nodes, ascending. A node stands for `weights[i]`
  /// marked triangulations that differ by a symmetry of the base point.
  std::vector<double> node_norms;
  std::vector<std::uint64_t> weights;
  /// Shears of the counted nodes carried back to the labels of the base
  /// triangulation, in the same order as node_norms.
  std::vector<std::vector<double>> samples;
};

/// Declared order of the stabilizer of the base triangulation in the
/// mapping class group; raw counts are multiplied by it.
inline int stabilizer_multiplicity(const IdealTriangulation& tri) {
  return tri.genus() == 1 && tri.punctures() == 1 ? 6 : 1;
}

/// Evenly spaced grid L_max k / n for k = 1..n.
inline std::vector<double> radius_grid(double l_max, int n) {
  if (n < 1) throw ValidationError("grid needs at least one point");
  std::vector<double> g(n);
  for (int k = 1; k <= n; ++k) g[k - 1] = l_max * k / n;
  return g;
}

namespace detail {

/// Label-free canonical form of a triangulation with shears: the smallest
/// (combinatorial code, rounded shears) over all starting sides.
struct CanonicalForm {
  std::vector<long long> key;
  /// Edge ids in canonical side order.
  std::vector<int> edge_order;
  /// Exact shears in canonical side order.
  std::vector<double> shears;
  /// Number of distinct edge permutations preserving triangulation and shears.
  int symmetries = 1;
};

inline CanonicalForm canonical_form(const ShearVector& s) {
  const IdealTriangulation& t = s.triangulation();
  CanonicalForm best;
  std::vector<std::vector<int>> orders;
  for (int tri = 0; tri < t.num_triangles(); ++tri) {
    for (int k = 0; k < 3; ++k) {
      const auto [code, sides] = t.encode_from({tri, k});
      std::vector<long long> key(code.begin(), code.end());
      std::vector<int> order;
      for (const Side& side : sides) {
        order.push_back(t.edge_of(side));
        key.push_back(std::llround(s[order.back()] * 1e6));
      }
      if (best.key.empty() || key < best.key) {
        best.key = std::move(key);
        orders.assign(1, order);
      } else if (key == best.key) {
        orders.push_back(order);
      }
    }
  }
  best.edge_order = orders.front();
  for (int e : best.edge_order) best.shears.push_back(s[e]);
  std::sort(orders.begin(), orders.end());
  best.symmetries = static_cast<int>(std::unique(orders.begin(), orders.end()) - orders.begin());
  return best;
}

struct OrbitNode {
  ShearVector shear;
  int parent_edge = -1;
  int depth = 0;
};

struct CountedNode {
  double norm = 0.0;
  int symmetries = 1;
  std::vector<double> shears;
};

struct BfsOutcome {
  std::vector<CountedNode> counted;
  /// Order of the symmetry group used to weight counted nodes.
  std::uint64_t group_order = 1;
  std::uint64_t nodes_expanded = 0;
  int max_depth = 0;
  double observed_change = 0.0;
  double margin = 0.0;
  bool hit_limit = false;
  std::uint64_t collisions = 0;

  std::uint64_t weight(const CountedNode& c) const { return group_order / c.symmetries; }
};

/// Level-synchronous BFS. With `adaptive` set the margin grows to four times
/// the largest norm change seen on a flip between two nodes inside the ball.
/// Nodes related by a shear-preserving symmetry share one canonical key and
/// are expanded once; counted nodes carry the size of their symmetry class.
inline BfsOutcome orbit_bfs(const ShearVector& x, double l_max, Norm norm, double margin,
                            bool adaptive, std::uint64_t max_nodes, int threads) {
  const IdealTriangulation& base = x.triangulation();
  const std::vector<int> base_code = base.unlabeled_key();
  const CanonicalForm base_form = canonical_form(x);
  BfsOutcome out;
  out.margin = margin;

  std::map<std::vector<long long>, std::vector<std::vector<double>>> seen;
  auto insert = [&](const CanonicalForm& c) {
    auto& bucket = seen[c.key];
    double scale = 1.0;
    for (double v : c.shears) scale = std::max(scale, std::abs(v));
    for (const auto& v : bucket) {
      double d = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) d = std::max(d, std::abs(v[i] - c.shears[i]));
      if (d <= 1e-9 * scale) return false;
    }
    if (!bucket.empty()) ++out.collisions;
    bucket.push_back(c.shears);
    out.group_order = std::lcm(out.group_order, static_cast<std::uint64_t>(c.symmetries));
    return true;
  };
  auto count_node = [&](const CanonicalForm& c, double n) {
    if (n > l_max) return;
    if (!std::equal(base_code.begin(), base_code.end(), c.key.begin())) return;
    CountedNode node{n, c.symmetries, std::vector<double>(base.num_edges())};
    for (std::size_t i = 0; i < c.edge_order.size(); ++i) {
      node.shears[base_form.edge_order[i]] = c.shears[i];
    }
    out.counted.push_back(std::move(node));
  };

  std::vector<OrbitNode> frontier{{x, -1, 0}};
  insert(base_form);
  count_node(base_form, norm_value(x.values(), norm));
  bool first = true;

  while (!frontier.empty()) {
    // Expand the whole level, possibly in parallel, keeping frontier order.
    std::vector<std::vector<std::optional<ShearVector>>> children(frontier.size());
    std::vector<std::vector<std::optional<CanonicalForm>>> forms(frontier.size());
    auto expand = [&](std::size_t i) {
      const ShearVector& s = frontier[i].shear;
      const IdealTriangulation& t = s.triangulation();
      children[i].resize(t.num_edges());
      forms[i].resize(t.num_edges());
      for (int e = 0; e < t.num_edges(); ++e) {
        if (e == frontier[i].parent_edge || t.is_self_folded(e)) continue;
        try {
          children[i][e] = flip_shears(s, e);
          forms[i][e] = canonical_form(*children[i][e]);
        } catch (const GeometryError&) {
          children[i][e].reset();
        }
      }
    };
    const int nt = std::max(1, std::min<int>(threads, static_cast<int>(frontier.size())));
    if (nt == 1) {
      for (std::size_t i = 0; i < frontier.size(); ++i) expand(i);
    } else {
      std::vector<std::thread> pool;
      for (int k = 0; k < nt; ++k) {
        pool.emplace_back([&, k] {
          for (std::size_t i = k; i < frontier.size(); i += nt) expand(i);
        });
      }
      for (auto& th : pool) th.join();
    }
    out.nodes_expanded += frontier.size();

    std::vector<std::vector<double>> child_norms(frontier.size());
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const double n0 = norm_value(frontier[i].shear.values(), norm);
      child_norms[i].assign(children[i].size(), 0.0);
      for (std::size_t e = 0; e < children[i].size(); ++e) {
        if (!children[i][e]) continue;
        const double n1 = norm_value(children[i][e]->values(), norm);
        child_norms[i][e] = n1;
        if ((n0 <= l_max && n1 <= l_max) || first) {
          out.observed_change = std::max(out.observed_change, std::abs(n1 - n0));
        }
      }
    }
    if (adaptive) out.margin = std::max(out.margin, 4.0 * out.observed_change);
    first = false;

    std::vector<OrbitNode> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      for (std::size_t e = 0; e < children[i].size(); ++e) {
        if (!children[i][e]) continue;
        const double n1 = child_norms[i][e];
        if (n1 > l_max + out.margin) continue;
        if (!insert(*forms[i][e])) continue;
        count_node(*forms[i][e], n1);
        next.push_back({std::move(*children[i][e]), static_cast<int>(e), frontier[i].depth + 1});
        out.max_depth = std::max(out.max_depth, frontier[i].depth + 1);
      }
    }
    if (out.nodes_expanded + next.size() > max_nodes) {
      out.hit_limit = true;
      break;
    }
    frontier = std::move(next);
  }
  std::stable_sort(out.counted.begin(), out.counted.end(),
                   [](const auto& a, const auto& b) { return a.norm < b.norm; });
  return out;
}

inline std::vector<std::uint64_t> counts_on_grid(const BfsOutcome& r, const std::vector<double>& grid) {
  std::vector<std::uint64_t> c;
  std::size_t i = 0;
  std::uint64_t acc = 0;
  for (double l : grid) {
    while (i < r.counted.size() && r.counted[i].norm <= l) acc += r.weight(r.counted[i++]);
    c.push_back(acc);
  }
  return c;
}

}  // namespace detail

/// Counts the nodes of the flip orbit of x whose shear norm is at most each
/// grid radius. Only nodes combinatorially isomorphic to the base
/// triangulation are counted. The result is certified when doubling the
/// prune margin leaves every grid count unchanged.
inline OrbitCount enumerate_orbit(const ShearVector& x, double l_max, Norm norm,
                                  const OrbitLimits& limits, std::vector<double> grid = {}) {
  if (!is_complete(x, 1e-8 * std::max(1.0, norm_value(x.values(), Norm::sup)))) {
    throw ValidationError("base shear vector is not complete");
  }
  if (!(l_max > 0.0) || !std::isfinite(l_max)) throw ValidationError("L_max must be positive");
  if (limits.prune_margin < 0.0) throw ValidationError("prune margin must be nonnegative");
  if (grid.empty()) grid = {l_max};
  if (!std::is_sorted(grid.begin(), grid.end()) || grid.front() <= 0.0 || grid.back() > l_max) {
    throw ValidationError("radius grid must be increasing within (0, L_max]");
  }

  double margin = limits.prune_margin;
  bool hit_limit = false;
  if (margin == 0.0) {
    const auto cal = detail::orbit_bfs(x, l_max, norm, 0.0, true, limits.max_nodes, limits.threads);
    margin = cal.margin;
    hit_limit = cal.hit_limit;
  }
  const auto run = detail::orbit_bfs(x, l_max, norm, margin, false, limits.max_nodes, limits.threads);
  const auto check =
      detail::orbit_bfs(x, l_max, norm, 2.0 * margin, false, limits.max_nodes, limits.threads);

  OrbitCount oc;
  oc.norm = norm;
  oc.grid = grid;
  oc.counts_raw = detail::counts_on_grid(run, grid);
  oc.stabilizer = stabilizer_multiplicity(x.triangulation());
  for (auto c : oc.counts_raw) oc.counts_adjusted.push_back(c * oc.stabilizer);
  oc.nodes_expanded = run.nodes_expanded;
  oc.max_depth = run.max_depth;
  oc.prune_margin = margin;
  oc.key_collisions = run.collisions;
  oc.certified = !hit_limit && !run.hit_limit && !check.hit_limit &&
                 detail::counts_on_grid(check, grid) == oc.counts_raw;
  for (const auto& c : run.counted) {
    oc.node_norms.push_back(c.norm);
    oc.weights.push_back(run.weight(c));
    oc.samples.push_back(c.shears);
  }
  return oc;
}

struct PowerFit {
  double exponent = 0.0;
  double log_coefficient = 0.0;
  double r2 = 0.0;
  int points = 0;
};

/// Least squares fit of log y against log x.
inline PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("fit data size mismatch");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx, dy = std::log(y[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw ValidationError("fit needs distinct radii");
  PowerFit f;
  f.exponent = sxy / sxx;
  f.log_coefficient = my - f.exponent * mx;
  f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  f.points = static_cast<int>(x.size());
  return f;
}

/// Growth exponent of the raw counts over grid radii in [lo, hi] whose count
/// is at least 10.
inline PowerFit fit_exponent(const OrbitCount& oc, double lo, double hi) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < oc.grid.size(); ++i) {
    if (oc.grid[i] >= lo && oc.grid[i] <= hi && oc.counts_raw[i] >= 10) {
      x.push_back(oc.grid[i]);
      y.push_back(static_cast<double>(oc.counts_raw[i]));
    }
  }
  if (x.size() < 5) throw ValidationError("insufficient data: need 5 grid points with count >= 10");
  return fit_power_law(x, y);
}

struct NormRatio {
  double observed = 0.0;
  double predicted = 0.0;
  double relative_gap = 0.0;
  std::uint64_t count1 = 0, count2 = 0;
  bool certified = false;
};

/// Ratio of orbit counts at radius L for two norms against the ratio of the
/// unit-ball volumes on the complete subspace.
inline NormRatio norm_ratio_test(const ShearVector& x, double l, Norm n1, Norm n2,
                                 const OrbitLimits& limits, std::uint64_t samples = 1'000'000,
                                 std::uint64_t seed = 1) {
  NormRatio r;
  const auto c1 = enumerate_orbit(x, l, n1, limits);
  const auto c2 = n1 == n2 ? c1 : enumerate_orbit(x, l, n2, limits);
  r.count1 = c1.counts_raw.back();
  r.count2 = c2.counts_raw.back();
  if (r.count1 == 0 || r.count2 == 0) throw ValidationError("zero orbit count");
  r.certified = c1.certified && c2.certified;
  r.observed = static_cast<double>(r.count1) / static_cast<double>(r.count2);
  if (n1 == n2) {
    r.predicted = 1.0;
  } else {
    const auto& tri = x.triangulation();
    const double v1 = n_delta_relative(tri, n1, samples, seed, limits.threads);
    const double v2 = n_delta_relative(tri, n2, samples, seed + 1, limits.threads);
    r.predicted = v1 / v2;
  }
  r.relative_gap = std::abs(r.observed - r.predicted) / r.predicted;
  return r;
}

/// The closed cone {x : R_i(x) >= 0 for all i}.
struct ClosedCone {
  std::vector<std::vector<double>> functionals;

  double margin(const std::vector<double>& x) const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : functionals) {
      if (r.size() != x.size()) throw ValidationError("functional dimension mismatch");
      double v = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) v += r[i] * x[i];
      m = std::min(m, v);
    }
    return m;
  }
  bool contains(const std::vector<double>& x, double tol = 1e-12) const { return margin(x) >= -tol; }
};

/// Best fit F ~ slope t + intercept on the tail of a ray.
struct LinearAsymptote {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> t;
  std::vector<double> residuals;
  double tail_residual = 0.0;
};

inline LinearAsymptote apl_residual_scan(const std::function<double(const std::vector<double>&)>& f,
                                         const ClosedCone& cone, const std::vector<double>& base,
                                         const std::vector<double>& dir,
                                         const std::vector<double>& t_grid) {
  if (base.size() != dir.size()) throw ValidationError("base and direction differ in dimension");
  if (t_grid.size() < 4 || !std::is_sorted(t_grid.begin(), t_grid.end())) {
    throw ValidationError("t grid must be increasing with at least 4 points");
  }
  auto point = [&](double t) {
    std::vector<double> x(base.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = base[i] + t * dir[i];
    return x;
  };
  std::vector<double> values;
  for (double t : t_grid) {
    const auto x = point(t);
    if (!cone.contains(x)) throw ValidationError("ray exits the cone");
    values.push_back(f(x));
  }
  if (!(cone.margin(point(t_grid.back())) > cone.margin(point(t_grid.front())))) {
    throw ValidationError("ray does not tend to infinity in the cone");
  }
  const std::size_t start = t_grid.size() / 2;
  const double n = static_cast<double>(t_grid.size() - start);
  double mt = 0.0, mv = 0.0;
  for (std::size_t i = start; i < t_grid.size(); ++i) {
    mt += t_grid[i] / n;
    mv += values[i] / n;
  }
  double stt = 0.0, stv = 0.0;
  for (std::size_t i = start; i < t_grid.size(); ++i) {
    stt += (t_grid[i] - mt) * (t_grid[i] - mt);
    stv += (t_grid[i] - mt) * (values[i] - mv);
  }
  LinearAsymptote a;
  a.slope = stv / stt;
  a.intercept = mv - a.slope * mt;
  a.t = t_grid;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    a.residuals.push_back(std::abs(values[i] - (a.slope * t_grid[i] + a.intercept)));
    if (i >= start) a.tail_residual = std::max(a.tail_residual, a.residuals.back());
  }
  return a;
}

struct BoundingResult {
  std::vector<double> sup_ratio;
  std::vector<double> half_sup_ratio;
  bool stable = false;
};

/// Running supremum of (l_i + |tau_i|) / F over the sample ordered by F.
/// Stable when the value at the midpoint is within 5% of the final value for
/// every pants curve.
inline BoundingResult bounding_check(const std::vector<FNPoint>& sample,
                                     const std::vector<double>& f) {
  if (sample.size() != f.size() || sample.empty()) {
    throw ValidationError("bounding check needs one F value per sample point");
  }
  std::vector<std::size_t> order(sample.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return f[a] < f[b]; });
  const std::size_t curves = sample.front().lengths.size();
  BoundingResult r;
  r.sup_ratio.assign(curves, 0.0);
  r.half_sup_ratio.assign(curves, 0.0);
  const std::size_t half = (order.size() + 1) / 2;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    if (!(f[i] > 0.0)) throw ValidationError("F must be positive on the sample");
    if (sample[i].lengths.size() != curves || sample[i].twists.size() != curves) {
      throw ValidationError("sample points differ in pants curves");
    }
    for (std::size_t c = 0; c < curves; ++c) {
      const double v = (sample[i].lengths[c] + std::abs(sample[i].twists[c])) / f[i];
      r.sup_ratio[c] = std::max(r.sup_ratio[c], v);
    }
    if (k + 1 == half) r.half_sup_ratio = r.sup_ratio;
  }
  r.stable = true;
  for (std::size_t c = 0; c < curves; ++c) {
    if (r.sup_ratio[c] > 1.05 * r.half_sup_ratio[c]) r.stable = false;
  }
  return r;
}

/// FN coordinates and norms of the counted orbit nodes on s_1_1, leaving out
/// nodes of zero norm.
inline std::pair<std::vector<FNPoint>, std::vector<double>> torus_orbit_sample(
    const OrbitCount& oc, const std::shared_ptr<const IdealTriangulation>& base) {
  std::pair<std::vector<FNPoint>, std::vector<double>> out;
  for (std::size_t i = 0; i < oc.samples.size(); ++i) {
    if (!(oc.node_norms[i] > 0.0)) continue;
    out.first.push_back(torus_shear_to_fn(ShearVector(base, oc.samples[i])));
    out.second.push_back(oc.node_norms[i]);
  }
  return out;
}

}  // namespace shearlab
