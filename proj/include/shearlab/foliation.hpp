#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "shearlab/error.hpp"
#include "shearlab/norms.hpp"
#include "shearlab/shear.hpp"
#include "shearlab/triangulation.hpp"

namespace shearlab {

/// Horocyclic foliation data: one transverse weight per triangle corner,
/// stored at index 3*t + k. The side k of triangle t joins corners k and k+1,
/// so its measure is w(t,k) + w(t,k+1).
struct FoliationCoords {
  std::shared_ptr<const IdealTriangulation> tri;
  std::vector<double> corner_weights;

  double side_measure(const Side& s) const {
    return corner_weights.at(3 * s.triangle + s.index) +
           corner_weights.at(3 * s.triangle + next3(s.index));
  }

  std::vector<double> edge_measures() const {
    std::vector<double> m(tri->num_edges());
    for (int e = 0; e < tri->num_edges(); ++e) {
      const auto [a, b] = tri->edge_sides(e);
      m[e] = 0.5 * (side_measure(a) + side_measure(b));
    }
    return m;
  }

  /// Largest disagreement between the two sides of an edge.
  double gluing_residual() const {
    double r = 0.0;
    for (int e = 0; e < tri->num_edges(); ++e) {
      const auto [a, b] = tri->edge_sides(e);
      r = std::max(r, std::abs(side_measure(a) - side_measure(b)));
    }
    return r;
  }
};

/// Edges a, b, c, d of the quadrilateral around e, counterclockwise, where
/// a and c follow the diagonal on its two sides.
inline std::array<int, 4> quad_sides(const IdealTriangulation& tri, int e) {
  tri.check_edge(e);
  const auto [s, sp] = tri.edge_sides(e);
  return {tri.edge_of({s.triangle, next3(s.index)}), tri.edge_of({s.triangle, prev3(s.index)}),
          tri.edge_of({sp.triangle, next3(sp.index)}), tri.edge_of({sp.triangle, prev3(sp.index)})};
}

inline double quad_shear(double ma, double mb, double mc, double md) {
  return 0.5 * (ma + mc - mb - md);
}

inline ShearVector shear_from_measures(const std::shared_ptr<const IdealTriangulation>& tri,
                                       const std::vector<double>& m) {
  if (static_cast<int>(m.size()) != tri->num_edges()) {
    throw ValidationError("expected " + std::to_string(tri->num_edges()) + " edge measures, got " +
                          std::to_string(m.size()));
  }
  for (double v : m) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("edge measures must be nonnegative");
  }
  std::vector<double> s(m.size());
  for (int e = 0; e < tri->num_edges(); ++e) {
    const auto q = quad_sides(*tri, e);
    s[e] = quad_shear(m[q[0]], m[q[1]], m[q[2]], m[q[3]]);
  }
  return ShearVector(tri, s);
}

inline ShearVector shear_from_measures(const FoliationCoords& f) {
  for (double w : f.corner_weights) {
    if (w < 0.0) throw ValidationError("corner weights must be nonnegative");
  }
  return shear_from_measures(f.tri, f.edge_measures());
}

namespace detail {

/// Rows: gluing consistency for every edge, then the shear of every edge,
/// as linear functionals of the corner weights.
inline Eigen::MatrixXd foliation_system(const IdealTriangulation& tri) {
  const int ne = tri.num_edges();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * ne, 3 * tri.num_triangles());
  auto add_side = [&](int row, const Side& s, double c) {
    a(row, 3 * s.triangle + s.index) += c;
    a(row, 3 * s.triangle + next3(s.index)) += c;
  };
  for (int e = 0; e < ne; ++e) {
    const auto [s, sp] = tri.edge_sides(e);
    add_side(e, s, 1.0);
    add_side(e, sp, -1.0);
    add_side(ne + e, {s.triangle, next3(s.index)}, 0.5);
    add_side(ne + e, {sp.triangle, next3(sp.index)}, 0.5);
    add_side(ne + e, {s.triangle, prev3(s.index)}, -0.5);
    add_side(ne + e, {sp.triangle, prev3(sp.index)}, -0.5);
  }
  return a;
}

/// Minimum-norm solution of a w = b with the flagged columns held at zero.
inline Eigen::VectorXd min_norm_on(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                   const std::vector<char>& fixed) {
  std::vector<int> cols;
  for (int i = 0; i < a.cols(); ++i) {
    if (!fixed[i]) cols.push_back(i);
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(a.cols());
  if (cols.empty()) return w;
  Eigen::MatrixXd af(a.rows(), cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k) af.col(k) = a.col(cols[k]);
  const Eigen::VectorXd wf = af.completeOrthogonalDecomposition().solve(b);
  for (std::size_t k = 0; k < cols.size(); ++k) w(cols[k]) = wf(k);
  return w;
}

/// min |w|^2 over the affine slice {a x = a w, x >= 0}, by a primal
/// active-set method started from the feasible point w.
inline Eigen::VectorXd nonneg_min_norm(const Eigen::MatrixXd& a, Eigen::VectorXd w) {
  const int n = static_cast<int>(w.size());
  const double tol = 1e-12 * std::max(1.0, w.cwiseAbs().maxCoeff());
  std::vector<char> fixed(n, 0);
  for (int i = 0; i < n; ++i) {
    if (w(i) <= tol) {
      w(i) = 0.0;
      fixed[i] = 1;
    }
  }
  for (int iter = 0; iter < 50 * n + 100; ++iter) {
    std::vector<int> cols;
    for (int i = 0; i < n; ++i) {
      if (!fixed[i]) cols.push_back(i);
    }
    Eigen::MatrixXd af(a.rows(), cols.size());
    Eigen::VectorXd wf(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
      af.col(k) = a.col(cols[k]);
      wf(k) = w(cols[k]);
    }
    Eigen::VectorXd pf = -wf;
    if (!cols.empty()) {
      const auto cod = af.transpose().completeOrthogonalDecomposition();
      pf = -(wf - af.transpose() * cod.solve(wf));
    }
    if (cols.empty() || pf.cwiseAbs().maxCoeff() <= tol) {
      // Stationary on the current face: check the bound multipliers.
      Eigen::VectorXd lambda = Eigen::VectorXd::Zero(a.rows());
      if (!cols.empty()) lambda = af.transpose().completeOrthogonalDecomposition().solve(wf);
      const Eigen::VectorXd grad = a.transpose() * lambda;
      int worst = -1;
      double worst_mu = -tol;
      for (int i = 0; i < n; ++i) {
        if (fixed[i] && -grad(i) < worst_mu) {
          worst_mu = -grad(i);
          worst = i;
        }
      }
      if (worst < 0) return w;
      fixed[worst] = 0;
      continue;
    }
    double alpha = 1.0;
    int block = -1;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (pf(k) < 0.0) {
        const double r = -wf(k) / pf(k);
        if (r < alpha) {
          alpha = r;
          block = cols[k];
        }
      }
    }
    for (std::size_t k = 0; k < cols.size(); ++k) w(cols[k]) += alpha * pf(k);
    if (block >= 0) {
      w(block) = 0.0;
      fixed[block] = 1;
    }
  }
  throw GeometryError("nonnegative solver did not converge");
}

}  // namespace detail

/// Corner weights of the horocyclic foliation realizing a complete shear
/// vector: the minimum-norm nonnegative solution of the linear system.
inline FoliationCoords measures_from_shear(const ShearVector& s) {
  const IdealTriangulation& tri = s.triangulation();
  if (!is_complete(s, 1e-8 * std::max(1.0, norm_value(s.values(), Norm::sup)))) {
    throw ValidationError("shear vector is not complete");
  }
  const int ne = tri.num_edges();
  const Eigen::MatrixXd a = detail::foliation_system(tri);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * ne);
  for (int e = 0; e < ne; ++e) b(ne + e) = s[e];

  // Feasible start: shift along the all-ones kernel vector.
  Eigen::VectorXd w = a.completeOrthogonalDecomposition().solve(b);
  w.array() += std::max(0.0, -w.minCoeff());
  w = detail::nonneg_min_norm(a, w);

  std::vector<char> fixed(w.size(), 0);
  for (int i = 0; i < w.size(); ++i) fixed[i] = w(i) == 0.0;
  Eigen::VectorXd polished = detail::min_norm_on(a, b, fixed);
  if (polished.minCoeff() >= 0.0) w = polished;

  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if ((a * w - b).cwiseAbs().maxCoeff() > 1e-9 * scale || w.minCoeff() < -1e-12 * scale) {
    throw GeometryError("shear outside representable cone");
  }
  FoliationCoords f{s.triangulation_ptr(), {}};
  f.corner_weights.resize(w.size());
  for (int i = 0; i < w.size(); ++i) f.corner_weights[i] = std::max(0.0, w(i));
  return f;
}

/// The ball {x : N(x) <= radius} inside the kernel of `constraints`.
struct NormBallSpec {
  Norm norm = Norm::euclidean;
  double radius = 1.0;
  Eigen::MatrixXd constraints;
};

inline NormBallSpec ball_spec(const IdealTriangulation& tri, Norm norm, double radius) {
  return {norm, radius, incidence_matrix(tri)};
}

struct VolumeEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  int dim = 0;
  std::uint64_t hits = 0;
  double box_volume = 0.0;
};

/// Samples are drawn in fixed chunks; chunk c uses its own generator seeded
/// from (seed, c), so the estimate does not depend on the thread count.
inline constexpr std::uint64_t kVolumeChunk = 1 << 16;

/// Orthonormal basis of the kernel of m, one column per direction.
inline Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& m) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = 1e-10 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) rank += sv(i) > tol;
  return svd.matrixV().rightCols(m.cols() - rank);
}

inline VolumeEstimate mc_ball_volume(const NormBallSpec& spec, std::uint64_t samples,
                                     std::uint64_t seed, int threads = 1) {
  if (samples < 1000) throw ValidationError("at least 1000 samples are required");
  if (!(spec.radius > 0.0) || !std::isfinite(spec.radius)) {
    throw ValidationError("radius must be positive");
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(spec.constraints);
  if (lu.rank() != spec.constraints.rows()) {
    throw ValidationError("constraint matrix must have full row rank");
  }
  const Eigen::MatrixXd q = kernel_basis(spec.constraints);
  const int ambient = static_cast<int>(q.rows()), dim = static_cast<int>(q.cols());
  Eigen::VectorXd half(dim);
  double box = 1.0;
  for (int k = 0; k < dim; ++k) {
    const Eigen::VectorXd col = q.col(k);
    half(k) = spec.radius * std::min(dual_norm_value(col, spec.norm),
                                     euclidean_bound(spec.norm, ambient));
    box *= 2.0 * half(k);
  }

  const std::uint64_t chunks = (samples + kVolumeChunk - 1) / kVolumeChunk;
  std::vector<std::uint64_t> hits(chunks, 0);
  auto run_chunk = [&](std::uint64_t c) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::uint64_t n = std::min(kVolumeChunk, samples - c * kVolumeChunk);
    Eigen::VectorXd y(dim);
    std::uint64_t h = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      for (int k = 0; k < dim; ++k) y(k) = half(k) * u(rng);
      const Eigen::VectorXd x = q * y;
      h += norm_value(x, spec.norm) <= spec.radius;
    }
    hits[c] = h;
  };
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(chunks)));
  if (nt == 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) {
      pool.emplace_back([&, t] {
        for (std::uint64_t c = t; c < chunks; c += nt) run_chunk(c);
      });
    }
    for (auto& th : pool) th.join();
  }

  VolumeEstimate r;
  for (std::uint64_t h : hits) r.hits += h;
  const double p = static_cast<double>(r.hits) / static_cast<double>(samples);
  r.samples = samples;
  r.seed = seed;
  r.dim = dim;
  r.box_volume = box;
  r.estimate = box * p;
  r.std_error = box * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return r;
}

/// Volume of the unit ball of the norm on the complete subspace; equals n_Δ
/// up to one global constant that does not depend on the norm.
inline double n_delta_relative(const IdealTriangulation& tri, Norm norm, std::uint64_t samples,
                               std::uint64_t seed, int threads = 1) {
  return mc_ball_volume(ball_spec(tri, norm, 1.0), samples, seed, threads).estimate;
}

}  // namespace shearlab
