#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "shearlab/error.hpp"

namespace shearlab {

enum class Norm { euclidean, sup, l1 };

inline std::string to_string(Norm n) {
  switch (n) {
    case Norm::euclidean: return "euclidean";
    case Norm::sup: return "sup";
    case Norm::l1: return "l1";
  }
  return "?";
}

inline Norm parse_norm(const std::string& name) {
  if (name == "euclidean" || name == "l2") return Norm::euclidean;
  if (name == "sup" || name == "linf") return Norm::sup;
  if (name == "l1") return Norm::l1;
  throw ValidationError("unknown norm '" + name + "' (expected euclidean, sup or l1)");
}

template <class Vec>
double norm_value(const Vec& x, Norm n) {
  double acc = 0.0;
  for (const double v : x) {
    switch (n) {
      case Norm::euclidean: acc += v * v; break;
      case Norm::sup: acc = std::max(acc, std::abs(v)); break;
      case Norm::l1: acc += std::abs(v); break;
    }
  }
  return n == Norm::euclidean ? std::sqrt(acc) : acc;
}

/// Norm dual to n, evaluated on x.
template <class Vec>
double dual_norm_value(const Vec& x, Norm n) {
  switch (n) {
    case Norm::euclidean: return norm_value(x, Norm::euclidean);
    case Norm::sup: return norm_value(x, Norm::l1);
    case Norm::l1: return norm_value(x, Norm::sup);
  }
  return 0.0;
}

/// Smallest C with |x|_2 <= C N(x) on R^dim.
inline double euclidean_bound(Norm n, int dim) {
  return n == Norm::sup ? std::sqrt(static_cast<double>(dim)) : 1.0;
}

}  // namespace shearlab
