#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/special_functions/legendre.hpp>

#include "isp/errors.hpp"

namespace isp {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to (a, b), nodes ascending.
inline GaussRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  const auto pos = boost::math::legendre_p_zeros<double>(n);  // nonnegative zeros, ascending
  std::vector<double> x;
  x.reserve(static_cast<std::size_t>(n));
  for (auto it = pos.rbegin(); it != pos.rend(); ++it)
    if (*it > 0.0) x.push_back(-*it);
  for (double z : pos) x.push_back(z);

  GaussRule r;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (double xi : x) {
    const double dp = boost::math::legendre_p_prime(n, xi);
    r.nodes.push_back(mid + half * xi);
    r.weights.push_back(half * 2.0 / ((1.0 - xi * xi) * dp * dp));
  }
  return r;
}

}  // namespace isp
