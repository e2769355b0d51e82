#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "kpos/lti.hpp"

namespace kpos::testing {

/// Determinant by permutation expansion; independent of any factorization.
inline double leibniz_det(const Eigen::MatrixXd& X) {
  const int n = static_cast<int>(X.rows());
  if (n == 0) return 1.0;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double total = 0.0;
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
    double term = inversions % 2 ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) term *= X(i, perm[i]);
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

/// g(t) = sum r_i p_i^(t-1) for t >= 1, evaluated term by term.
inline double direct_impulse(const std::vector<double>& r, const std::vector<double>& p, int t) {
  if (t < 1) return 0.0;
  double g = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) g += r[i] * std::pow(p[i], t - 1);
  return g;
}

inline bool close_rel(double a, double b, double rel, double abs_floor = 0.0) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), abs_floor});
}

/// Distinct poles in (lo, hi) separated by at least `gap`.
inline std::vector<double> random_poles(std::mt19937_64& rng, int n, double lo, double hi, double gap) {
  std::uniform_real_distribution<double> U(lo, hi);
  std::vector<double> p;
  while (static_cast<int>(p.size()) < n) {
    const double c = U(rng);
    if (std::all_of(p.begin(), p.end(), [&](double q) { return std::abs(q - c) >= gap; })) p.push_back(c);
  }
  return p;
}

inline PartialFractionSystem random_pfs(std::mt19937_64& rng, int n, double rlo, double rhi, double plo = 0.05,
                                        double phi = 0.95, double gap = 0.05) {
  std::uniform_real_distribution<double> R(rlo, rhi);
  const auto p = random_poles(rng, n, plo, phi, gap);
  std::vector<PoleResidue> terms;
  for (double q : p) {
    double r = R(rng);
    if (std::abs(r) < 1e-3) r = 1e-3;
    terms.push_back({r, q});
  }
  return PartialFractionSystem(terms);
}

}  // namespace kpos::testing
