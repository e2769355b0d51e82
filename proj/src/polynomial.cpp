#include "kpos/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kpos {

int degree(std::span<const double> p) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] != 0.0) return static_cast<int>(p.size() - i) - 1;
  }
  return -1;
}

Poly trim(Poly p, double rel_tol) {
  double peak = 0.0;
  for (double a : p) peak = std::max(peak, std::abs(a));
  std::size_t lead = 0;
  while (lead < p.size() && std::abs(p[lead]) <= rel_tol * peak) ++lead;
  p.erase(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(lead));
  return p;
}

Poly multiply(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly add(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::max(a.size(), b.size());
  Poly out(n, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[n - a.size() + i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[n - b.size() + i] += b[i];
  return out;
}

Poly scale(std::span<const double> a, double s) {
  Poly out(a.begin(), a.end());
  for (double& v : out) v *= s;
  return out;
}

Poly derivative(std::span<const double> p) {
  if (p.size() <= 1) return {0.0};
  Poly out(p.size() - 1);
  const std::size_t n = p.size() - 1;
  for (std::size_t i = 0; i < n; ++i) out[i] = p[i] * static_cast<double>(n - i);
  return out;
}

Complex evaluate(std::span<const double> p, Complex z) {
  Complex acc = 0.0;
  for (double a : p) acc = acc * z + a;
  return acc;
}

double evaluate(std::span<const double> p, double z) {
  double acc = 0.0;
  for (double a : p) acc = acc * z + a;
  return acc;
}

Poly from_roots(std::span<const Complex> rts) {
  std::vector<Complex> c{1.0};
  for (const Complex& r : rts) {
    std::vector<Complex> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i] += c[i];
      next[i + 1] -= r * c[i];
    }
    c = std::move(next);
  }
  Poly out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

Poly deflate(std::span<const double> p, double root, double* remainder) {
  if (p.empty()) {
    if (remainder) *remainder = 0.0;
    return {};
  }
  Poly q(p.size() - 1);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    acc = acc * root + p[i];
    q[i] = acc;
  }
  acc = acc * root + p.back();
  if (remainder) *remainder = acc;
  return q;
}

bool pole_order_less(const Complex& a, const Complex& b) {
  // "less" means "comes first" in the pole ordering.
  const double ma = std::abs(a), mb = std::abs(b);
  const double tie = 1e-12 * std::max({1.0, ma, mb});
  if (std::abs(ma - mb) > tie) return ma > mb;
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

void sort_pole_order(std::vector<Complex>& values) {
  std::stable_sort(values.begin(), values.end(), pole_order_less);
}

std::vector<Complex> roots(std::span<const double> p_in) {
  Poly p = trim(Poly(p_in.begin(), p_in.end()));
  if (p.empty()) throw std::invalid_argument("roots: zero polynomial");
  const int n = static_cast<int>(p.size()) - 1;
  std::vector<Complex> out;
  if (n == 0) return out;
  // Roots at the origin are exact: strip trailing zeros first.
  int origin = 0;
  while (p.size() > 1 && p.back() == 0.0) {
    p.pop_back();
    ++origin;
  }
  const int m = static_cast<int>(p.size()) - 1;
  if (m == 1) {
    out.emplace_back(-p[1] / p[0], 0.0);
  } else if (m > 1) {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) companion(0, j) = -p[static_cast<std::size_t>(j) + 1] / p[0];
    for (int i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw std::runtime_error("roots: eigenvalue iteration failed");
    for (int i = 0; i < m; ++i) {
      Complex z = solver.eigenvalues()[i];
      if (std::abs(z.imag()) <= kRealSnapTol * (1.0 + std::abs(z))) z = Complex(z.real(), 0.0);
      out.push_back(z);
    }
  }
  for (int i = 0; i < origin; ++i) out.emplace_back(0.0, 0.0);
  sort_pole_order(out);
  return out;
}

}  // namespace kpos
