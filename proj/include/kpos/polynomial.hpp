#pragma once

#include <complex>
#include <span>
#include <vector>

namespace kpos {

using Complex = std::complex<double>;

/// Polynomials are stored with descending powers: {a0, a1, ..., an} is
/// a0 z^n + a1 z^(n-1) + ... + an.
using Poly = std::vector<double>;

/// Roots whose imaginary part is below this fraction of (1 + |root|) are
/// treated as real.
inline constexpr double kRealSnapTol = 1e-8;

/// Degree after trimming leading zeros; -1 for the zero polynomial.
int degree(std::span<const double> p);
/// Drops leading coefficients with |a| <= rel_tol * max|a|.
Poly trim(Poly p, double rel_tol = 0.0);

Poly multiply(std::span<const double> a, std::span<const double> b);
Poly add(std::span<const double> a, std::span<const double> b);
Poly scale(std::span<const double> a, double s);
Poly derivative(std::span<const double> p);
Complex evaluate(std::span<const double> p, Complex z);
double evaluate(std::span<const double> p, double z);

/// Monic polynomial with the given roots; conjugate pairs give real
/// coefficients (imaginary residue is discarded).
Poly from_roots(std::span<const Complex> roots);

/// Divides by (z - root) with synthetic division; `remainder` receives p(root).
Poly deflate(std::span<const double> p, double root, double* remainder = nullptr);

/// Orders values by descending modulus, ties broken by descending real part
/// and then descending imaginary part.
void sort_pole_order(std::vector<Complex>& values);
bool pole_order_less(const Complex& a, const Complex& b);

/// Roots through the eigenvalues of the companion matrix, snapped to the real
/// axis per kRealSnapTol and sorted by sort_pole_order.
/// Throws std::invalid_argument for the zero polynomial.
std::vector<Complex> roots(std::span<const double> p);

inline bool is_real(const Complex& z) { return z.imag() == 0.0; }

}  // namespace kpos
