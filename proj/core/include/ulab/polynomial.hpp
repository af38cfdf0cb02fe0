#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ulab {

// Coefficient vectors are stored lowest power first: c[i] multiplies z^i.

template <class T>
T horner(std::span<const double> c, T z) {
  T acc = T(0);
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + T(*it);
  return acc;
}

std::complex<double> horner(std::span<const std::complex<double>> c, std::complex<double> z);

std::vector<double> poly_derivative(std::span<const double> c);

// All complex roots via eigenvalues of the companion matrix. Leading
// coefficient must be nonzero.
std::vector<std::complex<double>> poly_roots(std::span<const double> c);

// Real roots in [lo, hi]; a root counts as real when |Im| <= imag_tol * (1 + |root|).
std::vector<double> real_roots_in(std::span<const double> c, double lo, double hi,
                                  double imag_tol = 1e-9);

// Monic polynomial with the given roots, complex coefficients.
std::vector<std::complex<double>> poly_from_roots(std::span<const std::complex<double>> roots);

// g[r] = (1/2pi) Int_{-pi}^{pi} f(2 cos x) e^{irx} dx for r = 0..deg, where f
// has coefficients c. The sequence is symmetric in r, so only r >= 0 is kept.
std::vector<double> symbol_fourier(std::span<const double> c);

// <(2 cos y)^p> averaged over the circle: binom(p, p/2) for even p, else 0.
double chebyshev_moment(int p);

double catalan(int j);

}  // namespace ulab
