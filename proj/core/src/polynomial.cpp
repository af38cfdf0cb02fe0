#include "ulab/polynomial.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/binomial.hpp>

#include <cmath>
#include <stdexcept>

namespace ulab {

std::complex<double> horner(std::span<const std::complex<double>> c, std::complex<double> z) {
  std::complex<double> acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::vector<double> poly_derivative(std::span<const double> c) {
  if (c.size() <= 1) return {0.0};
  std::vector<double> d(c.size() - 1);
  for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = static_cast<double>(i) * c[i];
  return d;
}

std::vector<std::complex<double>> poly_roots(std::span<const double> c) {
  std::size_t deg = c.size();
  while (deg > 0 && c[deg - 1] == 0.0) --deg;
  if (deg == 0) throw std::invalid_argument("poly_roots: zero polynomial");
  deg -= 1;
  if (deg == 0) return {};
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (std::size_t i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (std::size_t i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  std::vector<std::complex<double>> out(deg);
  for (std::size_t i = 0; i < deg; ++i) out[i] = es.eigenvalues()[static_cast<Eigen::Index>(i)];
  return out;
}

std::vector<double> real_roots_in(std::span<const double> c, double lo, double hi, double imag_tol) {
  std::vector<double> out;
  for (auto r : poly_roots(c)) {
    if (std::abs(r.imag()) <= imag_tol * (1.0 + std::abs(r)) && r.real() >= lo && r.real() <= hi)
      out.push_back(r.real());
  }
  return out;
}

std::vector<std::complex<double>> poly_from_roots(std::span<const std::complex<double>> roots) {
  std::vector<std::complex<double>> p{1.0};
  for (auto r : roots) {
    std::vector<std::complex<double>> q(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      q[i + 1] += p[i];
      q[i] -= r * p[i];
    }
    p = std::move(q);
  }
  return p;
}

std::vector<double> symbol_fourier(std::span<const double> c) {
  const int deg = static_cast<int>(c.size()) - 1;
  std::vector<double> g(static_cast<std::size_t>(std::max(deg, 0)) + 1, 0.0);
  // (2cos x)^k = sum_l binom(k,l) e^{i(k-2l)x}
  for (int k = 0; k <= deg; ++k) {
    if (c[k] == 0.0) continue;
    for (int l = 0; l <= k; ++l) {
      const int r = k - 2 * l;
      if (r < 0) break;
      g[r] += c[k] * boost::math::binomial_coefficient<double>(k, l);
    }
  }
  return g;
}

double chebyshev_moment(int p) {
  if (p < 0 || p % 2) return 0.0;
  return boost::math::binomial_coefficient<double>(p, p / 2);
}

double catalan(int j) { return chebyshev_moment(2 * j) / (j + 1); }

}  // namespace ulab
