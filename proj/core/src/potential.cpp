#include "ulab/potential.hpp"

#include "ulab/polynomial.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <stdexcept>

namespace ulab {

Potential::Potential(std::vector<double> even_coeffs, Domain domain)
    : c_(std::move(even_coeffs)), domain_(domain) {
  if (c_.size() < 2) throw std::invalid_argument("potential needs degree >= 2");
  for (double c : c_)
    if (!std::isfinite(c)) throw std::invalid_argument("potential coefficient is not finite");
  if (!(c_.back() > 0.0)) throw std::invalid_argument("leading coefficient must be positive");
  if (!(domain_.d1 > 0.0) || !(domain_.d2 > 0.0))
    throw std::invalid_argument("analyticity domain needs d1 > 0 and d2 > 0");
}

// Both evaluations go through z^2, so V(x) and V(-x) are bit-identical.
double Potential::operator()(double x) const { return horner(std::span<const double>(c_), x * x); }

std::complex<double> Potential::operator()(std::complex<double> z) const {
  return horner(std::span<const double>(c_), z * z);
}

double Potential::derivative(double x) const {
  double acc = 0.0;
  const double t = x * x;
  for (std::size_t j = c_.size() - 1; j >= 1; --j) acc = acc * t + 2.0 * static_cast<double>(j) * c_[j];
  return acc * x;
}

std::complex<double> Potential::derivative(std::complex<double> z) const {
  std::complex<double> acc = 0.0;
  const auto t = z * z;
  for (std::size_t j = c_.size() - 1; j >= 1; --j) acc = acc * t + 2.0 * static_cast<double>(j) * c_[j];
  return acc * z;
}

double Potential::second_derivative(double x) const {
  double acc = 0.0;
  const double t = x * x;
  for (std::size_t j = c_.size() - 1; j >= 1; --j) {
    const double jj = static_cast<double>(j);
    acc = acc * t + 2.0 * jj * (2.0 * jj - 1.0) * c_[j];
  }
  return acc;
}

std::vector<double> Potential::power_coeffs() const {
  std::vector<double> p(2 * c_.size() - 1, 0.0);
  for (std::size_t j = 0; j < c_.size(); ++j) p[2 * j] = c_[j];
  return p;
}

std::vector<double> Potential::derivative_coeffs() const { return poly_derivative(power_coeffs()); }

Potential Potential::rescaled(double s) const {
  std::vector<double> c(c_.size());
  double s2 = 1.0;
  for (std::size_t j = 0; j < c_.size(); ++j) {
    c[j] = c_[j] * s2;
    s2 *= s * s;
  }
  return Potential(std::move(c), domain_);
}

double c_v_bound(const Potential& v) {
  const double a = 2.0 + 0.5 * v.domain().d1;
  // |V'| is even, so scan [0, a] and polish local maxima.
  constexpr int kGrid = 4000;
  const double h = a / kGrid;
  std::vector<double> f(kGrid + 1);
  for (int i = 0; i <= kGrid; ++i) f[i] = std::abs(v.derivative(i * h));
  double best = std::max(f[0], f[kGrid]);
  for (int i = 1; i < kGrid; ++i) {
    best = std::max(best, f[i]);
    if (f[i] >= f[i - 1] && f[i] >= f[i + 1]) {
      auto neg = [&](double x) { return -std::abs(v.derivative(x)); };
      auto r = boost::math::tools::brent_find_minima(neg, (i - 1) * h, (i + 1) * h, 52);
      best = std::max(best, -r.second);
    }
  }
  // Critical points of V' are the real roots of V''.
  auto vpp = poly_derivative(v.derivative_coeffs());
  bool nonzero = false;
  for (double c : vpp) nonzero = nonzero || c != 0.0;
  if (nonzero && vpp.size() > 1) {
    for (double r : real_roots_in(vpp, -a, a)) best = std::max(best, std::abs(v.derivative(r)));
  }
  return best;
}

}  // namespace ulab
