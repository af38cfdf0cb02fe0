#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ulab {

// Analyticity rectangle: Re z in [-2-d1, 2+d1], |Im z| <= d2.
struct Domain {
  double d1 = 3.0;
  double d2 = 1.0;
};

// Even polynomial V(z) = sum_j c_j z^{2j}, j = 0..m.
class Potential {
 public:
  explicit Potential(std::vector<double> even_coeffs, Domain domain = {});

  double operator()(double x) const;
  std::complex<double> operator()(std::complex<double> z) const;
  double derivative(double x) const;
  std::complex<double> derivative(std::complex<double> z) const;
  double second_derivative(double x) const;

  int degree_half() const { return static_cast<int>(c_.size()) - 1; }
  std::span<const double> even_coeffs() const { return c_; }
  const Domain& domain() const { return domain_; }
  // L = 2 + d1/2, the half-width of the truncated spectral interval.
  double half_width() const { return 2.0 + 0.5 * domain_.d1; }

  // Full power-series coefficients of V and V' (index = power).
  std::vector<double> power_coeffs() const;
  std::vector<double> derivative_coeffs() const;

  // V(s lambda).
  Potential rescaled(double s) const;

 private:
  std::vector<double> c_;
  Domain domain_;
};

// max |V'| over [-2-d1/2, 2+d1/2].
double c_v_bound(const Potential& v);

}  // namespace ulab
