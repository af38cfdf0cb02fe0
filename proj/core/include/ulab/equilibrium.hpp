#pragma once

#include "ulab/potential.hpp"

#include <complex>
#include <limits>
#include <string>
#include <vector>

namespace ulab {

class OrthoBasis;

// Equilibrium data for a one-cut even potential with support [-2, 2]:
// rho(lambda) = P(lambda) sqrt(4 - lambda^2) / (2 pi).
struct EquilibriumData {
  std::vector<double> p_coeffs;  // power coefficients, degree 2m-2
  double delta1 = 0.0;           // inf of 1/P on [-2, 2]
  double delta2 = 0.0;           // sup of 1/P on [-2, 2]
  double gamma = std::numeric_limits<double>::quiet_NaN();

  double P(double z) const;
  std::complex<double> P(std::complex<double> z) const;
  int degree() const { return static_cast<int>(p_coeffs.size()) - 1; }
};

// Coefficients of P from the angular average of the divided difference of V'.
// No positivity check.
std::vector<double> equilibrium_polynomial(const Potential& v);

// Throws EquilibriumError if P has a real root in [-2-d1/2, 2+d1/2].
EquilibriumData compute_P(const Potential& v);

double density(const EquilibriumData& eq, double lambda);

// Integral of rho over [-2, 2].
double normalization(const EquilibriumData& eq);

// Integral of rho over [-2, lambda].
double cumulative_density(const EquilibriumData& eq, double lambda);

// u(lambda) = 2 Int log|mu - lambda| rho(mu) dmu - V(lambda).
double effective_potential(const EquilibriumData& eq, const Potential& v, double lambda);

struct ConditionReport {
  bool c2 = false;  // normalization on [-2, 2]
  bool c3 = false;  // P > 0 on the extended interval
  bool c4 = false;  // u constant on the support, strictly smaller outside
  double normalization = 0.0;
  double p_min = 0.0;           // min of P over [-2, 2]
  double u_interior_spread = 0.0;
  double u_outside_gap = 0.0;   // u_ref - max u outside the support (positive when C4 holds)
  std::vector<std::string> failures;

  bool passed() const { return c2 && c3 && c4; }
};

ConditionReport check_conditions(const Potential& v);

struct RescaleResult {
  Potential potential;
  double scale;
};

// V(s lambda) with s chosen so that the equilibrium support is [-2, 2].
RescaleResult rescale_to_standard_support(const Potential& v);

struct GammaFit {
  double gamma = 0.0;
  double residual = 0.0;  // max |J_{n+k} - 1 - gamma k/n| over |k| <= sqrt(n)
};

// Least-squares slope of J_{n+k} - 1 against k/n; also stores it in eq.gamma.
GammaFit estimate_gamma(EquilibriumData& eq, const OrthoBasis& basis);

}  // namespace ulab
