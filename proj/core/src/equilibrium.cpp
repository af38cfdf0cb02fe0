#include "ulab/equilibrium.hpp"

#include "ulab/errors.hpp"
#include "ulab/orthopoly.hpp"
#include "ulab/polynomial.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ulab {

namespace {

constexpr double kPi = std::numbers::pi;

EquilibriumData make_data(std::vector<double> p) {
  EquilibriumData eq;
  eq.p_coeffs = std::move(p);
  double pmin = std::min(eq.P(-2.0), eq.P(2.0));
  double pmax = std::max(eq.P(-2.0), eq.P(2.0));
  if (eq.p_coeffs.size() > 2) {
    for (double r : real_roots_in(poly_derivative(eq.p_coeffs), -2.0, 2.0)) {
      pmin = std::min(pmin, eq.P(r));
      pmax = std::max(pmax, eq.P(r));
    }
  }
  eq.delta1 = 1.0 / pmax;
  eq.delta2 = 1.0 / pmin;
  return eq;
}

double p_min_on_support(const EquilibriumData& eq) { return 1.0 / eq.delta2; }

}  // namespace

double EquilibriumData::P(double z) const { return horner(std::span<const double>(p_coeffs), z); }

std::complex<double> EquilibriumData::P(std::complex<double> z) const {
  return horner(std::span<const double>(p_coeffs), z);
}

std::vector<double> equilibrium_polynomial(const Potential& v) {
  // (z^k - w^k)/(z - w) = sum_{i<k} z^i w^{k-1-i}; average over w = 2cos y.
  const auto a = v.derivative_coeffs();
  const int deg = static_cast<int>(a.size()) - 2;
  std::vector<double> p(static_cast<std::size_t>(std::max(deg, 0)) + 1, 0.0);
  for (int k = 1; k < static_cast<int>(a.size()); ++k) {
    if (a[k] == 0.0) continue;
    for (int i = 0; i < k; ++i) p[i] += a[k] * chebyshev_moment(k - 1 - i);
  }
  for (std::size_t i = 1; i < p.size(); i += 2) p[i] = 0.0;  // exact zeros for even V
  return p;
}

EquilibriumData compute_P(const Potential& v) {
  auto p = equilibrium_polynomial(v);
  const double a = v.half_width();
  if (p.size() > 1) {
    auto roots = real_roots_in(p, -a, a);
    if (!roots.empty()) {
      std::ostringstream os;
      os << "P has a real root at " << roots.front() << " inside [-" << a << ", " << a << "]";
      throw EquilibriumError(os.str());
    }
  }
  if (!(horner(std::span<const double>(p), 0.0) > 0.0))
    throw EquilibriumError("P is not positive on the support");
  return make_data(std::move(p));
}

double density(const EquilibriumData& eq, double lambda) {
  if (std::abs(lambda) >= 2.0) return 0.0;
  return eq.P(lambda) * std::sqrt((2.0 - lambda) * (2.0 + lambda)) / (2.0 * kPi);
}

double normalization(const EquilibriumData& eq) {
  // Gauss-Chebyshev of the second kind, exact for the polynomial part.
  const int N = eq.degree() + 8;
  double acc = 0.0;
  for (int i = 1; i <= N; ++i) {
    const double th = i * kPi / (N + 1);
    const double s = std::sin(th);
    acc += s * s * eq.P(2.0 * std::cos(th));
  }
  return acc * 4.0 * kPi / (N + 1) / (2.0 * kPi);
}

double cumulative_density(const EquilibriumData& eq, double lambda) {
  if (lambda <= -2.0) return 0.0;
  if (lambda >= 2.0) return normalization(eq);
  // mu = 2cos th: Int_{th0}^{pi} P(2cos th) 4 sin^2 th dth / (2 pi), smooth in th.
  const double th0 = std::acos(lambda / 2.0);
  static const GaussRule rule = gauss_legendre(48);
  const double half = 0.5 * (kPi - th0), mid = 0.5 * (kPi + th0);
  double acc = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double th = mid + half * rule.nodes[j];
    const double s = std::sin(th);
    acc += rule.weights[j] * eq.P(2.0 * std::cos(th)) * 4.0 * s * s;
  }
  return acc * half / (2.0 * kPi);
}

double effective_potential(const EquilibriumData& eq, const Potential& v, double lambda) {
  thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
  double log_int = 0.0;
  if (std::abs(lambda) < 2.0) {
    // mu = lambda +- t^2 removes the logarithmic singularity at mu = lambda.
    auto right = [&](double t) {
      if (t <= 0.0) return 0.0;
      return 2.0 * std::log(t) * density(eq, lambda + t * t) * 2.0 * t;
    };
    auto left = [&](double t) {
      if (t <= 0.0) return 0.0;
      return 2.0 * std::log(t) * density(eq, lambda - t * t) * 2.0 * t;
    };
    log_int = ts.integrate(right, 0.0, std::sqrt(2.0 - lambda), 1e-15) +
              ts.integrate(left, 0.0, std::sqrt(2.0 + lambda), 1e-15);
  } else {
    auto f = [&](double th) {
      const double s = std::sin(th);
      const double d = std::abs(2.0 * std::cos(th) - lambda);
      if (d == 0.0) return 0.0;
      return std::log(d) * eq.P(2.0 * std::cos(th)) * 4.0 * s * s / (2.0 * kPi);
    };
    log_int = ts.integrate(f, 0.0, kPi, 1e-15);
  }
  return 2.0 * log_int - v(lambda);
}

ConditionReport check_conditions(const Potential& v) {
  ConditionReport rep;
  EquilibriumData eq;
  try {
    eq = compute_P(v);
    rep.c3 = true;
  } catch (const EquilibriumError& e) {
    rep.failures.push_back(std::string("C3: ") + e.what());
    eq = make_data(equilibrium_polynomial(v));
  }
  rep.p_min = p_min_on_support(eq);
  if (rep.p_min <= 0.0 && rep.c3) {
    rep.c3 = false;
    rep.failures.push_back("C3: P is not positive on [-2, 2]");
  }

  rep.normalization = normalization(eq);
  rep.c2 = std::abs(rep.normalization - 1.0) <= 1e-8;
  if (!rep.c2) {
    std::ostringstream os;
    os.precision(12);
    os << "C2: integral of rho is " << rep.normalization << ", expected 1";
    rep.failures.push_back(os.str());
  }

  // C4 on a 2001-point grid over [-a, a].
  const double a = v.half_width();
  constexpr int kPoints = 2001;
  const double u_ref = effective_potential(eq, v, 0.0);
  double in_lo = u_ref, in_hi = u_ref, out_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kPoints; ++i) {
    const double x = -a + 2.0 * a * i / (kPoints - 1);
    const double u = effective_potential(eq, v, x);
    if (std::abs(x) <= 2.0 + 1e-12) {
      in_lo = std::min(in_lo, u);
      in_hi = std::max(in_hi, u);
    } else {
      out_max = std::max(out_max, u);
    }
  }
  rep.u_interior_spread = in_hi - in_lo;
  rep.u_outside_gap = std::isfinite(out_max) ? in_hi - out_max : std::numeric_limits<double>::infinity();
  rep.c4 = rep.u_interior_spread <= 1e-6 && rep.u_outside_gap > 0.0;
  if (!rep.c4) {
    std::ostringstream os;
    os << "C4: effective potential spread " << rep.u_interior_spread << " on the support, outside gap "
       << rep.u_outside_gap;
    rep.failures.push_back(os.str());
  }
  return rep;
}

RescaleResult rescale_to_standard_support(const Potential& v) {
  auto excess = [&](double log_s) {
    return normalization(make_data(equilibrium_polynomial(v.rescaled(std::exp(log_s))))) - 1.0;
  };
  double lo = std::log(1e-3), hi = std::log(1e3);
  const double flo = excess(lo), fhi = excess(hi);
  if (!(flo * fhi < 0.0))
    throw EquilibriumError("rescale: no scale in [1e-3, 1e3] normalizes the equilibrium density");
  boost::uintmax_t iters = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(52);
  auto r = boost::math::tools::toms748_solve(excess, lo, hi, flo, fhi, tol, iters);
  const double s = std::exp(0.5 * (r.first + r.second));
  Potential out = v.rescaled(s);
  auto rep = check_conditions(out);
  if (!rep.passed()) {
    std::string msg = "rescale: rescaled potential fails conditions";
    for (const auto& f : rep.failures) msg += "; " + f;
    throw EquilibriumError(msg);
  }
  return {std::move(out), s};
}

GammaFit estimate_gamma(EquilibriumData& eq, const OrthoBasis& basis) {
  const int n = basis.n();
  const int w = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n))));
  const auto& J = basis.jacobi_J();
  if (n + w >= static_cast<int>(J.size())) throw BasisError("estimate_gamma: Jacobi coefficients too short");
  double sxy = 0.0, sxx = 0.0;
  for (int k = -w; k <= w; ++k) {
    const double x = static_cast<double>(k) / n;
    sxy += x * (J[n + k] - 1.0);
    sxx += x * x;
  }
  GammaFit fit;
  fit.gamma = sxx > 0.0 ? sxy / sxx : 0.0;
  for (int k = -w; k <= w; ++k)
    fit.residual = std::max(fit.residual, std::abs(J[n + k] - 1.0 - fit.gamma * k / n));
  eq.gamma = fit.gamma;
  return fit;
}

}  // namespace ulab
