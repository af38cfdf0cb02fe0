#pragma once

#include "ulab/equilibrium.hpp"
#include "ulab/orthopoly.hpp"
#include "ulab/potential.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace ulab {

// Finite section of a banded operator on the index window [first, last).
class BandOperator {
 public:
  BandOperator(long first, long last, int band);

  long first() const { return first_; }
  long last() const { return last_; }
  long size() const { return last_ - first_; }
  int band() const { return band_; }
  bool contains(long j) const { return j >= first_ && j < last_; }

  // Zero outside the window or the band.
  double operator()(long j, long k) const;
  void set(long j, long k, double value);

  Eigen::MatrixXd dense() const;
  // max |A_{j,k} - A_{j+1,k+1}| over rows at least `margin` from both edges.
  double toeplitz_defect(long margin) const;

  // Product of the two sections on the common window (sums truncated to the window).
  BandOperator operator*(const BandOperator& rhs) const;
  BandOperator operator+(const BandOperator& rhs) const;
  BandOperator operator-(const BandOperator& rhs) const;
  BandOperator scaled(double s) const;

  // Symmetric Toeplitz with A_{j,k} = c[|j-k|].
  static BandOperator symmetric_toeplitz(long first, long last, std::span<const double> c);
  static BandOperator identity(long first, long last);

 private:
  std::size_t slot(long j, long k) const {
    return static_cast<std::size_t>((j - first_) * (2 * band_ + 1) + (k - j + band_));
  }
  long first_, last_;
  int band_;
  std::vector<double> data_;
};

// Fourier coefficients R_k of 1/P(2cos x), k = 0..K, truncated at |R_k| < 1e-14.
struct RSymbol {
  std::vector<double> r;
  double doubling_change = 0.0;  // max change when the DFT length doubles
};

RSymbol r_coefficients(const EquilibriumData& eq);

BandOperator toeplitz_P(const EquilibriumData& eq, long first, long last);
BandOperator toeplitz_R(const EquilibriumData& eq, long first, long last);
BandOperator toeplitz_R(const RSymbol& rs, long first, long last);
// V*_{j,l} = sign(l-j) (1/2pi) Int V'(2cos x) e^{i(j-l)x} dx.
BandOperator model_Vstar(const Potential& v, long first, long last);
// D_{j,j+1} = 1, D_{j,j-1} = -1.
BandOperator difference_operator(long first, long last);
// Constant Jacobi operator with unit off-diagonals.
BandOperator constant_jacobi(long first, long last);

// max |2 sum_k g_k sin kx - 2 sin x P(2cos x)| over `samples` points, g_k the
// cosine coefficients of V'(2cos x).
double symbol_identity_error(const Potential& v, const EquilibriumData& eq, int samples = 512);

struct FactorizationReport {
  double vstar_minus_pd = 0.0;
  double pd_minus_dp = 0.0;
  long margin = 0;
};

FactorizationReport factorization_check(const Potential& v, const EquilibriumData& eq, long first, long last);

struct CorrectionResult {
  int n = 0, N = 0, m = 0;
  long first = 0, last = 0;              // d and the P-section live on [first, last]
  std::vector<double> d;                 // d_j, j = first..last
  Eigen::MatrixXd ptilde;                // rows i = first-2m..last+2m, columns k = first..last
  double d_max = 0.0;
  double dv_max = 0.0;                   // max |V_{j,k} - V*_{j,k}|
  double ptilde_max = 0.0;
  double telescoping_residual = 0.0;     // max |Ptilde_{k+2m,k}|, |Ptilde_{k+2m-1,k}|
  double eps_tilde_max = 0.0;            // max |V - (D + Dtilde)(P + Ptilde)| near n
  double eps_identity_residual = 0.0;    // max |eps_tilde + Dtilde Ptilde|
  double condition_number = 0.0;

  double d_at(long j) const { return j < first || j > last ? 0.0 : d[static_cast<std::size_t>(j - first)]; }
  double ptilde_at(long i, long k) const;
};

// Correction matrices around index n of the basis with N = 2 ceil(n^{1/4})
// unless given. Throws SingularSectionError if the P-section condition number exceeds 1e8.
CorrectionResult correction_matrices(const OrthoBasis& basis, const EquilibriumData& eq, int N = 0);

struct SectionInverse {
  long first = 0;
  Eigen::MatrixXd inv;
  double operator()(long j, long k) const;
};

// Throws SingularSectionError carrying the smallest singular value.
SectionInverse finite_section_inverse(const BandOperator& a);

struct DecayFit {
  double rate = 0.0;         // d in C e^{-d|j-k|}; +inf when band limited
  double prefactor = 0.0;    // C
  bool band_limited = false;
  int points = 0;
  bool passed = false;       // fitted slope < -0.1
};

// Decay of row `row` of a dense matrix away from the diagonal.
DecayFit fit_row_decay(const Eigen::MatrixXd& a, Eigen::Index row, int band = 0, double floor = 1e-13);

BandOperator polynomial_of(const BandOperator& J, std::span<const double> coeffs);
Eigen::MatrixXd function_of(const BandOperator& J, const std::function<double(double)>& q);

DecayFit resolvent_decay_check(const BandOperator& J, std::span<const double> poly_coeffs);
DecayFit resolvent_decay_check(const BandOperator& J, const std::function<double(double)>& q);

struct PerturbationReport {
  double rate = 0.0;
  double constant = 0.0;   // C in |dQ_{i,k}| <= C eps e^{-d|i-k|}
  double max_change = 0.0;
};

// Perturb J_{i,i+1} = J_{i+1,i} by eps at the window centre and measure the change of q(J).
PerturbationReport perturbation_sensitivity(const BandOperator& J, double eps, const std::function<double(double)>& q);

struct BoundaryFit {
  double rate = 0.0;                // d, taken from the resolvent decay fit
  double constant = 0.0;            // smallest C with dev_j <= C (e^{-d|n1-j|} + e^{-d|n2-j|})
  double edge_deviation = 0.0;      // max deviation over all rows
  double interior_deviation = 0.0;  // max deviation at rows farther than 4m from both edges
  int confined_rows = 0;            // rows with deviation above 1e-13
  bool passed = false;
};

// Deviation of the inverse R-section on [0, size) from the P entries, bounded
// by C (e^{-d|n1-j|} + e^{-d|n2-j|}) with the given rate d.
BoundaryFit section_boundary_fit(const EquilibriumData& eq, long size, double rate);

struct SymbolFactorization {
  std::vector<std::complex<double>> roots_inside;
  double a_m = 1.0;
  std::vector<double> p1_coeffs;  // power coefficients, lowest first
  std::vector<double> p2_coeffs;
  double reconstruction_error = 0.0;
  double p2_identity_error = 0.0;  // |P(2) - a_m P1(1)^2 P2(0)|

  double P1(double z) const;
  double P2(double z) const;
  // c_j of P1(z) = sum_j c_j z^{2m-2-j}.
  double c(int j) const;
};

SymbolFactorization factor_symbol(const EquilibriumData& eq);

struct ResolventIdentityReport {
  double lhs = 0.0;               // sum_i inv_{n,n-2i} on the buffered section
  double rhs = 0.0;               // inv_{n,n}^{1/2} P(2)^{1/2}
  double root_construction = 0.0; // a_m P2(0) P1(1)
  double identity_error = 0.0;    // relative |lhs - rhs|
  double construction_error = 0.0;// relative |lhs - root_construction|
  double row_error = 0.0;         // max |inv_{n,n-j} - a_m P2(0) c_j|
  double boundary_entry = 0.0;    // max |inv_{n,k}| at the artificial far edge
  long buffer = 0;
};

ResolventIdentityReport resolvent_identity_check(const EquilibriumData& eq, long n);

struct CommutatorReport {
  double error_plus = 0.0;   // against +(e r*^T + r* e^T)
  double error_minus = 0.0;  // against -(e r*^T + r* e^T)
  int sign = 0;              // the sign that matches; 0 when both do
  long buffer = 0;
};

// [D, R] on the semi-infinite section (-inf, n) against the rank-two form with r*_{n-i} = R_i.
CommutatorReport semi_infinite_commutator_check(const EquilibriumData& eq, long n);

// Semi-infinite sections realized with this many buffer indices.
long semi_infinite_buffer(const EquilibriumData& eq);

}  // namespace ulab
