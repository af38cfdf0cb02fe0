#pragma once

#include "ulab/equilibrium.hpp"
#include "ulab/orthopoly.hpp"
#include "ulab/toeplitz.hpp"

#include <Eigen/Dense>

#include <vector>

namespace ulab {

// M_{j,l} = n <psi_j, eps psi_l> for j, l <= kmax, antisymmetrized.
class MomentMatrix {
 public:
  int n() const { return n_; }
  const Eigen::MatrixXd& full() const { return m_; }
  double operator()(int j, int l) const { return m_(j, l); }
  // Leading size x size block M^{(0,size)}.
  Eigen::MatrixXd section(int size) const { return m_.topLeftCorner(size, size); }

  double raw_skew_defect() const { return raw_skew_; }
  double parity_defect() const { return parity_; }
  // Smallest singular value of M^{(0,n)}.
  double smin() const { return smin_; }

 private:
  friend MomentMatrix moment_matrix(const OrthoBasis& basis);
  int n_ = 0;
  Eigen::MatrixXd m_;
  double raw_skew_ = 0.0, parity_ = 0.0, smin_ = 0.0;
};

MomentMatrix moment_matrix(const OrthoBasis& basis);

double smallest_singular_value(const Eigen::MatrixXd& a);

// sum_{l<n} psi_l(lambda) psi_l(mu); Christoffel-Darboux form off the diagonal.
double kernel_K2(const OrthoBasis& basis, double lambda, double mu);

struct MvIdentityReport {
  double leading_defect = 0.0;   // max |1/2 M V - I| over the first n-2m+1 columns
  double trailing_max = 0.0;     // max over the last 2m-1 columns
  int defect_columns = 0;        // columns with defect > 1e-6
  int first_defect_column = -1;
  bool confined = false;         // all defect columns within the last 2m-1
};

MvIdentityReport mv_identity_check(const OrthoBasis& basis, const MomentMatrix& m);

// max |M_{k,j-1} - M_{k,j+1} - 2 R_{k-j}| over |j-n|, |k-n| <= width.
double dM_relation_check(const MomentMatrix& m, const RSymbol& r, int width);

// M_k = (1 + (-1)^k) sum_{j>=k} R_j.
double moment_constant(const RSymbol& r, long k);
double moment_constant_limit(const EquilibriumData& eq);  // M_{-inf} = 2/P(2)

// C(n) = M_{n-1,n} - M_2.
double c_of_n(const MomentMatrix& m, const RSymbol& r);

struct ClosedFormReport {
  double c = 0.0;
  double error_a = 0.0;  // M* = M_{k-j+1} - (1/2)(1+(-1)^j) M_{-inf} + (1/2)(-1)^j C
  double error_b = 0.0;  // M* = M_{k-j+1} - (1/2)(1+(-1)^j) M_{-inf} - (-1)^j C
  char chosen = 'b';
  double dm_residual = 0.0;
  int width = 0;
};

ClosedFormReport moment_closed_form(const MomentMatrix& m, const EquilibriumData& eq, const RSymbol& r, int width);

struct KernelBlock {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
};

double epsilon_sign(double x);  // (1/2) sign(x), 0 at 0

// Scalar Tracy-Widom kernel and its transforms. Holds a reference to the basis.
class TracyWidomKernel {
 public:
  TracyWidomKernel(const OrthoBasis& basis, const MomentMatrix& m);

  struct Point {
    double x = 0.0;
    Eigen::VectorXd psi;  // psi_0..psi_{n-1}(x)
    Eigen::VectorXd eps;  // (eps psi_0..psi_{n-1})(x)
  };
  Point point(double x) const;

  // S = -psi(l)^T M^{-1} (n eps psi(m)).
  double S(const Point& l, const Point& m) const;
  // Sd = -n^{-1} d/dmu S = psi(l)^T M^{-1} psi(m).
  double Sd(const Point& l, const Point& m) const;
  // IS = n Int eps(l - l') S(l', m) dl' = -n^2 eps psi(l)^T M^{-1} eps psi(m).
  double IS(const Point& l, const Point& m) const;
  // [S, Sd; IS - eps(l - m), S(m, l)].
  KernelBlock K1(const Point& l, const Point& m) const;

  double S(double l, double m) const { return S(point(l), point(m)); }
  double Sd(double l, double m) const { return Sd(point(l), point(m)); }
  double IS(double l, double m) const { return IS(point(l), point(m)); }
  KernelBlock K1(double l, double m) const { return K1(point(l), point(m)); }
  // Central difference -n^{-1} (S(l, m+h) - S(l, m-h)) / 2h.
  double Sd_fd(double l, double m, double h) const;

  const Eigen::MatrixXd& inverse() const { return minv_; }
  const OrthoBasis& basis() const { return *basis_; }

 private:
  const OrthoBasis* basis_;
  int n_;
  Eigen::MatrixXd minv_;
};

struct InverseStructureReport {
  int window = 0;                 // 2 ceil(log^2 n)
  double deviation_plus = 0.0;    // against 1/2 R^{-1} D + 1/2 b a^T
  double deviation_minus = 0.0;   // against 1/2 R^{-1} D - 1/2 b a^T
  double away_deviation = 0.0;    // max |M^{-1} - V/2| outside the corner block
  int significant_diagonals = 0;  // diagonals above 1e-6 away from the corner
  double b_direct_error = 0.0;    // b against a direct solve of R b = r*
};

InverseStructureReport inverse_structure_check(const OrthoBasis& basis, const TracyWidomKernel& k,
                                               const EquilibriumData& eq, const RSymbol& r);

struct S1Report {
  double far = 0.0;   // max projection of S - K2 on psi_i, i < n - 2m + 1
  double near = 0.0;  // same on the last 2m - 1 indices
};

// Projects S(., mu) - K2(., mu) onto psi_i for the given mu.
S1Report s1_projection_check(const TracyWidomKernel& k, const std::vector<double>& mus);

// max over s in [-2,2]^2 of |(d/ds1 + d/ds2) K2(lambda0 + s1/n, lambda0 + s2/n)|.
double translation_derivative_bound(const OrthoBasis& basis, double lambda0, int points = 21);

}  // namespace ulab
