#pragma once

#include "ulab/potential.hpp"
#include "ulab/quadrature.hpp"

#include <Eigen/Dense>

#include <vector>

namespace ulab {

struct BasisOptions {
  int panels = 0;   // 0: max(64, 4n)
  int order = 12;
  int kmax = 0;     // 0: n + 2 ceil(sqrt n)
  double tail_tolerance = 1e-6;
  double orthonormality_tolerance = 1e-8;
  int extended_precision_above = 96;
};

// psi_k = p_k exp(-nV/2), orthonormal on [-L, L] under the grid quadrature.
// psi_k follows lambda psi_k = J_k psi_{k+1} + q_k psi_k + J_{k-1} psi_{k-1},
// with J_k = <lambda psi_k, psi_{k+1}>.
class OrthoBasis {
 public:
  int n() const { return n_; }
  int kmax() const { return kmax_; }
  const QuadGrid& grid() const { return grid_; }
  const Potential& potential() const { return potential_; }

  // Rows are grid nodes, columns k = 0..kmax.
  const Eigen::MatrixXd& psi() const { return psi_; }
  const Eigen::MatrixXd& eps_psi() const { return eps_psi_; }
  // Orthonormal vectors sqrt(w_i) psi_k(x_i).
  const Eigen::MatrixXd& weighted() const { return q_; }

  const std::vector<double>& jacobi_J() const { return J_; }  // size kmax
  const std::vector<double>& jacobi_q() const { return qd_; } // size kmax + 1

  double orthonormality_defect() const { return ortho_defect_; }
  double recurrence_residual() const { return rec_residual_; }
  double tail_max() const { return tail_max_; }
  bool extended_precision() const { return extended_; }

  // psi_0..psi_{count-1} at an arbitrary point, by the scaled recurrence.
  Eigen::VectorXd evaluate(double x, int count) const;
  // (eps psi_k)(x), k < count, from the cumulative panel sums.
  Eigen::VectorXd evaluate_eps(double x, int count) const;

 private:
  friend OrthoBasis build_basis(const Potential& v, int n, const QuadGrid& grid, const BasisOptions& opt);
  OrthoBasis(Potential v, QuadGrid grid) : potential_(std::move(v)), grid_(std::move(grid)) {}

  Potential potential_;
  QuadGrid grid_;
  int n_ = 0;
  int kmax_ = 0;
  double log_c0_ = 0.0;
  Eigen::MatrixXd q_;
  Eigen::MatrixXd psi_;
  Eigen::MatrixXd eps_psi_;
  Eigen::MatrixXd prefix_;
  Eigen::VectorXd total_;
  std::vector<double> J_;
  std::vector<double> qd_;
  double ortho_defect_ = 0.0;
  double rec_residual_ = 0.0;
  double tail_max_ = 0.0;
  bool extended_ = false;
};

QuadGrid default_grid(const Potential& v, int n, const BasisOptions& opt = {});

OrthoBasis build_basis(const Potential& v, int n, const QuadGrid& grid, const BasisOptions& opt = {});
OrthoBasis build_basis(const Potential& v, int n, const BasisOptions& opt = {});

// (eps psi_k) at every grid node.
Eigen::VectorXd apply_epsilon(const OrthoBasis& basis, int k);

// V_{j,l} = sign(l - j) <psi_j, V' psi_l> for j, l < size.
Eigen::MatrixXd v_prime_matrix(const OrthoBasis& basis, int size);

struct ParityReport {
  double even_small = 0.0, even_large = 0.0, even_ratio = 0.0;
  double odd_small = 0.0, odd_large = 0.0, odd_ratio = 0.0;
  bool vacuous = false;
  bool passed = false;
};

// Compares sup |eps psi_k| on [-2+delta, 2-delta] for k = n, n+1 between
// bases of size n and 2n. Even k should scale like 1/n, odd k like n^{-1/2}.
ParityReport parity_bound_check(const OrthoBasis& small, const OrthoBasis& large, double delta);

struct DirichletReport {
  int N = 0;
  int index = 0;          // minimizing j in [n, n + N/2)
  double value = 0.0;     // ||eps psi_j||^2 + ||eps psi_{j-1}||^2
};

DirichletReport dirichlet_check(const OrthoBasis& basis);

}  // namespace ulab
