#pragma once

#include "ulab/equilibrium.hpp"
#include "ulab/kernels.hpp"
#include "ulab/orthopoly.hpp"
#include "ulab/potential.hpp"
#include "ulab/toeplitz.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace ulab {

double sine_kernel(double s);
// d/ds sin(pi s)/(pi s).
double sine_kernel_derivative(double s);
// Int_0^s sin(pi t)/(pi t) dt, by Gauss-Legendre quadrature.
double sine_kernel_integral(double s);

struct ScalingWindow {
  double lambda0 = 0.0;
  std::vector<double> s_grid;
  std::vector<int> n_list;
};

// Validates |lambda0| <= 1.8, rho(lambda0) > 0.05, even increasing sizes.
ScalingWindow make_window(const EquilibriumData& eq, double lambda0, std::vector<double> s_grid,
                          std::vector<int> n_list);
std::vector<double> uniform_grid(double lo, double hi, int points);

// Basis, moment matrix and Tracy-Widom kernel for one size, built on demand.
struct SizePipeline {
  OrthoBasis basis;
  MomentMatrix moments;
  std::unique_ptr<TracyWidomKernel> kernel;  // null when M is singular
};

class Laboratory {
 public:
  explicit Laboratory(Potential v, BasisOptions options = {});

  const Potential& potential() const { return v_; }
  const EquilibriumData& equilibrium() const { return eq_; }
  const RSymbol& r_symbol() const { return r_; }
  const BasisOptions& options() const { return opt_; }

  const SizePipeline& at(int n);
  // Builds the missing sizes, concurrently when hardware allows.
  void prepare(std::span<const int> n_list);

 private:
  Potential v_;
  BasisOptions opt_;
  EquilibriumData eq_;
  RSymbol r_;
  std::mutex mu_;
  std::map<int, std::unique_ptr<SizePipeline>> cache_;
};

struct ConvergenceRow {
  int n = 0;
  double error = 0.0;
  double diag_error = 0.0;
};

struct ConvergenceTable {
  double lambda0 = 0.0;
  std::vector<ConvergenceRow> rows;
  bool decreasing = false;
};

// max over the s-grid of |K2 / (n rho) - sinc(s1 - s2)| at lambda = lambda0 + s/(n rho).
ConvergenceTable unitary_bulk_convergence(Laboratory& lab, const ScalingWindow& w);

// Scaled blocks: S/(n rho), Sd/(n rho^2), (IS - n eps)/n, S(mu,lambda)/(n rho).
KernelBlock scaled_block(const TracyWidomKernel& k, const TracyWidomKernel::Point& a,
                         const TracyWidomKernel::Point& b, double rho);
KernelBlock limit_block(double s);

struct OrthogonalRow {
  int n = 0;
  double smin = 0.0;
  double errors[4] = {0.0, 0.0, 0.0, 0.0};  // blocks 11, 12, 21, 22
};

struct OrthogonalTable {
  double lambda0 = 0.0;
  std::vector<OrthogonalRow> rows;
  bool decreasing[4] = {false, false, false, false};
  // Sign test for the (1,2) block at the largest size: residual against +d/ds1 sinc and -d/ds1 sinc.
  double sd_residual_plus = 0.0;
  double sd_residual_minus = 0.0;
  int sd_sign = 1;
  bool passed() const { return decreasing[0] && decreasing[1] && decreasing[2] && decreasing[3]; }
};

OrthogonalTable orthogonal_bulk_convergence(Laboratory& lab, const ScalingWindow& w);

struct InvertibilityRow {
  int n = 0;
  double smin = 0.0;
  double inverse_norm = 0.0;
  double odd_smin = 0.0;  // smin of M^{(0,n+1)}
};

struct InvertibilityTable {
  std::vector<InvertibilityRow> rows;
  bool no_collapse = false;  // min smin >= 0.5 smin at the smallest n
  bool odd_singular = false; // every odd-size smin <= 1e-6
};

InvertibilityTable theorem2_scan(Laboratory& lab, std::span<const int> n_list);

struct ClusterRow {
  int n = 0;
  double error = 0.0;
};

struct ClusterTable {
  int k = 0;
  std::vector<ClusterRow> rows;
  bool decreasing = false;
};

// R_n(s_1..s_k) = Tr[B(s1,s2) ... B(sk,s1)] with the scaled blocks, compared to the limit.
ClusterTable cluster_functions(Laboratory& lab, const ScalingWindow& w, int k);
double cluster_value(const std::vector<KernelBlock>& chain);

struct CRow {
  int n = 0;
  double c = 0.0;
  double m_anchor = 0.0;  // M_{n-1,n}
  double m2 = 0.0;
};

std::vector<CRow> c_trace(Laboratory& lab, std::span<const int> n_list);

// Strictly decreasing, or already at the numerical floor.
bool decreasing_sequence(const std::vector<double>& values, double floor = 0.0);

}  // namespace ulab
