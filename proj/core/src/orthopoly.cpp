#include "ulab/orthopoly.hpp"

#include "ulab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ulab {

namespace {

int default_kmax(int n) { return n + 2 * static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))); }

// Stieltjes/Lanczos on multiplication by x with full reorthogonalization,
// accumulating in T.
template <class T>
void lanczos(const Eigen::VectorXd& x, const Eigen::VectorXd& v0, int kmax, Eigen::MatrixXd& Q,
             std::vector<double>& J, std::vector<double>& qd) {
  const Eigen::Index N = x.size();
  Q.resize(N, kmax + 1);
  Q.col(0) = v0;
  J.assign(kmax, 0.0);
  qd.assign(kmax + 1, 0.0);
  std::vector<T> u(N);
  for (int k = 0; k < kmax; ++k) {
    T qk = 0;
    for (Eigen::Index i = 0; i < N; ++i) {
      u[i] = T(x[i]) * T(Q(i, k));
      qk += u[i] * T(Q(i, k));
    }
    for (Eigen::Index i = 0; i < N; ++i) {
      u[i] -= qk * T(Q(i, k));
      if (k > 0) u[i] -= T(J[k - 1]) * T(Q(i, k - 1));
    }
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j <= k; ++j) {
        T c = 0;
        for (Eigen::Index i = 0; i < N; ++i) c += T(Q(i, j)) * u[i];
        for (Eigen::Index i = 0; i < N; ++i) u[i] -= c * T(Q(i, j));
      }
    }
    T nrm = 0;
    for (Eigen::Index i = 0; i < N; ++i) nrm += u[i] * u[i];
    nrm = std::sqrt(nrm);
    if (!(nrm > 0)) throw BasisError("build_basis: Lanczos breakdown (grid too coarse)");
    for (Eigen::Index i = 0; i < N; ++i) Q(i, k + 1) = static_cast<double>(u[i] / nrm);
  }
  // J_k = <x psi_k, psi_{k+1}>, q_k = <x psi_k, psi_k> from the final vectors.
  for (int k = 0; k <= kmax; ++k) {
    T a = 0, b = 0;
    for (Eigen::Index i = 0; i < N; ++i) {
      const T xv = T(x[i]) * T(Q(i, k));
      a += xv * T(Q(i, k));
      if (k < kmax) b += xv * T(Q(i, k + 1));
    }
    qd[k] = static_cast<double>(a);
    if (k < kmax) J[k] = static_cast<double>(b);
  }
}

}  // namespace

QuadGrid default_grid(const Potential& v, int n, const BasisOptions& opt) {
  const int panels = opt.panels > 0 ? opt.panels : std::max(64, 4 * n);
  return QuadGrid(v.half_width(), panels, opt.order);
}

OrthoBasis build_basis(const Potential& v, int n, const BasisOptions& opt) {
  return build_basis(v, n, default_grid(v, n, opt), opt);
}

OrthoBasis build_basis(const Potential& v, int n, const QuadGrid& grid, const BasisOptions& opt) {
  if (n <= 0 || n % 2) throw std::invalid_argument("build_basis: n must be positive and even");
  OrthoBasis b(v, grid);
  b.n_ = n;
  b.kmax_ = opt.kmax > 0 ? opt.kmax : default_kmax(n);
  if (b.kmax_ + 1 > grid.size()) throw BasisError("build_basis: grid has fewer nodes than basis functions");

  const auto& x = grid.nodes();
  const auto& w = grid.weights();
  const Eigen::Index N = x.size();

  Eigen::VectorXd expo(N);
  for (Eigen::Index i = 0; i < N; ++i) expo[i] = -0.5 * n * v(x[i]);
  const double shift = expo.maxCoeff();
  Eigen::VectorXd v0(N);
  for (Eigen::Index i = 0; i < N; ++i) v0[i] = std::exp(expo[i] - shift) * std::sqrt(w[i]);
  const double nrm = v0.norm();
  v0 /= nrm;
  b.log_c0_ = -shift - std::log(nrm);

  b.extended_ = n > opt.extended_precision_above;
  if (b.extended_)
    lanczos<long double>(x, v0, b.kmax_, b.q_, b.J_, b.qd_);
  else
    lanczos<double>(x, v0, b.kmax_, b.q_, b.J_, b.qd_);

  Eigen::MatrixXd gram = b.q_.transpose() * b.q_;
  gram.diagonal().array() -= 1.0;
  b.ortho_defect_ = gram.cwiseAbs().maxCoeff();

  for (int k = 0; k < b.kmax_; ++k) {
    Eigen::VectorXd r = x.cwiseProduct(b.q_.col(k)) - b.J_[k] * b.q_.col(k + 1) - b.qd_[k] * b.q_.col(k);
    if (k > 0) r -= b.J_[k - 1] * b.q_.col(k - 1);
    b.rec_residual_ = std::max(b.rec_residual_, r.norm());
  }

  b.psi_ = b.q_.array().colwise() / w.array().sqrt();
  b.prefix_ = grid.panel_prefix(b.psi_);
  b.total_ = b.prefix_.row(grid.panels()).transpose();
  b.eps_psi_ = grid.cumulative(b.psi_);
  b.eps_psi_.rowwise() -= 0.5 * b.total_.transpose();

  if (b.ortho_defect_ > opt.orthonormality_tolerance) {
    std::ostringstream os;
    os << "build_basis: orthonormality defect " << b.ortho_defect_ << " exceeds "
       << opt.orthonormality_tolerance;
    throw BasisError(os.str());
  }

  const double L = grid.half_width();
  const int kt = std::min(b.kmax_, static_cast<int>(std::floor(n + 2.0 * std::sqrt(static_cast<double>(n)))));
  const Eigen::VectorXd right = b.evaluate(L, kt + 1);
  const Eigen::VectorXd left = b.evaluate(-L, kt + 1);
  b.tail_max_ = std::max(right.cwiseAbs().maxCoeff(), left.cwiseAbs().maxCoeff());
  if (b.tail_max_ > opt.tail_tolerance) {
    std::ostringstream os;
    os << "build_basis: |psi_k(+-L)| = " << b.tail_max_ << " exceeds " << opt.tail_tolerance
       << "; enlarge the domain (d1)";
    throw BasisError(os.str());
  }
  return b;
}

Eigen::VectorXd OrthoBasis::evaluate(double x, int count) const {
  if (count > kmax_ + 1) throw std::out_of_range("evaluate: index beyond kmax");
  Eigen::VectorXd out(count);
  if (count == 0) return out;
  // psi_k = a_k exp(scale); a is renormalized whenever it drifts.
  double scale = log_c0_ - 0.5 * n_ * potential_(x);
  double a_prev = 0.0, a = 1.0;
  out[0] = std::exp(scale);
  for (int k = 0; k + 1 < count; ++k) {
    double next = (x - qd_[k]) * a;
    if (k > 0) next -= J_[k - 1] * a_prev;
    next /= J_[k];
    a_prev = a;
    a = next;
    const double mag = std::abs(a);
    if (mag > 1e100 || (mag < 1e-100 && mag > 0.0)) {
      const double ls = std::log(mag);
      a /= mag;
      a_prev /= mag;
      scale += ls;
    }
    out[k + 1] = a == 0.0 ? 0.0 : std::copysign(std::exp(std::log(std::abs(a)) + scale), a);
  }
  return out;
}

Eigen::VectorXd OrthoBasis::evaluate_eps(double x, int count) const {
  if (count > kmax_ + 1) throw std::out_of_range("evaluate_eps: index beyond kmax");
  const double L = grid_.half_width();
  Eigen::VectorXd half = 0.5 * total_.head(count);
  if (x <= -L) return -half;
  if (x >= L) return half;
  const int p = grid_.panel_of(x);
  const Eigen::VectorXd pw = grid_.partial_weights(p, x);
  Eigen::VectorXd cum = prefix_.row(p).head(count).transpose() +
                        psi_.block(static_cast<Eigen::Index>(p) * grid_.order(), 0, grid_.order(), count).transpose() * pw;
  return cum - half;
}

Eigen::VectorXd apply_epsilon(const OrthoBasis& basis, int k) {
  if (k < 0 || k > basis.kmax()) throw std::out_of_range("apply_epsilon: index beyond kmax");
  return basis.eps_psi().col(k);
}

Eigen::MatrixXd v_prime_matrix(const OrthoBasis& basis, int size) {
  if (size > basis.kmax() + 1) throw std::out_of_range("v_prime_matrix: size beyond kmax");
  const auto& x = basis.grid().nodes();
  Eigen::VectorXd vp(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) vp[i] = basis.potential().derivative(x[i]);
  const auto Q = basis.weighted().leftCols(size);
  Eigen::MatrixXd m = Q.transpose() * (vp.asDiagonal() * Q);
  for (int j = 0; j < size; ++j)
    for (int l = 0; l < size; ++l) m(j, l) = j == l ? 0.0 : (l > j ? m(j, l) : -m(j, l));
  return m;
}

namespace {

double sup_on(const OrthoBasis& b, int k, double delta) {
  const auto& x = b.grid().nodes();
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (std::abs(x[i]) <= 2.0 - delta) s = std::max(s, std::abs(b.eps_psi()(i, k)));
  return s;
}

}  // namespace

ParityReport parity_bound_check(const OrthoBasis& small, const OrthoBasis& large, double delta) {
  ParityReport r;
  if (delta >= 2.0) {
    r.vacuous = true;
    r.passed = true;
    return r;
  }
  const int n = small.n(), m = large.n();
  if (small.kmax() < n + 1 || large.kmax() < m + 1) throw std::out_of_range("parity_bound_check: kmax too small");
  r.even_small = sup_on(small, n, delta);
  r.even_large = sup_on(large, m, delta);
  r.odd_small = sup_on(small, n + 1, delta);
  r.odd_large = sup_on(large, m + 1, delta);
  r.even_ratio = r.even_small / r.even_large;
  r.odd_ratio = r.odd_small / r.odd_large;
  r.passed = r.even_ratio >= 1.3 && r.even_ratio <= 2.7 && r.odd_ratio >= 1.0 && r.odd_ratio <= 2.0;
  return r;
}

DirichletReport dirichlet_check(const OrthoBasis& basis) {
  DirichletReport r;
  const int n = basis.n();
  r.N = 2 * static_cast<int>(std::ceil(std::pow(static_cast<double>(n), 0.25)));
  const auto& w = basis.grid().weights();
  auto sq = [&](int k) { return (basis.eps_psi().col(k).array().square() * w.array()).sum(); };
  r.value = std::numeric_limits<double>::infinity();
  for (int j = n; j < n + r.N / 2 && j <= basis.kmax(); ++j) {
    const double val = sq(j) + sq(j - 1);
    if (val < r.value) {
      r.value = val;
      r.index = j;
    }
  }
  return r;
}

}  // namespace ulab
