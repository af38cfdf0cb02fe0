#include "ulab/kernels.hpp"

#include "ulab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace ulab {

MomentMatrix moment_matrix(const OrthoBasis& basis) {
  MomentMatrix out;
  const int n = basis.n();
  out.n_ = n;
  const auto& w = basis.grid().weights();
  Eigen::MatrixXd raw = static_cast<double>(n) * (basis.psi().transpose() * (w.asDiagonal() * basis.eps_psi()));
  out.raw_skew_ = (raw + raw.transpose()).cwiseAbs().maxCoeff();
  out.m_ = 0.5 * (raw - raw.transpose());
  for (Eigen::Index j = 0; j < out.m_.rows(); ++j)
    for (Eigen::Index k = j % 2; k < out.m_.cols(); k += 2) out.parity_ = std::max(out.parity_, std::abs(out.m_(j, k)));
  out.smin_ = smallest_singular_value(out.section(n));
  return out;
}

double smallest_singular_value(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

double kernel_K2(const OrthoBasis& basis, double lambda, double mu) {
  const int n = basis.n();
  if (std::abs(lambda - mu) > 1e-8) {
    const auto a = basis.evaluate(lambda, n + 1);
    const auto b = basis.evaluate(mu, n + 1);
    return basis.jacobi_J()[n - 1] * (a[n] * b[n - 1] - a[n - 1] * b[n]) / (lambda - mu);
  }
  const auto a = basis.evaluate(lambda, n);
  const auto b = basis.evaluate(mu, n);
  return a.dot(b);
}

MvIdentityReport mv_identity_check(const OrthoBasis& basis, const MomentMatrix& m) {
  MvIdentityReport rep;
  const int n = basis.n();
  const int mm = basis.potential().degree_half();
  const Eigen::MatrixXd V = v_prime_matrix(basis, n);
  Eigen::MatrixXd E = 0.5 * m.section(n) * V;
  E.diagonal().array() -= 1.0;
  const int lead = n - 2 * mm + 1;
  for (int k = 0; k < n; ++k) {
    const double c = E.col(k).cwiseAbs().maxCoeff();
    if (k < lead)
      rep.leading_defect = std::max(rep.leading_defect, c);
    else
      rep.trailing_max = std::max(rep.trailing_max, c);
    if (c > 1e-6) {
      ++rep.defect_columns;
      if (rep.first_defect_column < 0) rep.first_defect_column = k;
    }
  }
  rep.confined = rep.first_defect_column < 0 || rep.first_defect_column >= lead;
  return rep;
}

namespace {

double r_at(const RSymbol& r, long k) {
  const long a = std::abs(k);
  return a < static_cast<long>(r.r.size()) ? r.r[a] : 0.0;
}

}  // namespace

double dM_relation_check(const MomentMatrix& m, const RSymbol& r, int width) {
  const int n = m.n();
  const int top = static_cast<int>(m.full().rows()) - 1;
  if (n + width + 1 > top || n - width - 1 < 0) throw std::out_of_range("dM_relation_check: window exceeds kmax");
  double res = 0.0;
  for (int j = n - width; j <= n + width; ++j)
    for (int k = n - width; k <= n + width; ++k)
      res = std::max(res, std::abs(m(k, j - 1) - m(k, j + 1) - 2.0 * r_at(r, k - j)));
  return res;
}

double moment_constant(const RSymbol& r, long k) {
  if (k % 2) return 0.0;
  const long K = static_cast<long>(r.r.size());
  double s = 0.0;
  for (long j = std::max(k, -K); j < K; ++j) s += r_at(r, j);
  return 2.0 * s;
}

double moment_constant_limit(const EquilibriumData& eq) { return 2.0 / eq.P(2.0); }

double c_of_n(const MomentMatrix& m, const RSymbol& r) {
  const int n = m.n();
  return m(n - 1, n) - moment_constant(r, 2);
}

ClosedFormReport moment_closed_form(const MomentMatrix& m, const EquilibriumData& eq, const RSymbol& r, int width) {
  ClosedFormReport rep;
  const int n = m.n();
  rep.width = width;
  rep.c = c_of_n(m, r);
  rep.dm_residual = dM_relation_check(m, r, width);
  const double minf = moment_constant_limit(eq);
  for (int j = n - width; j <= n + width; ++j)
    for (int k = n - width; k <= n + width; ++k) {
      if ((j - k) % 2 == 0) continue;
      const double base = moment_constant(r, k - j + 1) - 0.5 * (j % 2 == 0 ? 2.0 : 0.0) * minf;
      const double sg = j % 2 == 0 ? 1.0 : -1.0;
      rep.error_a = std::max(rep.error_a, std::abs(m(j, k) - (base + 0.5 * sg * rep.c)));
      rep.error_b = std::max(rep.error_b, std::abs(m(j, k) - (base - sg * rep.c)));
    }
  // Reading (b) reproduces M_{n-1,n} = M_2 + C(n) exactly; reading (a) is off by 3C/2 there.
  const double bound = rep.dm_residual * width * width;
  const bool ok_a = rep.error_a <= bound, ok_b = rep.error_b <= bound;
  if (ok_a != ok_b)
    rep.chosen = ok_b ? 'b' : 'a';
  else if (ok_b)
    rep.chosen = 'b';
  else
    rep.chosen = rep.error_b <= rep.error_a ? 'b' : 'a';
  return rep;
}

double epsilon_sign(double x) { return x > 0.0 ? 0.5 : (x < 0.0 ? -0.5 : 0.0); }

TracyWidomKernel::TracyWidomKernel(const OrthoBasis& basis, const MomentMatrix& m)
    : basis_(&basis), n_(basis.n()) {
  if (!(m.smin() > 1e-8)) {
    std::ostringstream os;
    os << "kernel_S: moment matrix is singular (smin = " << m.smin() << ")";
    throw SingularSectionError(os.str(), m.smin());
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m.section(n_));
  minv_ = lu.inverse();
  minv_ = 0.5 * (minv_ - minv_.transpose());
}

TracyWidomKernel::Point TracyWidomKernel::point(double x) const {
  Point p;
  p.x = x;
  p.psi = basis_->evaluate(x, n_);
  p.eps = basis_->evaluate_eps(x, n_);
  return p;
}

double TracyWidomKernel::S(const Point& l, const Point& m) const {
  return -static_cast<double>(n_) * l.psi.dot(minv_ * m.eps);
}

double TracyWidomKernel::Sd(const Point& l, const Point& m) const { return l.psi.dot(minv_ * m.psi); }

double TracyWidomKernel::IS(const Point& l, const Point& m) const {
  const double nn = static_cast<double>(n_);
  return -nn * nn * l.eps.dot(minv_ * m.eps);
}

KernelBlock TracyWidomKernel::K1(const Point& l, const Point& m) const {
  KernelBlock b;
  b.a11 = S(l, m);
  b.a12 = Sd(l, m);
  b.a21 = IS(l, m) - epsilon_sign(l.x - m.x);
  b.a22 = S(m, l);
  return b;
}

double TracyWidomKernel::Sd_fd(double l, double m, double h) const {
  const auto pl = point(l);
  return -(S(pl, point(m + h)) - S(pl, point(m - h))) / (2.0 * h * n_);
}

InverseStructureReport inverse_structure_check(const OrthoBasis& basis, const TracyWidomKernel& k,
                                               const EquilibriumData& eq, const RSymbol& r) {
  InverseStructureReport rep;
  const int n = basis.n();
  const int mm = basis.potential().degree_half();
  const double lg = std::log(static_cast<double>(n));
  rep.window = 2 * static_cast<int>(std::ceil(lg * lg));
  const long first = n - semi_infinite_buffer(eq) - rep.window;
  const auto R = toeplitz_R(r, first, n);
  const Eigen::MatrixXd Rd = R.dense();
  const Eigen::MatrixXd Rinv = finite_section_inverse(R).inv;
  const Eigen::MatrixXd D = difference_operator(first, n).dense();
  const Eigen::Index W = n - first;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(W), rstar(W);
  e[W - 1] = 1.0;
  for (Eigen::Index i = 0; i < W; ++i) rstar[i] = r_at(r, n - (first + i));
  const Eigen::VectorXd a = Rinv * e, b = Rinv * rstar;
  rep.b_direct_error = (b - Rd.ldlt().solve(rstar)).cwiseAbs().maxCoeff();
  const Eigen::MatrixXd base = 0.5 * Rinv * D;
  const auto& Minv = k.inverse();
  for (int j = std::max(0, n - rep.window + 1); j < n; ++j)
    for (int l = std::max(0, n - rep.window + 1); l < n; ++l) {
      const Eigen::Index jj = j - first, ll = l - first;
      const double rank1 = 0.5 * b[jj] * a[ll];
      rep.deviation_plus = std::max(rep.deviation_plus, std::abs(Minv(j, l) - base(jj, ll) - rank1));
      rep.deviation_minus = std::max(rep.deviation_minus, std::abs(Minv(j, l) - base(jj, ll) + rank1));
    }
  const Eigen::MatrixXd V = v_prime_matrix(basis, n);
  const int corner = n - 2 * mm + 1;
  std::set<int> diags;
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      if (j >= corner && l >= corner) continue;
      rep.away_deviation = std::max(rep.away_deviation, std::abs(Minv(j, l) - 0.5 * V(j, l)));
      if (j < corner && l < corner && std::abs(Minv(j, l)) > 1e-6) diags.insert(l - j);
    }
  rep.significant_diagonals = static_cast<int>(diags.size());
  return rep;
}

S1Report s1_projection_check(const TracyWidomKernel& k, const std::vector<double>& mus) {
  S1Report rep;
  const auto& basis = k.basis();
  const int n = basis.n();
  const int corner = n - 2 * basis.potential().degree_half() + 1;
  for (double mu : mus) {
    const auto p = k.point(mu);
    const Eigen::VectorXd c = -static_cast<double>(n) * (k.inverse() * p.eps) - p.psi;
    for (int i = 0; i < n; ++i) {
      double& slot = i < corner ? rep.far : rep.near;
      slot = std::max(slot, std::abs(c[i]));
    }
  }
  return rep;
}

double translation_derivative_bound(const OrthoBasis& basis, double lambda0, int points) {
  const double n = basis.n();
  constexpr double h = 1e-4;
  double best = 0.0;
  for (int a = 0; a < points; ++a)
    for (int b = 0; b < points; ++b) {
      const double s1 = -2.0 + 4.0 * a / (points - 1), s2 = -2.0 + 4.0 * b / (points - 1);
      const double up = kernel_K2(basis, lambda0 + (s1 + h) / n, lambda0 + (s2 + h) / n);
      const double dn = kernel_K2(basis, lambda0 + (s1 - h) / n, lambda0 + (s2 - h) / n);
      best = std::max(best, std::abs(up - dn) / (2.0 * h));
    }
  return best;
}

}  // namespace ulab
