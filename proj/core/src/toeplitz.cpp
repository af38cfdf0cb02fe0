#include "ulab/toeplitz.hpp"

#include "ulab/errors.hpp"
#include "ulab/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace ulab {

namespace {

constexpr double kPi = std::numbers::pi;

int half_degree(const EquilibriumData& eq) { return eq.degree() / 2 + 1; }

}  // namespace

BandOperator::BandOperator(long first, long last, int band)
    : first_(first), last_(last), band_(band) {
  if (last < first || band < 0) throw std::invalid_argument("BandOperator: bad window or band");
  data_.assign(static_cast<std::size_t>((last - first) * (2 * band + 1)), 0.0);
}

double BandOperator::operator()(long j, long k) const {
  if (!contains(j) || !contains(k) || std::abs(j - k) > band_) return 0.0;
  return data_[slot(j, k)];
}

void BandOperator::set(long j, long k, double value) {
  if (!contains(j) || !contains(k) || std::abs(j - k) > band_)
    throw std::out_of_range("BandOperator::set outside window or band");
  data_[slot(j, k)] = value;
}

Eigen::MatrixXd BandOperator::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size(), size());
  for (long j = first_; j < last_; ++j)
    for (long k = std::max(first_, j - band_); k < std::min(last_, j + band_ + 1); ++k)
      m(j - first_, k - first_) = data_[slot(j, k)];
  return m;
}

double BandOperator::toeplitz_defect(long margin) const {
  double e = 0.0;
  for (long j = first_ + margin; j + 1 < last_ - margin; ++j)
    for (long r = -band_; r <= band_; ++r) e = std::max(e, std::abs((*this)(j, j + r) - (*this)(j + 1, j + 1 + r)));
  return e;
}

BandOperator BandOperator::operator*(const BandOperator& rhs) const {
  if (first_ != rhs.first_ || last_ != rhs.last_) throw std::invalid_argument("BandOperator product: windows differ");
  BandOperator out(first_, last_, band_ + rhs.band_);
  for (long j = first_; j < last_; ++j)
    for (long l = std::max(first_, j - band_); l < std::min(last_, j + band_ + 1); ++l) {
      const double a = data_[slot(j, l)];
      if (a == 0.0) continue;
      for (long k = std::max(first_, l - rhs.band_); k < std::min(last_, l + rhs.band_ + 1); ++k)
        out.data_[out.slot(j, k)] += a * rhs.data_[rhs.slot(l, k)];
    }
  return out;
}

BandOperator BandOperator::operator+(const BandOperator& rhs) const {
  if (first_ != rhs.first_ || last_ != rhs.last_) throw std::invalid_argument("BandOperator sum: windows differ");
  BandOperator out(first_, last_, std::max(band_, rhs.band_));
  for (long j = first_; j < last_; ++j)
    for (long k = std::max(first_, j - out.band_); k < std::min(last_, j + out.band_ + 1); ++k)
      out.data_[out.slot(j, k)] = (*this)(j, k) + rhs(j, k);
  return out;
}

BandOperator BandOperator::operator-(const BandOperator& rhs) const { return *this + rhs.scaled(-1.0); }

BandOperator BandOperator::scaled(double s) const {
  BandOperator out = *this;
  for (auto& x : out.data_) x *= s;
  return out;
}

BandOperator BandOperator::symmetric_toeplitz(long first, long last, std::span<const double> c) {
  const int b = static_cast<int>(c.size()) - 1;
  BandOperator out(first, last, std::max(b, 0));
  for (long j = first; j < last; ++j)
    for (long k = std::max(first, j - b); k < std::min(last, j + b + 1); ++k) out.set(j, k, c[std::abs(j - k)]);
  return out;
}

BandOperator BandOperator::identity(long first, long last) {
  const double one = 1.0;
  return symmetric_toeplitz(first, last, std::span<const double>(&one, 1));
}

namespace {

std::vector<double> dft_reciprocal(const EquilibriumData& eq, int M, int kmax) {
  std::vector<double> f(M);
  for (int l = 0; l < M; ++l) f[l] = 1.0 / eq.P(2.0 * std::cos(2.0 * kPi * l / M));
  std::vector<double> r(kmax + 1);
  for (int k = 0; k <= kmax; ++k) {
    double acc = 0.0;
    for (int l = 0; l < M; ++l) acc += f[l] * std::cos(2.0 * kPi * static_cast<double>((static_cast<long>(k) * l) % M) / M);
    r[k] = acc / M;
  }
  return r;
}

}  // namespace

RSymbol r_coefficients(const EquilibriumData& eq) {
  constexpr int M = 1 << 14;
  constexpr double kCut = 1e-14;
  // Find the truncation point by growing the coefficient count.
  int kmax = 32;
  std::vector<double> r;
  int K = -1;
  while (true) {
    r = dft_reciprocal(eq, M, kmax);
    for (int k = 0; k + 2 <= kmax; ++k) {
      if (std::abs(r[k]) < kCut && std::abs(r[k + 1]) < kCut && std::abs(r[k + 2]) < kCut) {
        K = k;
        break;
      }
    }
    if (K >= 0) break;
    kmax *= 2;
    if (kmax > M / 4) throw EquilibriumError("toeplitz_R: 1/P coefficients do not decay (P nearly singular)");
  }
  RSymbol rs;
  rs.r.assign(r.begin(), r.begin() + std::max(K, 1));
  auto r2 = dft_reciprocal(eq, 2 * M, static_cast<int>(rs.r.size()) - 1);
  for (std::size_t k = 0; k < rs.r.size(); ++k)
    rs.doubling_change = std::max(rs.doubling_change, std::abs(r2[k] - rs.r[k]));
  if (rs.doubling_change > 1e-12) throw EquilibriumError("toeplitz_R: DFT length doubling changed coefficients");
  return rs;
}

BandOperator toeplitz_P(const EquilibriumData& eq, long first, long last) {
  return BandOperator::symmetric_toeplitz(first, last, symbol_fourier(eq.p_coeffs));
}

BandOperator toeplitz_R(const RSymbol& rs, long first, long last) {
  return BandOperator::symmetric_toeplitz(first, last, rs.r);
}

BandOperator toeplitz_R(const EquilibriumData& eq, long first, long last) {
  return toeplitz_R(r_coefficients(eq), first, last);
}

BandOperator model_Vstar(const Potential& v, long first, long last) {
  const auto g = symbol_fourier(v.derivative_coeffs());
  const int b = static_cast<int>(g.size()) - 1;
  BandOperator out(first, last, b);
  for (long j = first; j < last; ++j)
    for (long k = std::max(first, j - b); k < std::min(last, j + b + 1); ++k) {
      const long r = k - j;
      out.set(j, k, r == 0 ? 0.0 : (r > 0 ? g[r] : -g[-r]));
    }
  return out;
}

BandOperator difference_operator(long first, long last) {
  BandOperator out(first, last, 1);
  for (long j = first; j < last; ++j) {
    if (j + 1 < last) out.set(j, j + 1, 1.0);
    if (j - 1 >= first) out.set(j, j - 1, -1.0);
  }
  return out;
}

BandOperator constant_jacobi(long first, long last) {
  BandOperator out(first, last, 1);
  for (long j = first; j + 1 < last; ++j) {
    out.set(j, j + 1, 1.0);
    out.set(j + 1, j, 1.0);
  }
  return out;
}

double symbol_identity_error(const Potential& v, const EquilibriumData& eq, int samples) {
  const auto g = symbol_fourier(v.derivative_coeffs());
  double e = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = 2.0 * kPi * i / samples;
    double lhs = 0.0;
    for (std::size_t k = 1; k < g.size(); ++k) lhs += 2.0 * g[k] * std::sin(static_cast<double>(k) * x);
    e = std::max(e, std::abs(lhs - 2.0 * std::sin(x) * eq.P(2.0 * std::cos(x))));
  }
  return e;
}

FactorizationReport factorization_check(const Potential& v, const EquilibriumData& eq, long first, long last) {
  const auto P = toeplitz_P(eq, first, last);
  const auto D = difference_operator(first, last);
  const auto Vs = model_Vstar(v, first, last);
  const auto PD = P * D, DP = D * P;
  FactorizationReport rep;
  rep.margin = 2 * (std::max(P.band(), Vs.band()) + 1);
  for (long j = first + rep.margin; j < last - rep.margin; ++j)
    for (long k = j - Vs.band() - 1; k <= j + Vs.band() + 1; ++k) {
      rep.vstar_minus_pd = std::max(rep.vstar_minus_pd, std::abs(Vs(j, k) - PD(j, k)));
      rep.pd_minus_dp = std::max(rep.pd_minus_dp, std::abs(PD(j, k) - DP(j, k)));
    }
  return rep;
}

double CorrectionResult::ptilde_at(long i, long k) const {
  if (k < first || k > last) return 0.0;
  const long row = i - (first - 2 * m);
  if (row < 0 || row >= ptilde.rows()) return 0.0;
  return ptilde(row, k - first);
}

CorrectionResult correction_matrices(const OrthoBasis& basis, const EquilibriumData& eq, int N) {
  CorrectionResult res;
  const int n = basis.n();
  const int m = basis.potential().degree_half();
  if (N <= 0) N = 2 * static_cast<int>(std::ceil(std::pow(static_cast<double>(n), 0.25)));
  res.n = n;
  res.N = N;
  res.m = m;
  res.first = n - 2 * N;
  res.last = n + 2 * N;
  const long lo = res.first - 2 * m, hi = res.last + 2 * m;
  if (lo < 0 || hi > basis.kmax())
    throw std::out_of_range("correction_matrices: basis kmax too small for the correction window");

  // True V over [0, hi] and the model V*.
  const Eigen::MatrixXd V = v_prime_matrix(basis, static_cast<int>(hi) + 1);
  const auto g = symbol_fourier(basis.potential().derivative_coeffs());
  auto vstar = [&](long j, long k) {
    const long r = k - j;
    if (r == 0 || std::abs(r) >= static_cast<long>(g.size())) return 0.0;
    return r > 0 ? g[r] : -g[-r];
  };
  auto dV = [&](long j, long k) { return V(j, k) - vstar(j, k); };
  const auto pc = symbol_fourier(eq.p_coeffs);
  auto Pk = [&](long r) { return std::abs(r) < static_cast<long>(pc.size()) ? pc[std::abs(r)] : 0.0; };

  for (long j = lo; j <= hi; ++j)
    for (long k = lo; k <= hi; ++k) res.dv_max = std::max(res.dv_max, std::abs(dV(j, k)));

  // d = (P-section)^{-1} vtilde on [first, last].
  const long W = res.last - res.first + 1;
  Eigen::VectorXd vt(W);
  for (long k = res.first; k <= res.last; ++k) {
    double s = 0.0;
    for (long j = -(2 * m - 1); j <= 2 * m - 1; ++j) s += dV(k + j, k);
    vt[k - res.first] = s;
  }
  const Eigen::MatrixXd Psec = toeplitz_P(eq, res.first, res.last + 1).dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Psec);
  const double emin = es.eigenvalues().cwiseAbs().minCoeff(), emax = es.eigenvalues().cwiseAbs().maxCoeff();
  res.condition_number = emax / emin;
  if (!(res.condition_number <= 1e8))
    throw SingularSectionError("correction_matrices: P-section is ill-conditioned", emin);
  const Eigen::VectorXd d = Psec.ldlt().solve(vt);
  res.d.assign(d.data(), d.data() + d.size());
  res.d_max = d.cwiseAbs().maxCoeff();

  // Ptilde_{j+1,k} = Ptilde_{j-1,k} + dV_{j,k} - P_{k-j-1} d_{j+1}, started from zero at j+1 = k-2m.
  // The recursion steps by two so each parity class accumulates separately.
  res.ptilde = Eigen::MatrixXd::Zero(W + 4 * m + 1, W);
  for (long k = res.first; k <= res.last; ++k) {
    auto at = [&](long i) -> double& { return res.ptilde(i - (res.first - 2 * m), k - res.first); };
    for (long j = k - 2 * m + 1; j <= k + 2 * m - 1; ++j) {
      const double rhs = dV(j, k) - Pk(k - j - 1) * res.d_at(j + 1);
      at(j + 1) = (j - 1 >= k - 2 * m ? at(j - 1) : 0.0) + rhs;
    }
    res.telescoping_residual = std::max({res.telescoping_residual, std::abs(at(k + 2 * m)), std::abs(at(k + 2 * m - 1))});
    at(k + 2 * m) = 0.0;
    at(k + 2 * m - 1) = 0.0;
  }
  res.ptilde_max = res.ptilde.cwiseAbs().maxCoeff();

  // Residual of V = (D + Dtilde)(P + Ptilde) + eps_tilde near n.
  auto PP = [&](long i, long k) { return Pk(i - k) + res.ptilde_at(i, k); };
  for (long k = n - N; k <= n + N; ++k)
    for (long j = k - 2 * m - 1; j <= k + 2 * m + 1; ++j) {
      const double model = (1.0 + res.d_at(j + 1)) * PP(j + 1, k) - PP(j - 1, k);
      const double eps = V(j, k) - model;
      res.eps_tilde_max = std::max(res.eps_tilde_max, std::abs(eps));
      res.eps_identity_residual =
          std::max(res.eps_identity_residual, std::abs(eps + res.d_at(j + 1) * res.ptilde_at(j + 1, k)));
    }
  return res;
}

double SectionInverse::operator()(long j, long k) const {
  const long a = j - first, b = k - first;
  if (a < 0 || b < 0 || a >= inv.rows() || b >= inv.cols()) return 0.0;
  return inv(a, b);
}

SectionInverse finite_section_inverse(const BandOperator& a) {
  SectionInverse out;
  out.first = a.first();
  const Eigen::MatrixXd m = a.dense();
  if (m.rows() == 0) return out;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-14);
  if (!lu.isInvertible()) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    std::ostringstream os;
    os << "finite_section_inverse: singular section, smallest singular value " << smin;
    throw SingularSectionError(os.str(), smin);
  }
  out.inv = lu.inverse();
  return out;
}

DecayFit fit_row_decay(const Eigen::MatrixXd& a, Eigen::Index row, int band, double floor) {
  DecayFit fit;
  const double scale = a.row(row).cwiseAbs().maxCoeff();
  const Eigen::Index reach = std::min(row, a.cols() - 1 - row);
  bool beyond = false;
  for (Eigen::Index r = band + 1; r <= reach; ++r)
    if (std::max(std::abs(a(row, row + r)), std::abs(a(row, row - r))) > 1e-12 * scale) beyond = true;
  if (band > 0 && !beyond) {
    fit.band_limited = true;
    fit.rate = std::numeric_limits<double>::infinity();
    fit.prefactor = scale;
    fit.passed = true;
    return fit;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::pair<double, double>> pts;
  for (Eigen::Index r = 0; r <= reach; ++r) {
    const double v = 0.5 * (std::abs(a(row, row + r)) + std::abs(a(row, row - r)));
    if (v <= floor * std::max(scale, 1e-300)) continue;
    pts.emplace_back(static_cast<double>(r), std::log(v));
  }
  fit.points = static_cast<int>(pts.size());
  if (pts.size() < 2) {
    fit.band_limited = true;
    fit.rate = std::numeric_limits<double>::infinity();
    fit.prefactor = scale;
    fit.passed = true;
    return fit;
  }
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(pts.size());
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  fit.rate = -slope;
  double c = 0.0;
  for (auto [x, y] : pts) c = std::max(c, std::exp(y + fit.rate * x));
  fit.prefactor = c;
  fit.passed = slope < -0.1;
  return fit;
}

BandOperator polynomial_of(const BandOperator& J, std::span<const double> coeffs) {
  BandOperator acc(J.first(), J.last(), 0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
    acc = acc * J + BandOperator::identity(J.first(), J.last()).scaled(*it);
  return acc;
}

Eigen::MatrixXd function_of(const BandOperator& J, const std::function<double(double)>& q) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J.dense());
  Eigen::VectorXd f = es.eigenvalues().unaryExpr(q);
  return es.eigenvectors() * f.asDiagonal() * es.eigenvectors().transpose();
}

DecayFit resolvent_decay_check(const BandOperator& J, std::span<const double> poly_coeffs) {
  const auto QJ = polynomial_of(J, poly_coeffs);
  const int band = static_cast<int>(poly_coeffs.size()) - 1;
  return fit_row_decay(QJ.dense(), J.size() / 2, std::max(band, 1));
}

DecayFit resolvent_decay_check(const BandOperator& J, const std::function<double(double)>& q) {
  return fit_row_decay(function_of(J, q), J.size() / 2);
}

PerturbationReport perturbation_sensitivity(const BandOperator& J, double eps,
                                            const std::function<double(double)>& q) {
  const long i = J.first() + J.size() / 2;
  BandOperator Jp = J;
  Jp.set(i, i + 1, J(i, i + 1) + eps);
  Jp.set(i + 1, i, J(i + 1, i) + eps);
  const Eigen::MatrixXd dq = function_of(Jp, q) - function_of(J, q);
  PerturbationReport rep;
  rep.max_change = dq.cwiseAbs().maxCoeff();
  auto fit = fit_row_decay(dq, i - J.first(), 0, 1e-10);
  rep.rate = fit.rate;
  rep.constant = fit.prefactor / eps;
  return rep;
}

BoundaryFit section_boundary_fit(const EquilibriumData& eq, long size, double rate) {
  const auto inv = finite_section_inverse(toeplitz_R(eq, 0, size));
  const auto pc = symbol_fourier(eq.p_coeffs);
  const int m = half_degree(eq);
  BoundaryFit fit;
  fit.rate = rate;
  for (long j = 0; j < size; ++j) {
    double dev = 0.0;
    for (long k = 0; k < size; ++k) {
      const long r = std::abs(j - k);
      const double p = r < static_cast<long>(pc.size()) ? pc[r] : 0.0;
      dev = std::max(dev, std::abs(inv(j, k) - p));
    }
    const long dist = std::min(j, size - 1 - j);
    if (dist > 4 * m) fit.interior_deviation = std::max(fit.interior_deviation, dev);
    if (dev > 1e-13) ++fit.confined_rows;
    fit.edge_deviation = std::max(fit.edge_deviation, dev);
    // n1 = 0 and n2 = size.
    const double bound = std::exp(-rate * static_cast<double>(j)) + std::exp(-rate * static_cast<double>(size - j));
    fit.constant = std::max(fit.constant, dev / bound);
  }
  fit.passed = rate > 0.0 && std::isfinite(fit.constant) && fit.constant <= 10.0 && fit.interior_deviation < 1e-10;
  return fit;
}

double SymbolFactorization::P1(double z) const { return horner(std::span<const double>(p1_coeffs), z); }
double SymbolFactorization::P2(double z) const { return horner(std::span<const double>(p2_coeffs), z); }
double SymbolFactorization::c(int j) const {
  const int deg = static_cast<int>(p1_coeffs.size()) - 1;
  if (j < 0 || j > deg) return 0.0;
  return p1_coeffs[deg - j];
}

SymbolFactorization factor_symbol(const EquilibriumData& eq) {
  SymbolFactorization sf;
  const int dp = eq.degree();  // 2m - 2
  sf.a_m = eq.p_coeffs.back();
  // z^{2m-2} P(z + 1/z) = sum_i p_i sum_l binom(i,l) z^{2m-2+i-2l}
  std::vector<double> q(2 * dp + 1, 0.0);
  for (int i = 0; i <= dp; ++i) {
    if (eq.p_coeffs[i] == 0.0) continue;
    double b = 1.0;
    for (int l = 0; l <= i; ++l) {
      q[dp + i - 2 * l] += eq.p_coeffs[i] * b;
      b = b * (i - l) / (l + 1);
    }
  }
  std::vector<std::complex<double>> inside, outside;
  if (dp > 0) {
    for (auto r : poly_roots(q)) {
      const double a = std::abs(r);
      if (std::abs(a - 1.0) <= 1e-8) throw EquilibriumError("factor_symbol: root on the unit circle");
      (a < 1.0 ? inside : outside).push_back(r);
    }
    if (static_cast<int>(inside.size()) != dp) throw EquilibriumError("factor_symbol: unbalanced root split");
  }
  sf.roots_inside = inside;
  std::vector<std::complex<double>> recip;
  for (auto r : inside) recip.push_back(1.0 / r);
  auto c1 = poly_from_roots(inside), c2 = poly_from_roots(recip);
  for (auto c : c1) sf.p1_coeffs.push_back(c.real());
  for (auto c : c2) sf.p2_coeffs.push_back(c.real());

  for (int i = 0; i < 256; ++i) {
    const std::complex<double> z = std::polar(1.0, 2.0 * kPi * i / 256);
    const auto lhs = sf.a_m * std::pow(z, -dp) * horner(std::span<const std::complex<double>>(c1), z) *
                     horner(std::span<const std::complex<double>>(c2), z);
    sf.reconstruction_error = std::max(sf.reconstruction_error, std::abs(lhs - eq.P(z + 1.0 / z)));
  }
  sf.p2_identity_error = std::abs(eq.P(2.0) - sf.a_m * sf.P1(1.0) * sf.P1(1.0) * sf.P2(0.0));
  return sf;
}

long semi_infinite_buffer(const EquilibriumData& eq) { return 8L * half_degree(eq) + 64; }

ResolventIdentityReport resolvent_identity_check(const EquilibriumData& eq, long n) {
  ResolventIdentityReport rep;
  const int m = half_degree(eq);
  rep.buffer = semi_infinite_buffer(eq);
  const long first = n + 1 - rep.buffer;
  const auto inv = finite_section_inverse(toeplitz_R(eq, first, n + 1));
  for (int i = 0; i <= m; ++i) rep.lhs += inv(n, n - 2 * i);
  rep.rhs = std::sqrt(inv(n, n)) * std::sqrt(eq.P(2.0));
  const auto sf = factor_symbol(eq);
  const double scale = sf.a_m * sf.P2(0.0);
  rep.root_construction = scale * sf.P1(1.0);
  rep.identity_error = std::abs(rep.lhs - rep.rhs) / std::abs(rep.rhs);
  rep.construction_error = std::abs(rep.lhs - rep.root_construction) / std::abs(rep.root_construction);
  for (long j = 0; j < rep.buffer / 2; ++j)
    rep.row_error = std::max(rep.row_error, std::abs(inv(n, n - j) - scale * sf.c(static_cast<int>(j))));
  for (long k = first; k < first + 4; ++k) rep.boundary_entry = std::max(rep.boundary_entry, std::abs(inv(n, k)));
  return rep;
}

CommutatorReport semi_infinite_commutator_check(const EquilibriumData& eq, long n) {
  CommutatorReport rep;
  const auto rs = r_coefficients(eq);
  rep.buffer = semi_infinite_buffer(eq) + 2 * static_cast<long>(rs.r.size());
  const long first = n - rep.buffer;
  const auto R = toeplitz_R(rs, first, n);
  const auto D = difference_operator(first, n);
  const auto comm = D * R - R * D;
  auto rstar = [&](long k) {
    const long i = n - k;
    return i >= 0 && i < static_cast<long>(rs.r.size()) ? rs.r[i] : 0.0;
  };
  const long margin = static_cast<long>(rs.r.size()) + 2;
  for (long j = first + margin; j < n; ++j)
    for (long k = first + margin; k < n; ++k) {
      const double model = (j == n - 1 ? rstar(k) : 0.0) + (k == n - 1 ? rstar(j) : 0.0);
      rep.error_plus = std::max(rep.error_plus, std::abs(comm(j, k) - model));
      rep.error_minus = std::max(rep.error_minus, std::abs(comm(j, k) + model));
    }
  // With R = R_0 I (constant P) the model vanishes and both signs fit.
  if (std::abs(rep.error_plus - rep.error_minus) <= 1e-14) rep.sign = 0;
  else rep.sign = rep.error_minus < rep.error_plus ? -1 : 1;
  return rep;
}

}  // namespace ulab
