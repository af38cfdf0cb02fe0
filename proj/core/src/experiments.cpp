#include "ulab/experiments.hpp"

#include "ulab/errors.hpp"
#include "ulab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace ulab {

namespace {

constexpr double kPi = std::numbers::pi;

struct ScaledPoint {
  TracyWidomKernel::Point p;
  Eigen::VectorXd minv_psi;  // M^{-1} psi
  Eigen::VectorXd minv_eps;  // M^{-1} eps psi
};

// Everything the four blocks need at one grid point, so a pair costs O(n).
ScaledPoint scaled_point(const TracyWidomKernel& k, double x) {
  ScaledPoint out;
  out.p = k.point(x);
  out.minv_psi = k.inverse() * out.p.psi;
  out.minv_eps = k.inverse() * out.p.eps;
  return out;
}

// Same formulas as TracyWidomKernel::S/Sd/IS, with the products cached.
KernelBlock pair_block(const ScaledPoint& a, const ScaledPoint& b, double n, double rho) {
  const double s_ab = -n * a.p.psi.dot(b.minv_eps);
  const double s_ba = -n * b.p.psi.dot(a.minv_eps);
  const double sd = a.p.psi.dot(b.minv_psi);
  const double is = -n * n * a.p.eps.dot(b.minv_eps);
  KernelBlock out;
  out.a11 = s_ab / (n * rho);
  out.a12 = sd / (n * rho * rho);
  out.a21 = is / n - epsilon_sign(a.p.x - b.p.x);
  out.a22 = s_ba / (n * rho);
  return out;
}

std::vector<double> scaled_abscissae(const ScalingWindow& w, int n, double rho) {
  std::vector<double> x;
  x.reserve(w.s_grid.size());
  for (double s : w.s_grid) x.push_back(w.lambda0 + s / (n * rho));
  return x;
}

double block_error(const KernelBlock& a, const KernelBlock& b, int which) {
  switch (which) {
    case 0: return std::abs(a.a11 - b.a11);
    case 1: return std::abs(a.a12 - b.a12);
    case 2: return std::abs(a.a21 - b.a21);
    default: return std::abs(a.a22 - b.a22);
  }
}

}  // namespace

double sine_kernel(double s) {
  if (std::abs(s) < 1e-12) return 1.0;
  return std::sin(kPi * s) / (kPi * s);
}

double sine_kernel_derivative(double s) {
  if (std::abs(s) < 1e-4) {
    // Odd Taylor series: -(pi^2/3) s + (pi^4/30) s^3.
    const double p2 = kPi * kPi;
    return -p2 / 3.0 * s + p2 * p2 / 30.0 * s * s * s;
  }
  return std::cos(kPi * s) / s - std::sin(kPi * s) / (kPi * s * s);
}

double sine_kernel_integral(double s) {
  static const GaussRule rule = gauss_legendre(48);
  // One panel per unit length keeps the integrand well resolved.
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(s))));
  const double h = s / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = p * h;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      sum += 0.5 * h * rule.weights[i] * sine_kernel(a + 0.5 * h * (rule.nodes[i] + 1.0));
  }
  return sum;
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
  if (points < 1) throw std::invalid_argument("uniform_grid: need at least one point");
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  for (int i = 0; i < points; ++i) g[i] = lo + (hi - lo) * i / (points - 1);
  return g;
}

ScalingWindow make_window(const EquilibriumData& eq, double lambda0, std::vector<double> s_grid,
                          std::vector<int> n_list) {
  if (!(std::abs(lambda0) <= 1.8)) throw std::invalid_argument("scaling window: |lambda0| must be <= 1.8");
  if (!(density(eq, lambda0) > 0.05)) throw std::invalid_argument("scaling window: rho(lambda0) must exceed 0.05");
  if (s_grid.empty()) throw std::invalid_argument("scaling window: empty s-grid");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 2 || n_list[i] % 2 != 0) throw std::invalid_argument("scaling window: sizes must be even");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw std::invalid_argument("scaling window: sizes must increase");
  }
  return {lambda0, std::move(s_grid), std::move(n_list)};
}

Laboratory::Laboratory(Potential v, BasisOptions options) : v_(std::move(v)), opt_(options) {
  const auto report = check_conditions(v_);
  if (!report.passed()) {
    std::ostringstream os;
    os << "potential fails the one-cut conditions:";
    for (const auto& f : report.failures) os << ' ' << f << ';';
    throw EquilibriumError(os.str());
  }
  eq_ = compute_P(v_);
  r_ = r_coefficients(eq_);
}

namespace {

std::unique_ptr<SizePipeline> build_pipeline(const Potential& v, int n, const BasisOptions& opt) {
  auto basis = build_basis(v, n, opt);
  auto out = std::unique_ptr<SizePipeline>(new SizePipeline{std::move(basis), {}, nullptr});
  out->moments = moment_matrix(out->basis);
  if (out->moments.smin() > 1e-8) out->kernel = std::make_unique<TracyWidomKernel>(out->basis, out->moments);
  return out;
}

}  // namespace

const SizePipeline& Laboratory::at(int n) {
  {
    std::lock_guard lock(mu_);
    auto it = cache_.find(n);
    if (it != cache_.end()) return *it->second;
  }
  auto built = build_pipeline(v_, n, opt_);
  std::lock_guard lock(mu_);
  auto [it, inserted] = cache_.emplace(n, std::move(built));
  return *it->second;
}

void Laboratory::prepare(std::span<const int> n_list) {
  std::vector<int> missing;
  {
    std::lock_guard lock(mu_);
    for (int n : n_list)
      if (!cache_.count(n) && std::find(missing.begin(), missing.end(), n) == missing.end()) missing.push_back(n);
  }
  if (missing.size() < 2 || std::thread::hardware_concurrency() < 2) {
    for (int n : missing) at(n);
    return;
  }
  std::vector<std::future<std::unique_ptr<SizePipeline>>> jobs;
  for (int n : missing)
    jobs.push_back(std::async(std::launch::async, [this, n] { return build_pipeline(v_, n, opt_); }));
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto p = jobs[i].get();
    std::lock_guard lock(mu_);
    cache_.emplace(missing[i], std::move(p));
  }
}

bool decreasing_sequence(const std::vector<double>& values, double floor) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] < values[i - 1]) && !(values[i] <= floor && values[i - 1] <= floor)) return false;
  return true;
}

ConvergenceTable unitary_bulk_convergence(Laboratory& lab, const ScalingWindow& w) {
  ConvergenceTable out;
  out.lambda0 = w.lambda0;
  lab.prepare(w.n_list);
  const double rho = density(lab.equilibrium(), w.lambda0);
  std::vector<double> errors;
  for (int n : w.n_list) {
    const auto& basis = lab.at(n).basis;
    const auto x = scaled_abscissae(w, n, rho);
    std::vector<Eigen::VectorXd> psi;
    psi.reserve(x.size());
    for (double xi : x) psi.push_back(basis.evaluate(xi, n));
    ConvergenceRow row;
    row.n = n;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double k2 = psi[i].dot(psi[j]) / (n * rho);
        const double e = std::abs(k2 - sine_kernel(w.s_grid[i] - w.s_grid[j]));
        row.error = std::max(row.error, e);
        if (i == j) row.diag_error = std::max(row.diag_error, e);
      }
    }
    errors.push_back(row.error);
    out.rows.push_back(row);
  }
  out.decreasing = decreasing_sequence(errors);
  return out;
}

KernelBlock scaled_block(const TracyWidomKernel& k, const TracyWidomKernel::Point& a,
                         const TracyWidomKernel::Point& b, double rho) {
  const double n = k.basis().n();
  KernelBlock out;
  out.a11 = k.S(a, b) / (n * rho);
  out.a12 = k.Sd(a, b) / (n * rho * rho);
  out.a21 = k.IS(a, b) / n - epsilon_sign(a.x - b.x);
  out.a22 = k.S(b, a) / (n * rho);
  return out;
}

KernelBlock limit_block(double s) {
  KernelBlock out;
  out.a11 = sine_kernel(s);
  out.a12 = sine_kernel_derivative(s);
  out.a21 = sine_kernel_integral(s) - epsilon_sign(s);
  out.a22 = sine_kernel(s);
  return out;
}

OrthogonalTable orthogonal_bulk_convergence(Laboratory& lab, const ScalingWindow& w) {
  OrthogonalTable out;
  out.lambda0 = w.lambda0;
  lab.prepare(w.n_list);
  const double rho = density(lab.equilibrium(), w.lambda0);
  const std::size_t g = w.s_grid.size();
  std::vector<KernelBlock> limits(g * g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) limits[i * g + j] = limit_block(w.s_grid[i] - w.s_grid[j]);

  std::vector<double> series[4];
  for (int n : w.n_list) {
    const auto& pipe = lab.at(n);
    OrthogonalRow row;
    row.n = n;
    row.smin = pipe.moments.smin();
    if (!pipe.kernel) {
      // Aborted size: infinite error breaks the ordering.
      for (int b = 0; b < 4; ++b) row.errors[b] = std::numeric_limits<double>::infinity();
    } else {
      std::vector<ScaledPoint> pts;
      for (double x : scaled_abscissae(w, n, rho)) pts.push_back(scaled_point(*pipe.kernel, x));
      double plus = 0.0, minus = 0.0;
      for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = 0; j < g; ++j) {
          const auto blk = pair_block(pts[i], pts[j], n, rho);
          const auto& lim = limits[i * g + j];
          for (int b = 0; b < 4; ++b) row.errors[b] = std::max(row.errors[b], block_error(blk, lim, b));
          plus = std::max(plus, std::abs(blk.a12 - lim.a12));
          minus = std::max(minus, std::abs(blk.a12 + lim.a12));
        }
      }
      out.sd_residual_plus = plus;
      out.sd_residual_minus = minus;
      out.sd_sign = plus <= minus ? 1 : -1;
    }
    for (int b = 0; b < 4; ++b) series[b].push_back(row.errors[b]);
    out.rows.push_back(row);
  }
  for (int b = 0; b < 4; ++b) out.decreasing[b] = decreasing_sequence(series[b]);
  return out;
}

InvertibilityTable theorem2_scan(Laboratory& lab, std::span<const int> n_list) {
  InvertibilityTable out;
  for (int n : n_list)
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("theorem2_scan: sizes must be even");
  lab.prepare(n_list);
  out.odd_singular = true;
  for (int n : n_list) {
    const auto& pipe = lab.at(n);
    InvertibilityRow row;
    row.n = n;
    row.smin = pipe.moments.smin();
    row.inverse_norm = row.smin > 0.0 ? 1.0 / row.smin : std::numeric_limits<double>::infinity();
    row.odd_smin = smallest_singular_value(pipe.moments.section(n + 1));
    out.odd_singular = out.odd_singular && row.odd_smin <= 1e-6;
    out.rows.push_back(row);
  }
  if (!out.rows.empty()) {
    double lo = out.rows.front().smin;
    for (const auto& r : out.rows) lo = std::min(lo, r.smin);
    out.no_collapse = lo >= 0.5 * out.rows.front().smin && lo > 0.0;
  }
  return out;
}

double cluster_value(const std::vector<KernelBlock>& chain) {
  Eigen::Matrix2d prod = Eigen::Matrix2d::Identity();
  for (const auto& b : chain) {
    Eigen::Matrix2d m;
    m << b.a11, b.a12, b.a21, b.a22;
    prod = prod * m;
  }
  return prod.trace();
}

ClusterTable cluster_functions(Laboratory& lab, const ScalingWindow& w, int k) {
  if (k < 1 || k > 3) throw std::invalid_argument("cluster_functions: k must be 1, 2 or 3");
  ClusterTable out;
  out.k = k;
  lab.prepare(w.n_list);
  const double rho = density(lab.equilibrium(), w.lambda0);
  // Triples over the full grid are cubic in its size; thin it for k = 3.
  std::vector<std::size_t> idx;
  const std::size_t stride = k == 3 ? std::max<std::size_t>(1, w.s_grid.size() / 10) : 1;
  for (std::size_t i = 0; i < w.s_grid.size(); i += stride) idx.push_back(i);
  const std::size_t g = idx.size();

  std::vector<double> errors;
  for (int n : w.n_list) {
    const auto& pipe = lab.at(n);
    ClusterRow row;
    row.n = n;
    if (!pipe.kernel) {
      row.error = std::numeric_limits<double>::infinity();
    } else {
      const auto x = scaled_abscissae(w, n, rho);
      std::vector<ScaledPoint> pts;
      for (std::size_t i : idx) pts.push_back(scaled_point(*pipe.kernel, x[i]));
      std::vector<KernelBlock> blk(g * g), lim(g * g);
      for (std::size_t a = 0; a < g; ++a)
        for (std::size_t b = 0; b < g; ++b) {
          blk[a * g + b] = pair_block(pts[a], pts[b], n, rho);
          lim[a * g + b] = limit_block(w.s_grid[idx[a]] - w.s_grid[idx[b]]);
        }
      auto at = [&](const std::vector<KernelBlock>& t, std::size_t a, std::size_t b) { return t[a * g + b]; };
      if (k == 1) {
        for (std::size_t a = 0; a < g; ++a)
          row.error = std::max(row.error, std::abs(cluster_value({at(blk, a, a)}) - cluster_value({at(lim, a, a)})));
      } else if (k == 2) {
        for (std::size_t a = 0; a < g; ++a)
          for (std::size_t b = 0; b < g; ++b)
            row.error = std::max(row.error, std::abs(cluster_value({at(blk, a, b), at(blk, b, a)}) -
                                                     cluster_value({at(lim, a, b), at(lim, b, a)})));
      } else {
        for (std::size_t a = 0; a < g; ++a)
          for (std::size_t b = 0; b < g; ++b)
            for (std::size_t c = 0; c < g; ++c)
              row.error = std::max(row.error,
                                   std::abs(cluster_value({at(blk, a, b), at(blk, b, c), at(blk, c, a)}) -
                                            cluster_value({at(lim, a, b), at(lim, b, c), at(lim, c, a)})));
      }
    }
    errors.push_back(row.error);
    out.rows.push_back(row);
  }
  out.decreasing = decreasing_sequence(errors);
  return out;
}

std::vector<CRow> c_trace(Laboratory& lab, std::span<const int> n_list) {
  lab.prepare(n_list);
  std::vector<CRow> out;
  for (int n : n_list) {
    const auto& m = lab.at(n).moments;
    CRow row;
    row.n = n;
    row.c = c_of_n(m, lab.r_symbol());
    row.m_anchor = m(n - 1, n);
    row.m2 = moment_constant(lab.r_symbol(), 2);
    out.push_back(row);
  }
  return out;
}

}  // namespace ulab
