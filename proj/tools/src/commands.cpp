#include "commands.hpp"

#include "ulab/equilibrium.hpp"
#include "ulab/errors.hpp"
#include "ulab/experiments.hpp"
#include "ulab/kernels.hpp"
#include "ulab/orthopoly.hpp"
#include "ulab/sampler.hpp"
#include "ulab/toeplitz.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <functional>
#include <map>

namespace ulab::cli {

using nlohmann::json;

namespace {

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      if (!first) text_ += ',';
      text_ += h;
      first = false;
    }
    text_ += '\n';
  }
  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) text_ += ',';
      text_ += format_double(v);
      first = false;
    }
    text_ += '\n';
  }
  std::string str() const { return text_; }

 private:
  std::string text_;
};

struct Context {
  const RunConfig& cfg;
  CommandResult& out;

  void fail(std::string check, std::string detail) {
    spdlog::warn("{}: {}", check, detail);
    out.failures.push_back({std::move(check), std::move(detail)});
  }
  void require(bool ok, const std::string& check, const std::string& detail) {
    if (!ok) fail(check, detail);
  }
};

Potential make_potential(const RunConfig& c) { return Potential(c.potential, Domain{c.d1, c.d2}); }

BasisOptions make_options(const RunConfig& c) {
  BasisOptions o;
  o.panels = c.panels;
  o.order = c.order;
  o.tail_tolerance = c.tolerances.tail;
  return o;
}

json conditions_json(const ConditionReport& r) {
  return {{"c2", r.c2},
          {"c3", r.c3},
          {"c4", r.c4},
          {"normalization", r.normalization},
          {"p_min", r.p_min},
          {"u_interior_spread", r.u_interior_spread},
          {"u_outside_gap", r.u_outside_gap},
          {"failures", r.failures}};
}

// Records C2/C3/C4 failures; returns true when all hold.
bool check_one_cut(Context& ctx, const Potential& v, json& report) {
  const auto cond = check_conditions(v);
  report["conditions"] = conditions_json(cond);
  if (!cond.c2) ctx.fail("C2", fmt::format("normalization {} != 1", cond.normalization));
  if (!cond.c3) ctx.fail("C3", fmt::format("min P = {}", cond.p_min));
  if (!cond.c4) ctx.fail("C4", fmt::format("u spread {}, outside gap {}", cond.u_interior_spread, cond.u_outside_gap));
  if (!cond.passed()) {
    try {
      const auto rs = rescale_to_standard_support(v);
      report["suggested_rescale"] = {{"scale", rs.scale},
                                     {"coefficients", std::vector<double>(rs.potential.even_coeffs().begin(),
                                                                          rs.potential.even_coeffs().end())}};
    } catch (const std::exception& e) {
      report["suggested_rescale"] = {{"error", e.what()}};
    }
  }
  return cond.passed();
}

json equilibrium_json(const EquilibriumData& eq) {
  return {{"p_coeffs", eq.p_coeffs}, {"delta1", eq.delta1}, {"delta2", eq.delta2}};
}

std::vector<double> s_grid(const RunConfig& c) { return uniform_grid(c.s_lo, c.s_hi, c.s_points); }

// ---------------------------------------------------------------- density

void density_cmd(Context& ctx, json& r) {
  const auto v = make_potential(ctx.cfg);
  check_one_cut(ctx, v, r);
  EquilibriumData eq;
  try {
    eq = compute_P(v);
  } catch (const EquilibriumError& e) {
    ctx.fail("equilibrium", e.what());
    return;
  }
  r["equilibrium"] = equilibrium_json(eq);
  Csv csv({"lambda", "rho", "cumulative"});
  for (double x : uniform_grid(-2.0, 2.0, 401)) csv.row({x, density(eq, x), cumulative_density(eq, x)});
  ctx.out.files.add("density.csv", csv.str());
}

// ---------------------------------------------------------------- jacobi

void jacobi_cmd(Context& ctx, json& r) {
  const auto v = make_potential(ctx.cfg);
  if (!check_one_cut(ctx, v, r)) return;
  auto eq = compute_P(v);
  json sizes = json::array();
  for (int n : ctx.cfg.n_list) {
    const auto basis = build_basis(v, n, make_options(ctx.cfg));
    const auto fit = estimate_gamma(eq, basis);
    Csv csv({"k", "J", "q"});
    for (int k = 0; k <= basis.kmax(); ++k)
      csv.row({double(k), k < basis.kmax() ? basis.jacobi_J()[k] : std::nan(""), basis.jacobi_q()[k]});
    ctx.out.files.add(fmt::format("jacobi_n{}.csv", n), csv.str());
    sizes.push_back({{"n", n},
                     {"kmax", basis.kmax()},
                     {"orthonormality_defect", basis.orthonormality_defect()},
                     {"recurrence_residual", basis.recurrence_residual()},
                     {"tail_max", basis.tail_max()},
                     {"extended_precision", basis.extended_precision()},
                     {"gamma", fit.gamma},
                     {"gamma_residual", fit.residual}});
    ctx.require(basis.orthonormality_defect() <= ctx.cfg.tolerances.orthonormality, "orthonormality",
                fmt::format("n = {}: defect {}", n, basis.orthonormality_defect()));
  }
  r["sizes"] = sizes;
}

// ---------------------------------------------------------------- kernels

void kernels_cmd(Context& ctx, json& r) {
  const auto v = make_potential(ctx.cfg);
  if (!check_one_cut(ctx, v, r)) return;
  Laboratory lab(v, make_options(ctx.cfg));
  lab.prepare(ctx.cfg.n_list);
  const auto grid = s_grid(ctx.cfg);
  json windows = json::array();
  for (std::size_t li = 0; li < ctx.cfg.lambda0_list.size(); ++li) {
    const double l0 = ctx.cfg.lambda0_list[li];
    const double rho = density(lab.equilibrium(), l0);
    json sizes = json::array();
    for (int n : ctx.cfg.n_list) {
      const auto& pipe = lab.at(n);
      json row = {{"n", n}, {"smin", pipe.moments.smin()}};
      if (!pipe.kernel) {
        ctx.fail("singular_moment_matrix", fmt::format("n = {}: smin {}", n, pipe.moments.smin()));
        sizes.push_back(row);
        continue;
      }
      const auto& k = *pipe.kernel;
      std::vector<TracyWidomKernel::Point> pts;
      for (double s : grid) pts.push_back(k.point(l0 + s / (n * rho)));
      Csv csv({"s1", "s2", "k2", "sine", "b11", "b12", "b21", "b22", "l11", "l12", "l21", "l22"});
      double e2 = 0.0, e1[4] = {0, 0, 0, 0};
      for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = 0; j < grid.size(); ++j) {
          const double k2 = pts[i].psi.dot(pts[j].psi) / (n * rho);
          const double sk = sine_kernel(grid[i] - grid[j]);
          const auto b = scaled_block(k, pts[i], pts[j], rho);
          const auto l = limit_block(grid[i] - grid[j]);
          e2 = std::max(e2, std::abs(k2 - sk));
          e1[0] = std::max(e1[0], std::abs(b.a11 - l.a11));
          e1[1] = std::max(e1[1], std::abs(b.a12 - l.a12));
          e1[2] = std::max(e1[2], std::abs(b.a21 - l.a21));
          e1[3] = std::max(e1[3], std::abs(b.a22 - l.a22));
          csv.row({grid[i], grid[j], k2, sk, b.a11, b.a12, b.a21, b.a22, l.a11, l.a12, l.a21, l.a22});
        }
      ctx.out.files.add(fmt::format("kernels_n{}_l{}.csv", n, li), csv.str());
      row["unitary_error"] = e2;
      row["block_errors"] = {e1[0], e1[1], e1[2], e1[3]};
      sizes.push_back(row);
    }
    windows.push_back({{"lambda0", l0}, {"rho", rho}, {"sizes", sizes}});
  }
  r["windows"] = windows;
}

// ---------------------------------------------------------------- verify

json invertibility_json(const InvertibilityTable& t) {
  json rows = json::array();
  for (const auto& row : t.rows)
    rows.push_back({{"n", row.n}, {"smin", row.smin}, {"inverse_norm", row.inverse_norm}, {"odd_smin", row.odd_smin}});
  return {{"rows", rows}, {"no_collapse", t.no_collapse}, {"odd_singular", t.odd_singular}};
}

void verify_suite(Context& ctx, Laboratory& lab, json& r) {
  const auto& cfg = ctx.cfg;
  const auto& v = lab.potential();
  const auto& eq = lab.equilibrium();
  const auto& tol = cfg.tolerances;
  lab.prepare(cfg.n_list);
  r["equilibrium"] = equilibrium_json(eq);

  // Orthonormality and basis health.
  json bases = json::array();
  for (int n : cfg.n_list) {
    const auto& b = lab.at(n).basis;
    bases.push_back({{"n", n},
                     {"orthonormality_defect", b.orthonormality_defect()},
                     {"recurrence_residual", b.recurrence_residual()},
                     {"tail_max", b.tail_max()}});
    ctx.require(b.orthonormality_defect() <= tol.orthonormality, "orthonormality",
                fmt::format("n = {}: defect {}", n, b.orthonormality_defect()));
  }
  r["bases"] = bases;

  // Uniform invertibility.
  const auto t2 = theorem2_scan(lab, cfg.n_list);
  r["invertibility"] = invertibility_json(t2);
  ctx.require(t2.no_collapse, "invertibility_no_collapse", "smallest singular value collapsed along n_list");
  ctx.require(t2.odd_singular, "invertibility_odd_control", "odd-size section not singular");

  // Toeplitz identities.
  const auto fact = factorization_check(v, eq, 0, 60);
  const double sym = symbol_identity_error(v, eq);
  r["factorization"] = {{"vstar_minus_pd", fact.vstar_minus_pd}, {"pd_minus_dp", fact.pd_minus_dp},
                        {"symbol_identity", sym}};
  ctx.require(fact.vstar_minus_pd <= tol.factorization, "factorization",
              fmt::format("V* - PD = {}", fact.vstar_minus_pd));
  ctx.require(sym <= tol.factorization, "symbol_identity", fmt::format("error {}", sym));

  const auto l3 = resolvent_identity_check(eq, 100);
  r["resolvent_identity"] = {{"lhs", l3.lhs}, {"rhs", l3.rhs}, {"root_construction", l3.root_construction},
                 {"identity_error", l3.identity_error}, {"construction_error", l3.construction_error},
                 {"row_error", l3.row_error}};
  ctx.require(l3.identity_error <= tol.resolvent_identity && l3.construction_error <= tol.resolvent_identity, "resolvent_identity",
              fmt::format("identity {}, construction {}", l3.identity_error, l3.construction_error));

  const auto comm = semi_infinite_commutator_check(eq, 100);
  r["commutator"] = {{"error_plus", comm.error_plus}, {"error_minus", comm.error_minus}, {"sign", comm.sign}};
  ctx.require(std::min(comm.error_plus, comm.error_minus) <= 1e-10, "commutator",
              fmt::format("neither sign holds: {} / {}", comm.error_plus, comm.error_minus));

  // Decay of functions of the constant Jacobi matrix.
  const auto J = constant_jacobi(0, 101);
  const auto dfit = resolvent_decay_check(J, std::function<double(double)>([&](double x) { return 1.0 / eq.P(x); }));
  const double rate = dfit.band_limited ? 1.0 : dfit.rate;
  const auto bfit = section_boundary_fit(eq, 64, rate);
  r["decay"] = {{"rate", dfit.band_limited ? json(nullptr) : json(dfit.rate)},
                {"band_limited", dfit.band_limited},
                {"prefactor", dfit.prefactor},
                {"boundary_constant", bfit.constant},
                {"boundary_interior", bfit.interior_deviation},
                {"boundary_rows", bfit.confined_rows}};
  ctx.require(dfit.passed, "decay_rate", "no exponential decay of 1/P(J*) entries");
  ctx.require(bfit.passed, "boundary_fit", fmt::format("constant {}, interior {}", bfit.constant, bfit.interior_deviation));

  // Moment matrix relations per size.
  json moments = json::array();
  std::vector<double> dm, cabs;
  std::map<int, double> dmax;
  for (int n : cfg.n_list) {
    const auto& pipe = lab.at(n);
    const int width = static_cast<int>(std::ceil(std::pow(n, 0.25)));
    const auto cf = moment_closed_form(pipe.moments, eq, lab.r_symbol(), width);
    const auto mv = mv_identity_check(pipe.basis, pipe.moments);
    json row = {{"n", n},
                {"skew_defect", pipe.moments.raw_skew_defect()},
                {"parity_defect", pipe.moments.parity_defect()},
                {"dm_residual", cf.dm_residual},
                {"width", width},
                {"c", cf.c},
                {"closed_form_error_a", cf.error_a},
                {"closed_form_error_b", cf.error_b},
                {"closed_form_reading", std::string(1, cf.chosen)},
                {"mv_leading_defect", mv.leading_defect},
                {"mv_defect_columns", mv.defect_columns},
                {"mv_confined", mv.confined}};
    try {
      const auto corr = correction_matrices(pipe.basis, eq);
      row["d_max"] = corr.d_max;
      row["ptilde_max"] = corr.ptilde_max;
      row["telescoping_residual"] = corr.telescoping_residual;
      dmax[n] = corr.d_max;
    } catch (const std::exception& e) {
      row["correction_matrices"] = e.what();
    }
    ctx.require(mv.confined, "mv_identity", fmt::format("n = {}: defect outside the last columns", n));
    dm.push_back(cf.dm_residual);
    cabs.push_back(std::abs(cf.c));
    moments.push_back(row);
  }
  r["moments"] = moments;
  ctx.require(decreasing_sequence(dm), "dM_relation", "window residual not decreasing along n_list");
  ctx.require(decreasing_sequence(cabs, 1e-12), "C_to_zero", "|C(n)| not decreasing along n_list");
  for (const auto& [n, d] : dmax) {
    auto it = dmax.find(2 * n);
    if (it == dmax.end() || n < 64) continue;
    const double ratio = it->second / d;
    ctx.require(ratio >= 0.25 && ratio <= 0.75, "correction_decay",
                fmt::format("d_max({}) / d_max({}) = {}", 2 * n, n, ratio));
  }
}

void verify_cmd(Context& ctx, json& r) {
  const auto v = make_potential(ctx.cfg);
  if (!check_one_cut(ctx, v, r)) return;
  Laboratory lab(v, make_options(ctx.cfg));
  verify_suite(ctx, lab, r);
}

// ---------------------------------------------------------------- sample

json sample_beta(Context& ctx, const Potential& v, const EquilibriumData& eq, const SamplerConfig& sc, int beta) {
  SamplerOptions opt;
  opt.burn_in = sc.burn_in;
  opt.thin = sc.thin;
  const long thin = sc.thin > 0 ? sc.thin : 2L * sc.n;
  const long per_chain = (sc.samples + sc.chains - 1) / sc.chains;
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < sc.chains; ++i) seeds.push_back(ctx.cfg.seed + static_cast<std::uint64_t>(i));
  const auto set = metropolis_chains(v, sc.n, beta, sc.burn_in + per_chain * thin, seeds, opt);
  SpacingOptions so;
  so.lambda0 = sc.lambda0;
  so.half_window = sc.half_window;
  const auto h = spacing_statistics(set, eq, so);
  const double ks = ncm_kolmogorov(set, eq);

  Csv hist({"s", "empirical", "reference"});
  for (std::size_t i = 0; i < h.centers.size(); ++i) hist.row({h.centers[i], h.empirical[i], h.reference[i]});
  ctx.out.files.add(fmt::format("spacing_beta{}.csv", beta), hist.str());
  Csv pair({"s", "empirical", "one_minus_sinc2"});
  for (std::size_t i = 0; i < h.pair_centers.size(); ++i)
    pair.row({h.pair_centers[i], h.pair_correlation[i], h.pair_reference[i]});
  ctx.out.files.add(fmt::format("pair_beta{}.csv", beta), pair.str());

  ctx.require(h.total_variation <= ctx.cfg.tolerances.spacing_tv, "spacing_tv",
              fmt::format("beta = {}: TV {}", beta, h.total_variation));
  ctx.require(std::abs(h.mean_spacing - 1.0) <= 0.03, "mean_spacing",
              fmt::format("beta = {}: mean {}", beta, h.mean_spacing));
  ctx.require(ks <= 0.05, "ncm_kolmogorov", fmt::format("beta = {}: distance {}", beta, ks));
  if (beta == 2) {
    ctx.require(h.small_fraction < 0.01, "level_repulsion", fmt::format("P(s < 0.05) = {}", h.small_fraction));
    ctx.require(h.pair_suppression < 0.2, "pair_suppression", fmt::format("max {}", h.pair_suppression));
  }
  return {{"beta", beta},
          {"samples", set.count()},
          {"acceptance", set.acceptance},
          {"step_width", set.step_width},
          {"resync_drift", set.max_resync_drift},
          {"spacings", h.spacings},
          {"mean_spacing", h.mean_spacing},
          {"total_variation", h.total_variation},
          {"small_fraction", h.small_fraction},
          {"pair_suppression", h.pair_suppression},
          {"ncm_kolmogorov", ks}};
}

void sample_cmd(Context& ctx, json& r) {
  const auto v = make_potential(ctx.cfg);
  if (!check_one_cut(ctx, v, r)) return;
  const auto eq = compute_P(v);
  const SamplerConfig sc = ctx.cfg.sampler.value_or(SamplerConfig{});
  json runs = json::array();
  for (int beta : sc.betas) runs.push_back(sample_beta(ctx, v, eq, sc, beta));
  r["chains"] = runs;
}

// ---------------------------------------------------------------- report

void report_cmd(Context& ctx, json& r) {
  const auto v = make_potential(ctx.cfg);
  if (!check_one_cut(ctx, v, r)) return;
  Laboratory lab(v, make_options(ctx.cfg));
  json verify;
  verify_suite(ctx, lab, verify);
  r["verify"] = verify;

  auto eq = lab.equilibrium();
  const int nmax = ctx.cfg.n_list.back();
  const auto fit = estimate_gamma(eq, lab.at(nmax).basis);
  r["gamma"] = {{"n", nmax}, {"estimate", fit.gamma}, {"residual", fit.residual}};

  json windows = json::array();
  int sd_sign = 0;
  for (double l0 : ctx.cfg.lambda0_list) {
    ScalingWindow w;
    try {
      w = make_window(lab.equilibrium(), l0, s_grid(ctx.cfg), ctx.cfg.n_list);
    } catch (const std::invalid_argument& e) {
      ctx.fail("scaling_window", fmt::format("lambda0 = {}: {}", l0, e.what()));
      continue;
    }
    const auto u = unitary_bulk_convergence(lab, w);
    const auto o = orthogonal_bulk_convergence(lab, w);
    json urows = json::array(), orows = json::array(), clusters = json::array();
    for (const auto& row : u.rows) urows.push_back({{"n", row.n}, {"error", row.error}, {"diag_error", row.diag_error}});
    for (const auto& row : o.rows)
      orows.push_back({{"n", row.n}, {"smin", row.smin},
                       {"errors", {row.errors[0], row.errors[1], row.errors[2], row.errors[3]}}});
    ctx.require(u.decreasing, "unitary_convergence", fmt::format("lambda0 = {}", l0));
    ctx.require(o.passed(), "orthogonal_convergence", fmt::format("lambda0 = {}", l0));
    for (int k = 1; k <= 3; ++k) {
      const auto c = cluster_functions(lab, w, k);
      json crows = json::array();
      for (const auto& row : c.rows) crows.push_back({{"n", row.n}, {"error", row.error}});
      clusters.push_back({{"k", k}, {"rows", crows}, {"decreasing", c.decreasing}});
      ctx.require(c.decreasing, "cluster_convergence", fmt::format("lambda0 = {}, k = {}", l0, k));
    }
    sd_sign = o.sd_sign;
    windows.push_back({{"lambda0", l0},
                       {"unitary", urows},
                       {"orthogonal", orows},
                       {"sd_residual_plus", o.sd_residual_plus},
                       {"sd_residual_minus", o.sd_residual_minus},
                       {"clusters", clusters}});
  }
  r["windows"] = windows;
  json ctrace = json::array();
  for (const auto& row : c_trace(lab, ctx.cfg.n_list))
    ctrace.push_back({{"n", row.n}, {"c", row.c}, {"m_anchor", row.m_anchor}, {"m2", row.m2}});
  r["c_trace"] = ctrace;
  r["resolved_conventions"] = {{"commutator_sign", verify["commutator"]["sign"]},
                               {"closed_form_reading", verify["moments"].back()["closed_form_reading"]},
                               {"sd_limit_sign", sd_sign}};

  if (ctx.cfg.sampler) {
    json runs = json::array();
    for (int beta : ctx.cfg.sampler->betas) runs.push_back(sample_beta(ctx, v, eq, *ctx.cfg.sampler, beta));
    r["chains"] = runs;
  }
}

using Handler = std::function<void(Context&, json&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {{"density", density_cmd}, {"jacobi", jacobi_cmd},
                                                   {"kernels", kernels_cmd}, {"verify", verify_cmd},
                                                   {"sample", sample_cmd},   {"report", report_cmd}};
  return h;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"density", "jacobi", "kernels", "verify", "sample", "report"};
  return names;
}

json conventions() {
  return {{"epsilon", "eps f(x) = (1/2) Int sign(x - y) f(y) dy, sign(0) = 0"},
          {"jacobi", "lambda psi_k = J_k psi_{k+1} + q_k psi_k + J_{k-1} psi_{k-1}, J_k = <lambda psi_k, psi_{k+1}>"},
          {"moment_matrix", "M_{j,l} = n <psi_j, eps psi_l>, antisymmetrized"},
          {"sd", "Sd = psi(l)^T M^{-1} psi(m); scaled limit +d/ds sinc(s1 - s2)"},
          {"is_block", "IS/n - eps(s1 - s2) -> Int_0^s sinc - eps(s)"},
          {"commutator", "[J*, P] section identity holds with the minus sign"},
          {"closed_form", "M* = M_{k-j+1} - (1/2)(1+(-1)^j) M_{-inf} - (-1)^j C"}};
}

CommandResult run(const RunConfig& config) {
  const auto& h = handlers();
  const auto it = h.find(config.command);
  if (it == h.end()) throw ConfigError("unknown command '" + config.command + "'");
  CommandResult out;
  Context ctx{config, out};
  json body;
  body["command"] = config.command;
  body["config_hash"] = config_hash(config);
  body["config"] = hashed_json(config);
  body["conventions"] = conventions();
  spdlog::info("running {} (config {})", config.command, body["config_hash"].get<std::string>());
  it->second(ctx, body);
  json fails = json::array();
  for (const auto& f : out.failures) fails.push_back({{"check", f.check}, {"detail", f.detail}});
  body["failures"] = fails;
  body["passed"] = out.failures.empty();
  out.report = body;
  out.files.add(config.command + ".json", body.dump(2) + "\n");
  return out;
}

}  // namespace ulab::cli
