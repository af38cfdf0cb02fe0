#include "ulab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ulab {

namespace {

// P_0..P_{count-1} at t.
std::vector<double> legendre_values(int count, double t) {
  std::vector<double> p(static_cast<std::size_t>(std::max(count, 2)));
  p[0] = 1.0;
  p[1] = t;
  for (int k = 1; k + 1 < count; ++k) p[k + 1] = ((2.0 * k + 1.0) * t * p[k] - k * p[k - 1]) / (k + 1.0);
  return p;
}

// Integral over [-1, t] of the Lagrange basis polynomial through node j:
// w_j [ (t+1)/2 + sum_{m=1}^{q-1} P_m(t_j) (P_{m+1}(t) - P_{m-1}(t)) / 2 ].
Eigen::VectorXd reference_partial(const GaussRule& rule, double t) {
  const int q = static_cast<int>(rule.nodes.size());
  auto pt = legendre_values(q + 1, t);
  Eigen::VectorXd s(q);
  for (int j = 0; j < q; ++j) {
    auto pj = legendre_values(q, rule.nodes[j]);
    double acc = 0.5 * (t + 1.0);
    for (int m = 1; m < q; ++m) acc += pj[m] * 0.5 * (pt[m + 1] - pt[m - 1]);
    s[j] = rule.weights[j] * acc;
  }
  return s;
}

}  // namespace

GaussRule gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
  GaussRule r;
  r.nodes.resize(order);
  r.weights.resize(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 1; k < order; ++k) {
        double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 1; k < order; ++k) {
        double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[order - 1 - i] = x;
    r.weights[order - 1 - i] = w;
    r.nodes[i] = -x;
    r.weights[i] = w;
  }
  if (order % 2) r.nodes[order / 2] = 0.0;
  return r;
}

QuadGrid::QuadGrid(double L, int panels, int order)
    : L_(L), panels_(panels), order_(order), rule_(gauss_legendre(order)) {
  if (!(L > 0.0)) throw std::invalid_argument("QuadGrid: L must be positive");
  if (panels < 1 || order < 2) throw std::invalid_argument("QuadGrid: need panels >= 1 and order >= 2");
  const double h = 2.0 * L / panels;
  nodes_.resize(static_cast<Eigen::Index>(panels) * order);
  weights_.resize(nodes_.size());
  for (int p = 0; p < panels; ++p) {
    // Mirror panel p onto panels-1-p so the node set is exactly symmetric.
    for (int j = 0; j < order; ++j) {
      const Eigen::Index idx = static_cast<Eigen::Index>(p) * order + j;
      const Eigen::Index mirror = static_cast<Eigen::Index>(panels - 1 - p) * order + (order - 1 - j);
      if (mirror < idx) {
        nodes_[idx] = -nodes_[mirror];
        weights_[idx] = weights_[mirror];
        continue;
      }
      const double mid = -L + (p + 0.5) * h;
      nodes_[idx] = mid + 0.5 * h * rule_.nodes[j];
      weights_[idx] = 0.5 * h * rule_.weights[j];
      if (idx == mirror) nodes_[idx] = 0.0;
    }
  }
  in_panel_.resize(order, order);
  for (int i = 0; i < order; ++i) in_panel_.row(i) = reference_partial(rule_, rule_.nodes[i]).transpose();
}

Eigen::MatrixXd QuadGrid::panel_prefix(const Eigen::MatrixXd& values) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(panels_ + 1, values.cols());
  for (int p = 0; p < panels_; ++p) {
    out.row(p + 1) = out.row(p) + weights_.segment(static_cast<Eigen::Index>(p) * order_, order_).transpose() *
                                      values.middleRows(static_cast<Eigen::Index>(p) * order_, order_);
  }
  return out;
}

Eigen::MatrixXd QuadGrid::cumulative(const Eigen::MatrixXd& values) const {
  Eigen::MatrixXd prefix = panel_prefix(values);
  Eigen::MatrixXd out(values.rows(), values.cols());
  const double half = 0.5 * panel_width();
  for (int p = 0; p < panels_; ++p) {
    const Eigen::Index off = static_cast<Eigen::Index>(p) * order_;
    out.middleRows(off, order_) = (half * in_panel_) * values.middleRows(off, order_);
    out.middleRows(off, order_).rowwise() += prefix.row(p);
  }
  return out;
}

int QuadGrid::panel_of(double x) const {
  const int p = static_cast<int>(std::floor((x + L_) / panel_width()));
  return std::clamp(p, 0, panels_ - 1);
}

Eigen::VectorXd QuadGrid::partial_weights(int panel, double x) const {
  const double h = panel_width();
  const double left = -L_ + panel * h;
  double t = 2.0 * (x - left) / h - 1.0;
  t = std::clamp(t, -1.0, 1.0);
  return 0.5 * h * reference_partial(rule_, t);
}

QuadGrid build_grid(double L, int panels, int order) { return QuadGrid(L, panels, order); }

}  // namespace ulab
