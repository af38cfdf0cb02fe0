#pragma once

#include <Eigen/Dense>

#include <vector>

namespace ulab {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], increasing
  std::vector<double> weights;
};

GaussRule gauss_legendre(int order);

// Composite Gauss-Legendre grid on [-L, L].
class QuadGrid {
 public:
  QuadGrid(double L, int panels, int order);

  double half_width() const { return L_; }
  int panels() const { return panels_; }
  int order() const { return order_; }
  Eigen::Index size() const { return nodes_.size(); }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double panel_width() const { return 2.0 * L_ / panels_; }

  // Integrals of each column over [-L, x_i] for every node x_i. Rows follow
  // the node order.
  Eigen::MatrixXd cumulative(const Eigen::MatrixXd& values) const;

  // Integrals over whole panels: row p holds the integral over [-L, left edge of panel p],
  // p = 0..panels.
  Eigen::MatrixXd panel_prefix(const Eigen::MatrixXd& values) const;

  // Panel containing x (clamped), and weights w_j such that
  // sum_j w_j f(node_{p,j}) = integral of f over [left edge of p, x].
  int panel_of(double x) const;
  Eigen::VectorXd partial_weights(int panel, double x) const;

 private:
  double L_;
  int panels_;
  int order_;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;
  GaussRule rule_;
  Eigen::MatrixXd in_panel_;  // order x order reference integration matrix on [-1, 1]
};

QuadGrid build_grid(double L, int panels, int order);

}  // namespace ulab
