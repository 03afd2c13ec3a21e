#pragma once

#include <Eigen/Core>

namespace infogeo {

/// Point of the cone of strictly positive measures on n outcomes, in the
/// natural coordinates mu_i = mu({omega_i}); with `constrained` set it is a
/// point of the open probability simplex (sum mu_i = 1).
struct SimplexPoint {
  Eigen::VectorXd mu;
  bool constrained = false;

  SimplexPoint(Eigen::VectorXd mu_, bool constrained_ = false);

  int n() const { return static_cast<int>(mu.size()); }
};

/// Fisher metric of the full measure cone: diag(1/mu_1, ..., 1/mu_n).
Eigen::MatrixXd fisher_metric_full(const SimplexPoint& p);

/// Inverse-metric pairing of the covectors dE(f), dE(g) on the full cone:
/// sum_i f_i g_i mu_i.
double inverse_pairing_full(const SimplexPoint& p, const Eigen::VectorXd& f,
                            const Eigen::VectorXd& g);

/// Same pairing restricted to the probability simplex: the covariance
/// sum_i mu_i (f_i - fbar)(g_i - gbar) with fbar = sum_i mu_i f_i.
double inverse_pairing_simplex(const SimplexPoint& p, const Eigen::VectorXd& f,
                               const Eigen::VectorXd& g);

/// Fisher gradient on the full cone: component i = mu_i * partials_i.
Eigen::VectorXd fisher_gradient_full(const SimplexPoint& p, const Eigen::VectorXd& partials);

/// Fisher gradient of the restriction to the probability simplex:
/// component i = mu_i (partials_i - lambda), lambda = sum_j mu_j partials_j.
/// The output is tangent to the simplex (components sum to zero).
Eigen::VectorXd fisher_gradient_simplex(const SimplexPoint& p, const Eigen::VectorXd& partials);

}  // namespace infogeo
