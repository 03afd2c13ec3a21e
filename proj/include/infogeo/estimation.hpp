#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "infogeo/param_model.hpp"

namespace infogeo {

/// Feature phi: parameter domain -> R^m with optional analytic Jacobian
/// (finite differences otherwise).
struct FeatureMap {
  std::string name = "feature";
  int m = 1;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> phi;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;  // optional, m x d

  static FeatureMap identity(int d);
  static FeatureMap affine(Eigen::MatrixXd A, Eigen::VectorXd offset);
};

/// Tabulated estimator: one parameter value per sample-space point.  Values
/// must be finite; whether they fall inside the model domain is reported by
/// in_domain, not enforced (estimators only ever enter through phi
/// compositions).
struct Estimator {
  std::string name = "estimator";
  Eigen::MatrixXd values;  // points x dim

  Estimator() = default;
  Estimator(std::string name_, Eigen::MatrixXd values_);

  bool in_domain(const Domain& domain) const;
};

/// Expectation, bias, variance and mean-square error of a feature-mapped
/// estimator at a parameter, together with the derivative matrix obtained by
/// differentiation under the integral.
struct EstimatorStats {
  Eigen::VectorXd xi;
  Eigen::VectorXd phi_hat;    // E(phi o sigma)
  Eigen::VectorXd bias;       // phi_hat - phi(xi)
  Eigen::MatrixXd V;          // covariance of phi o sigma
  Eigen::MatrixXd MSE;        // second moment about phi(xi)
  Eigen::MatrixXd d_phi_hat;  // m x d, entry (l, i) = E((phi^l o sigma) d_i log p)
  double msevb_residual = 0.0;  // max |MSE - V - bias bias^T|
};

/// E(phi o sigma) componentwise.
Eigen::VectorXd phi_hat(const ParamModel& model, const Estimator& sigma, const FeatureMap& phi,
                        const Eigen::VectorXd& xi);

/// Derivative of phi_hat by integrating feature values against scores.
Eigen::MatrixXd d_phi_hat(const ParamModel& model, const Estimator& sigma, const FeatureMap& phi,
                          const Eigen::VectorXd& xi);

EstimatorStats estimator_stats(const ParamModel& model, const Estimator& sigma,
                               const FeatureMap& phi, const Eigen::VectorXd& xi);

struct PreGradientEntry {
  Eigen::VectorXd direction;
  double lhs = 0.0;  // finite-difference derivative of E_{p(xi)}(f)
  double rhs = 0.0;  // E((f - E f) d_X log p)
  double residual = 0.0;
};

/// Checks that the centered function is a pre-gradient of xi -> E_{p(xi)}(f):
/// the finite-difference derivative along each direction against the score
/// pairing with f - E(f).
std::vector<PreGradientEntry> pre_gradient_check(const ParamModel& model,
                                                 const Eigen::VectorXd& f,
                                                 const Eigen::VectorXd& xi,
                                                 const std::vector<Eigen::VectorXd>& directions);

}  // namespace infogeo
