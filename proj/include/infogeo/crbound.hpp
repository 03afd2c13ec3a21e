#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>

#include "infogeo/estimation.hpp"
#include "infogeo/fisher.hpp"

namespace infogeo {

/// Variance form, its lower bound J pinv J^T, their difference and the PSD
/// certificate for the gap.
struct CRGapReport {
  Eigen::VectorXd xi;
  Eigen::MatrixXd V;
  Eigen::MatrixXd bound;
  Eigen::MatrixXd gap;
  double min_gap_eig = 0.0;
  double tol = 0.0;
  bool psd_certified = false;
};

/// Default PSD certification tolerance: absolute 1e-10 on finite spaces
/// (exact enumeration), 1e-6 (1 + tr V) on quadrature grids.
double default_psd_tol(const ParamModel& model, const Eigen::MatrixXd& V);

/// The quadratic form (ghat^phi_sigma)^{-1}(xi) = J pinv J^T with
/// J = d_phi_hat and pinv the reduced-metric pseudoinverse.
Eigen::MatrixXd cr_bound(const ParamModel& model, const Estimator& sigma, const FeatureMap& phi,
                         const Eigen::VectorXd& xi,
                         double rel_threshold = defaults::kRankRelThreshold);

CRGapReport cr_gap(const ParamModel& model, const Estimator& sigma, const FeatureMap& phi,
                   const Eigen::VectorXd& xi, std::optional<double> tol = std::nullopt,
                   double rel_threshold = defaults::kRankRelThreshold);

/// Classical biased bound (E + D) pinv (E + D)^T with D the bias Jacobian by
/// finite differences; requires the coordinate feature.  On full-rank models
/// pinv is the plain inverse metric and the classical inequality is
/// recovered literally; at singular points this extends it with the reduced
/// metric.
Eigen::MatrixXd borovkov_bound(const ParamModel& model, const Estimator& sigma,
                               const Eigen::VectorXd& xi,
                               double rel_threshold = defaults::kRankRelThreshold);

struct ScalarBiasedBound {
  double mse_lhs = 0.0;
  double rhs = 0.0;  // (1 + b')^2 / g + b^2
  bool holds = false;
};

/// Scalar coordinate-feature bound with bias term; refuses singular points
/// (the formula divides by the Fisher information).
ScalarBiasedBound scalar_biased_bound(const ParamModel& model, const Estimator& sigma,
                                      const Eigen::VectorXd& xi);

/// Monte Carlo variance estimate: S draws of omega ~ p(xi) with a seeded
/// generator, and the entrywise standard errors of the covariance estimate.
struct McVariance {
  Eigen::MatrixXd V;
  Eigen::MatrixXd stderr_V;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
};

McVariance mc_variance(const ParamModel& model, const Estimator& sigma, const FeatureMap& phi,
                       const Eigen::VectorXd& xi, std::size_t samples, std::uint64_t seed);

/// cr_gap with the variance side replaced by its Monte Carlo estimate; the
/// certification tolerance widens to 5x the aggregated (Frobenius) standard
/// error of the estimated covariance.
CRGapReport cr_gap_mc(const ParamModel& model, const Estimator& sigma, const FeatureMap& phi,
                      const Eigen::VectorXd& xi, std::size_t samples, std::uint64_t seed,
                      double rel_threshold = defaults::kRankRelThreshold);

}  // namespace infogeo
