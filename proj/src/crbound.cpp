#include "infogeo/crbound.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace infogeo {

double default_psd_tol(const ParamModel& model, const Eigen::MatrixXd& V) {
  if (model.space->kind() == SampleSpace::Kind::Finite) return 1e-10;
  return 1e-6 * (1.0 + V.trace());
}

Eigen::MatrixXd cr_bound(const ParamModel& model, const Estimator& sigma, const FeatureMap& phi,
                         const Eigen::VectorXd& xi, double rel_threshold) {
  const FisherMatrix F = fisher_matrix(model, xi);
  const ReducedMetric R = reduced_metric(essential_decomposition(F, rel_threshold), F);
  const Eigen::MatrixXd J = d_phi_hat(model, sigma, phi, xi);
  Eigen::MatrixXd bound = J * R.pinv * J.transpose();
  return 0.5 * (bound + bound.transpose()).eval();
}

namespace {

CRGapReport assemble_gap(const Eigen::VectorXd& xi, Eigen::MatrixXd V, Eigen::MatrixXd bound,
                         double tol) {
  CRGapReport report;
  report.xi = xi;
  report.V = std::move(V);
  report.bound = std::move(bound);
  report.gap = report.V - report.bound;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (report.gap + report.gap.transpose()));
  report.min_gap_eig = solver.eigenvalues().minCoeff();
  report.tol = tol;
  report.psd_certified = report.min_gap_eig >= -tol;
  return report;
}

}  // namespace

CRGapReport cr_gap(const ParamModel& model, const Estimator& sigma, const FeatureMap& phi,
                   const Eigen::VectorXd& xi, std::optional<double> tol, double rel_threshold) {
  const EstimatorStats st = estimator_stats(model, sigma, phi, xi);
  Eigen::MatrixXd bound = cr_bound(model, sigma, phi, xi, rel_threshold);
  const double t = tol.value_or(default_psd_tol(model, st.V));
  return assemble_gap(xi, st.V, std::move(bound), t);
}

Eigen::MatrixXd borovkov_bound(const ParamModel& model, const Estimator& sigma,
                               const Eigen::VectorXd& xi, double rel_threshold) {
  const FeatureMap coords = FeatureMap::identity(model.dim);
  const FisherMatrix F = fisher_matrix(model, xi);
  const ReducedMetric R = reduced_metric(essential_decomposition(F, rel_threshold), F);

  const auto bias_fn = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd {
    return phi_hat(model, sigma, coords, p) - p;
  };
  const Eigen::MatrixXd D = fd_jacobian(bias_fn, xi, model.domain);
  const Eigen::MatrixXd ED = Eigen::MatrixXd::Identity(model.dim, model.dim) + D;
  Eigen::MatrixXd bound = ED * R.pinv * ED.transpose();
  return 0.5 * (bound + bound.transpose()).eval();
}

ScalarBiasedBound scalar_biased_bound(const ParamModel& model, const Estimator& sigma,
                                      const Eigen::VectorXd& xi) {
  if (model.dim != 1) throw std::invalid_argument("scalar bound needs a one-parameter model");
  const FisherMatrix F = fisher_matrix(model, xi);
  const double g = F.G(0, 0);
  if (g <= defaults::kRankAbsFloor) {
    throw std::domain_error("singular point: use cr_gap with reduced metric");
  }
  const FeatureMap coords = FeatureMap::identity(1);
  const EstimatorStats st = estimator_stats(model, sigma, coords, xi);
  const double b = st.bias[0];
  const double bprime = fd_partial(
      [&](const Eigen::VectorXd& p) { return phi_hat(model, sigma, coords, p)[0] - p[0]; }, xi, 0,
      model.domain);

  ScalarBiasedBound out;
  out.mse_lhs = st.MSE(0, 0);
  out.rhs = (1.0 + bprime) * (1.0 + bprime) / g + b * b;
  out.holds = out.mse_lhs >= out.rhs - 1e-8;
  return out;
}

namespace {

// Uniform double in [0,1) from the raw engine output; avoids
// std::uniform_real_distribution so that streams are identical everywhere.
double next_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

McVariance mc_variance(const ParamModel& model, const Estimator& sigma, const FeatureMap& phi,
                       const Eigen::VectorXd& xi, std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("Monte Carlo needs at least two samples");
  if (!model.is_statistical) throw std::invalid_argument("Monte Carlo sampling needs a statistical model");
  const DensityMeasure mu = density_at(model, xi);
  const auto& w = model.space->base_weights();
  const std::size_t n = model.space->size();

  std::vector<double> cdf(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += mu.density[static_cast<Eigen::Index>(i)] * w[i];
    cdf[i] = acc;
  }
  const double total = acc;

  // Feature values per point.
  Eigen::MatrixXd table(n, phi.m);
  for (std::size_t i = 0; i < n; ++i) {
    table.row(static_cast<Eigen::Index>(i)) =
        phi.phi(sigma.values.row(static_cast<Eigen::Index>(i)).transpose()).transpose();
  }

  std::mt19937_64 gen(seed);
  std::vector<std::uint32_t> draws(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    const double u = next_uniform(gen) * total;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    draws[s] = static_cast<std::uint32_t>(std::min<std::size_t>(it - cdf.begin(), n - 1));
  }

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(phi.m);
  for (std::uint32_t idx : draws) mean += table.row(idx).transpose();
  mean /= static_cast<double>(samples);

  // Covariance and the variance of each covariance entry (for standard errors).
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(phi.m, phi.m);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(phi.m, phi.m);
  for (std::uint32_t idx : draws) {
    const Eigen::VectorXd c = table.row(idx).transpose() - mean;
    const Eigen::MatrixXd outer = c * c.transpose();
    V += outer;
    second += outer.cwiseProduct(outer);
  }
  const double S = static_cast<double>(samples);
  V /= S;
  second /= S;

  McVariance out;
  out.V = 0.5 * (V + V.transpose());
  out.stderr_V = ((second - V.cwiseProduct(V)).cwiseMax(0.0) / S).cwiseSqrt();
  out.seed = seed;
  out.samples = samples;
  return out;
}

CRGapReport cr_gap_mc(const ParamModel& model, const Estimator& sigma, const FeatureMap& phi,
                      const Eigen::VectorXd& xi, std::size_t samples, std::uint64_t seed,
                      double rel_threshold) {
  const McVariance mc = mc_variance(model, sigma, phi, xi, samples, seed);
  Eigen::MatrixXd bound = cr_bound(model, sigma, phi, xi, rel_threshold);
  // 5x the Frobenius aggregate of the entry standard errors, plus a roundoff
  // allowance so that degenerate estimators (SE exactly zero) are not failed
  // on arithmetic dust.
  const double tol = 5.0 * mc.stderr_V.norm() + 1e-12 * (1.0 + std::abs(bound.trace()));
  return assemble_gap(xi, mc.V, std::move(bound), tol);
}

}  // namespace infogeo
