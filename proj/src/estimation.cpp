#include "infogeo/estimation.hpp"

#include <cmath>
#include <stdexcept>

namespace infogeo {

FeatureMap FeatureMap::identity(int d) {
  FeatureMap f;
  f.name = "identity";
  f.m = d;
  f.phi = [](const Eigen::VectorXd& xi) { return xi; };
  f.jacobian = [d](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(d, d); };
  return f;
}

FeatureMap FeatureMap::affine(Eigen::MatrixXd A, Eigen::VectorXd offset) {
  if (A.rows() != offset.size()) throw std::invalid_argument("affine feature shape mismatch");
  FeatureMap f;
  f.name = "affine";
  f.m = static_cast<int>(A.rows());
  f.phi = [A, offset](const Eigen::VectorXd& xi) -> Eigen::VectorXd { return A * xi + offset; };
  f.jacobian = [A](const Eigen::VectorXd&) { return A; };
  return f;
}

Estimator::Estimator(std::string name_, Eigen::MatrixXd values_)
    : name(std::move(name_)), values(std::move(values_)) {
  if (!values.allFinite()) throw std::invalid_argument("estimator values must be finite");
}

bool Estimator::in_domain(const Domain& domain) const {
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    if (!domain.contains(values.row(i).transpose())) return false;
  }
  return true;
}

namespace {

// phi o sigma evaluated at every sample point: rows = points, cols = features.
Eigen::MatrixXd feature_table(const ParamModel& model, const Estimator& sigma,
                              const FeatureMap& phi) {
  if (static_cast<std::size_t>(sigma.values.rows()) != model.space->size()) {
    throw std::invalid_argument("estimator table does not match the sample space");
  }
  if (sigma.values.cols() != model.dim) {
    throw std::invalid_argument("estimator table does not match the parameter dimension");
  }
  Eigen::MatrixXd table(sigma.values.rows(), phi.m);
  for (Eigen::Index i = 0; i < sigma.values.rows(); ++i) {
    Eigen::VectorXd v = phi.phi(sigma.values.row(i).transpose());
    if (v.size() != phi.m) throw std::logic_error("feature map has wrong dimension");
    table.row(i) = v.transpose();
  }
  return table;
}

void check_integrable(const Eigen::MatrixXd& table, const DensityMeasure& mu) {
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    if (mu.density[i] > 0.0 && !table.row(i).allFinite()) {
      throw std::domain_error("non-integrable function");
    }
  }
}

}  // namespace

Eigen::VectorXd phi_hat(const ParamModel& model, const Estimator& sigma, const FeatureMap& phi,
                        const Eigen::VectorXd& xi) {
  const DensityMeasure mu = density_at(model, xi);
  const Eigen::MatrixXd table = feature_table(model, sigma, phi);
  check_integrable(table, mu);
  const auto& w = model.space->base_weights();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(phi.m);
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    const double mass = mu.density[i] * w[static_cast<std::size_t>(i)];
    if (mass == 0.0) continue;
    out += mass * table.row(i).transpose();
  }
  return out;
}

Eigen::MatrixXd d_phi_hat(const ParamModel& model, const Estimator& sigma, const FeatureMap& phi,
                          const Eigen::VectorXd& xi) {
  const DensityMeasure mu = density_at(model, xi);
  const Eigen::MatrixXd table = feature_table(model, sigma, phi);
  check_integrable(table, mu);
  const Eigen::MatrixXd scores = score_at(model, xi);
  const auto& w = model.space->base_weights();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(phi.m, model.dim);
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    const double mass = mu.density[i] * w[static_cast<std::size_t>(i)];
    if (mass == 0.0) continue;
    out.noalias() += mass * (table.row(i).transpose() * scores.row(i));
  }
  if (!out.allFinite()) throw std::domain_error("non-integrable function");
  return out;
}

EstimatorStats estimator_stats(const ParamModel& model, const Estimator& sigma,
                               const FeatureMap& phi, const Eigen::VectorXd& xi) {
  if (!model.is_statistical) {
    throw std::invalid_argument("estimator statistics need a statistical model");
  }
  const DensityMeasure mu = density_at(model, xi);
  const Eigen::MatrixXd table = feature_table(model, sigma, phi);
  check_integrable(table, mu);
  const auto& w = model.space->base_weights();

  EstimatorStats st;
  st.xi = xi;
  st.phi_hat = Eigen::VectorXd::Zero(phi.m);
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    const double mass = mu.density[i] * w[static_cast<std::size_t>(i)];
    if (mass == 0.0) continue;
    st.phi_hat += mass * table.row(i).transpose();
  }

  const Eigen::VectorXd phi_true = phi.phi(xi);
  st.bias = st.phi_hat - phi_true;

  st.V = Eigen::MatrixXd::Zero(phi.m, phi.m);
  st.MSE = Eigen::MatrixXd::Zero(phi.m, phi.m);
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    const double mass = mu.density[i] * w[static_cast<std::size_t>(i)];
    if (mass == 0.0) continue;
    const Eigen::VectorXd centered = table.row(i).transpose() - st.phi_hat;
    const Eigen::VectorXd about_true = table.row(i).transpose() - phi_true;
    st.V.noalias() += mass * (centered * centered.transpose());
    st.MSE.noalias() += mass * (about_true * about_true.transpose());
  }
  st.V = 0.5 * (st.V + st.V.transpose()).eval();
  st.MSE = 0.5 * (st.MSE + st.MSE.transpose()).eval();

  st.d_phi_hat = d_phi_hat(model, sigma, phi, xi);
  st.msevb_residual =
      (st.MSE - st.V - st.bias * st.bias.transpose()).cwiseAbs().maxCoeff();
  return st;
}

std::vector<PreGradientEntry> pre_gradient_check(const ParamModel& model,
                                                 const Eigen::VectorXd& f,
                                                 const Eigen::VectorXd& xi,
                                                 const std::vector<Eigen::VectorXd>& directions) {
  const DensityMeasure mu = density_at(model, xi);
  const double mean = expectation(f, mu);
  const Eigen::MatrixXd scores = score_at(model, xi);

  std::vector<PreGradientEntry> report;
  report.reserve(directions.size());
  for (const Eigen::VectorXd& X : directions) {
    if (X.size() != model.dim) throw std::invalid_argument("direction length mismatch");
    PreGradientEntry entry;
    entry.direction = X;

    // FD derivative of t -> E_{p(xi + t X)}(f) at t = 0, one-sided if the
    // domain cuts the line.
    const auto along = [&](double t) {
      return expectation(f, density_at(model, xi + t * X));
    };
    const double h = 1e-5;
    const auto ok = [&](double t) { return model.domain.contains(xi + t * X, 1e-12); };
    if (ok(h) && ok(-h)) {
      entry.lhs = (along(h) - along(-h)) / (2.0 * h);
    } else if (ok(h) && ok(2.0 * h)) {
      entry.lhs = (-3.0 * along(0.0) + 4.0 * along(h) - along(2.0 * h)) / (2.0 * h);
    } else if (ok(-h) && ok(-2.0 * h)) {
      entry.lhs = (3.0 * along(0.0) - 4.0 * along(-h) + along(-2.0 * h)) / (2.0 * h);
    } else {
      throw std::domain_error("domain too thin for differentiation");
    }

    const Eigen::VectorXd dir_score = scores * X;
    entry.rhs = expectation(((f.array() - mean) * dir_score.array()).matrix(), mu);
    entry.residual = std::abs(entry.lhs - entry.rhs);
    report.push_back(std::move(entry));
  }
  return report;
}

}  // namespace infogeo
