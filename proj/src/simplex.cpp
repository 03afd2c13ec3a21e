#include "infogeo/simplex.hpp"

#include <cmath>
#include <stdexcept>

namespace infogeo {

namespace {

void check_dims(const SimplexPoint& p, const Eigen::VectorXd& f) {
  if (f.size() != p.mu.size()) throw std::invalid_argument("vector length does not match outcome count");
}

}  // namespace

SimplexPoint::SimplexPoint(Eigen::VectorXd mu_, bool constrained_)
    : mu(std::move(mu_)), constrained(constrained_) {
  if (mu.size() == 0) throw std::invalid_argument("simplex point needs at least one outcome");
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (!(mu[i] > 0.0) || !std::isfinite(mu[i])) {
      throw std::invalid_argument("simplex point masses must be strictly positive");
    }
  }
  if (constrained && std::abs(mu.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("constrained simplex point must have unit mass");
  }
}

Eigen::MatrixXd fisher_metric_full(const SimplexPoint& p) {
  return p.mu.cwiseInverse().asDiagonal();
}

double inverse_pairing_full(const SimplexPoint& p, const Eigen::VectorXd& f,
                            const Eigen::VectorXd& g) {
  check_dims(p, f);
  check_dims(p, g);
  return (f.array() * g.array() * p.mu.array()).sum();
}

double inverse_pairing_simplex(const SimplexPoint& p, const Eigen::VectorXd& f,
                               const Eigen::VectorXd& g) {
  if (!p.constrained) throw std::invalid_argument("covariance pairing needs a probability simplex point");
  check_dims(p, f);
  check_dims(p, g);
  const double fbar = (f.array() * p.mu.array()).sum();
  const double gbar = (g.array() * p.mu.array()).sum();
  return ((f.array() - fbar) * (g.array() - gbar) * p.mu.array()).sum();
}

Eigen::VectorXd fisher_gradient_full(const SimplexPoint& p, const Eigen::VectorXd& partials) {
  check_dims(p, partials);
  return p.mu.cwiseProduct(partials);
}

Eigen::VectorXd fisher_gradient_simplex(const SimplexPoint& p, const Eigen::VectorXd& partials) {
  if (!p.constrained) throw std::invalid_argument("simplex gradient needs a probability simplex point");
  check_dims(p, partials);
  const double lambda = (p.mu.array() * partials.array()).sum();
  return (p.mu.array() * (partials.array() - lambda)).matrix();
}

}  // namespace infogeo
