#include "infogeo/measure.hpp"

#include <cmath>
#include <stdexcept>

namespace infogeo {

namespace {

void check_space_and_size(const std::shared_ptr<const SampleSpace>& space,
                          const Eigen::VectorXd& density) {
  if (!space) throw std::invalid_argument("measure needs a sample space");
  if (static_cast<std::size_t>(density.size()) != space->size()) {
    throw std::invalid_argument("density length does not match the sample space");
  }
}

void check_common_space(const SampleSpace& a, const SampleSpace& b) {
  if (!a.same_space(b)) throw std::invalid_argument("measures live on different sample spaces");
}

}  // namespace

DensityMeasure::DensityMeasure(std::shared_ptr<const SampleSpace> space_, Eigen::VectorXd density_)
    : space(std::move(space_)), density(std::move(density_)) {
  check_space_and_size(space, density);
  for (Eigen::Index i = 0; i < density.size(); ++i) {
    if (!(density[i] >= 0.0) || !std::isfinite(density[i])) {
      throw std::invalid_argument("invalid density");
    }
  }
}

double DensityMeasure::total_mass() const {
  const auto& w = space->base_weights();
  double m = 0.0;
  for (Eigen::Index i = 0; i < density.size(); ++i) m += density[i] * w[i];
  return m;
}

SignedDensity::SignedDensity(std::shared_ptr<const SampleSpace> space_, Eigen::VectorXd density_)
    : space(std::move(space_)), density(std::move(density_)) {
  check_space_and_size(space, density);
  for (Eigen::Index i = 0; i < density.size(); ++i) {
    if (!std::isfinite(density[i])) throw std::invalid_argument("invalid density");
  }
}

double total_variation(const SignedDensity& nu) {
  const auto& w = nu.space->base_weights();
  double tv = 0.0;
  for (Eigen::Index i = 0; i < nu.density.size(); ++i) tv += std::abs(nu.density[i]) * w[i];
  return tv;
}

double lk_norm(const Eigen::VectorXd& f, const DensityMeasure& mu, double k) {
  if (!(k >= 1.0)) throw std::invalid_argument("lk_norm requires k >= 1");
  if (f.size() != mu.density.size()) throw std::invalid_argument("function length mismatch");
  const auto& w = mu.space->base_weights();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (mu.density[i] == 0.0) continue;  // null point, integrand invisible
    if (!std::isfinite(f[i])) throw std::domain_error("non-integrable function");
    acc += std::pow(std::abs(f[i]), k) * mu.density[i] * w[i];
  }
  return std::pow(acc, 1.0 / k);
}

double expectation(const Eigen::VectorXd& f, const DensityMeasure& mu) {
  if (f.size() != mu.density.size()) throw std::invalid_argument("function length mismatch");
  const auto& w = mu.space->base_weights();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (mu.density[i] == 0.0) continue;
    if (!std::isfinite(f[i])) throw std::domain_error("non-integrable function");
    acc += f[i] * mu.density[i] * w[i];
  }
  return acc;
}

DensityMeasure dominating_mixture(const std::vector<DensityMeasure>& nu_list) {
  if (nu_list.empty()) throw std::invalid_argument("dominating_mixture needs at least one measure");
  const auto& space = nu_list.front().space;
  Eigen::VectorXd mix = Eigen::VectorXd::Zero(nu_list.front().density.size());
  double scale = 0.5;  // 1 / 2^n, n = 1, 2, ...
  for (const DensityMeasure& nu : nu_list) {
    check_common_space(*space, *nu.space);
    const double tv = nu.total_mass();  // |nu| = nu for nonnegative densities
    if (tv <= 0.0) throw std::invalid_argument("cannot normalize null measure");
    mix += (scale / tv) * nu.density;
    scale *= 0.5;
  }
  return DensityMeasure(space, std::move(mix));
}

}  // namespace infogeo
