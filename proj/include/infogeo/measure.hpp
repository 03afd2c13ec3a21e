#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "infogeo/sample_space.hpp"

namespace infogeo {

/// A finite measure given by its density with respect to the base weights of
/// a SampleSpace: mu({i}) = density[i] * base_weight[i].
struct DensityMeasure {
  std::shared_ptr<const SampleSpace> space;
  Eigen::VectorXd density;  // >= 0, finite

  DensityMeasure(std::shared_ptr<const SampleSpace> space_, Eigen::VectorXd density_);

  double total_mass() const;
};

/// Same storage with sign allowed; normed by total variation.
struct SignedDensity {
  std::shared_ptr<const SampleSpace> space;
  Eigen::VectorXd density;

  SignedDensity(std::shared_ptr<const SampleSpace> space_, Eigen::VectorXd density_);
};

double total_variation(const SignedDensity& nu);

/// (sum_i |f_i|^k density_i w_i)^(1/k).  Points of zero density contribute
/// nothing whatever f holds there; non-finite f at a positive-density point
/// is rejected.
double lk_norm(const Eigen::VectorXd& f, const DensityMeasure& mu, double k);

/// sum_i f_i density_i w_i, with the same null-set convention as lk_norm.
double expectation(const Eigen::VectorXd& f, const DensityMeasure& mu);

/// Weighted mixture sum_n |nu_n| / (2^n ||nu_n||_TV); dominates every input.
DensityMeasure dominating_mixture(const std::vector<DensityMeasure>& nu_list);

}  // namespace infogeo
