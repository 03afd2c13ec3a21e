#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "infogeo/estimation.hpp"
#include "infogeo/param_model.hpp"

namespace infogeo {

struct KnownRank {
  Eigen::VectorXd xi;
  int rank = 0;
};

/// A ready-made model with its exercise kit: curves for the diagnostics, a
/// suite of (estimator, feature) pairs for the bound checks, and the facts
/// the test suite holds it to.
struct ZooEntry {
  std::string name;
  ParamModel model;
  std::vector<Curve> default_curves;
  std::vector<std::pair<Estimator, FeatureMap>> estimator_suite;
  std::vector<KnownRank> known_ranks;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> closed_form_fisher;  // may be empty
  std::vector<Eigen::VectorXd> default_points;
};

/// Two-outcome model, p(1) = xi, with analytic scores.
ZooEntry make_bernoulli();

/// Probability simplex on n outcomes in the chart (mu_1, ..., mu_{n-1}),
/// mu_n = 1 - sum.
ZooEntry make_multinomial(int n);

/// The cone of all positive measures on n outcomes, coordinates mu_i; not
/// statistical.  Reference model for the closed-form Fisher metric
/// diag(1/mu_i).
ZooEntry make_full_simplex(int n);

/// N(xi, 1) on a truncated grid; Fisher information constant 1.
ZooEntry make_gaussian_location(double lo = -12.0, double hi = 12.0, std::size_t points = 3001);

/// Normal mixture p(x | a, b) = ((1-a) e^{-x^2/2} + a e^{-(x-b)^2/2}) / sqrt(2 pi)
/// on a in [0,1], b in [-6,6]; singular exactly on {a=0} union {b=0}.
ZooEntry make_normal_mixture(double lo = -12.0, double hi = 12.0, std::size_t points = 4001);

/// Knobs for the discontinuous-expectation family.
struct PathologyConfig {
  double alpha = 2.0;
  double beta = 4.0;
  std::size_t left_points = 201;    // uniform Simpson nodes on [-1, 0]
  std::size_t block_points = 257;   // Simpson nodes per geometric block of (0, 1]
  int blocks = 24;                  // dyadic blocks down to 2^-blocks
};

/// Family p_t = (1-|t|^{a+1}) chi_(-1,0) + |t|^a h(x/|t|) chi_(0,1) with a
/// smooth bump h; l-integrable for l < alpha+1, with the attached feature
/// x^{-beta} making t -> E_{p_t}(phi) discontinuous when beta > alpha+1.
ZooEntry make_pathology(const PathologyConfig& config = {});

/// The feature chi_(0,1) x^{-beta} clipped below the smallest positive node.
Eigen::VectorXd pathology_feature(const SampleSpace& space, double beta);

/// i.i.d. N-fold product of a finite-space entry: product outcomes, product
/// densities, summed scores; estimators become per-component averages.
/// Fisher information is N times the base information.
ZooEntry make_product(const ZooEntry& base, int N);

/// Model in new coordinates eta with xi = A eta + c, A invertible; scores
/// pull back by A^T and the domain by the affine map.
ParamModel reparametrized(const ParamModel& model, const Eigen::MatrixXd& A,
                          const Eigen::VectorXd& c);

}  // namespace infogeo
