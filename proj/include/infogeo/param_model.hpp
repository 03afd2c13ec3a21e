#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "infogeo/measure.hpp"
#include "infogeo/sample_space.hpp"

namespace infogeo {

namespace defaults {
/// |mass - 1| tolerance when a model claims to be statistical.
inline constexpr double kMassTol = 1e-8;
/// Relative eigenvalue threshold for the numerical rank decision.
inline constexpr double kRankRelThreshold = 1e-8;
/// Absolute eigenvalue floor below which a Fisher matrix counts as zero.
inline constexpr double kRankAbsFloor = 1e-14;
/// Condition number limit for the reduced metric.
inline constexpr double kReducedCondLimit = 1e12;
}  // namespace defaults

/// Finite-difference step for coordinate value x: max(1e-5, 1e-7 |x|).
double fd_step(double x);

/// Parameter domain: a box, optionally cut by linear inequalities A xi <= b
/// (e.g. the probability simplex in chart coordinates).
struct Domain {
  Eigen::VectorXd lower;  // may be -inf
  Eigen::VectorXd upper;  // may be +inf
  Eigen::MatrixXd ineq_A;  // 0 x d when absent
  Eigen::VectorXd ineq_b;

  static Domain box(Eigen::VectorXd lower, Eigen::VectorXd upper);
  static Domain unbounded(int dim);

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Eigen::VectorXd& xi, double slack = 0.0) const;
};

/// Density family p(.; xi) on a SampleSpace.  density(i, xi) is the value of
/// dp(xi)/d(base) at point i; score(i, xi), when provided, the analytic
/// partial_j log p there (the library falls back to finite differences of the
/// log density otherwise).  Instances are immutable; evaluation is pure.
struct ParamModel {
  std::string name;
  std::shared_ptr<const SampleSpace> space;
  int dim = 1;
  Domain domain;
  std::function<double(std::size_t, const Eigen::VectorXd&)> density;
  std::function<Eigen::VectorXd(std::size_t, const Eigen::VectorXd&)> score;  // optional
  bool is_statistical = true;
};

/// Parameter curve t in [t0, t1] -> xi(t); velocity falls back to central
/// differences of the position when not given.
struct Curve {
  double t0 = 0.0;
  double t1 = 1.0;
  std::function<Eigen::VectorXd(double)> position;
  std::function<Eigen::VectorXd(double)> velocity;  // optional

  Eigen::VectorXd velocity_at(double t) const;
};

DensityMeasure density_at(const ParamModel& model, const Eigen::VectorXd& xi);

/// Per-point scores: row i holds (d/dxi_j log p)(point i; xi), zero where the
/// density vanishes.  Analytic when the model carries a score function,
/// otherwise centered (one-sided at active box constraints) differences of
/// log density.
Eigen::MatrixXd score_at(const ParamModel& model, const Eigen::VectorXd& xi);

struct IntegrabilitySample {
  double t = 0.0;
  double norm = 0.0;      // ||d_{xidot} log p||_{L^k(p(xi(t)))}
  double norm_pow = 0.0;  // the k-th power, the quantity with exponent alpha+1-k
};

struct IntegrabilityReport {
  double k = 2.0;
  std::vector<IntegrabilitySample> samples;
  double max_jump = 0.0;  // largest |norm(t_{i+1}) - norm(t_i)|
};

/// Samples t -> ||d_{xidot(t)} log p||_{L^k} along the curve.  Non-finite
/// norms are recorded as +inf entries; that is the diagnostic signal, not an
/// error.
IntegrabilityReport integrability_diagnostic(const ParamModel& model, const Curve& curve,
                                             double k, std::size_t t_samples);

struct RegularityReport {
  std::vector<double> radii;      // ascending
  std::vector<double> sup_norms;  // running sup of ||f||_{L^k(p(xi))} within each radius
};

/// Local-boundedness probe for ||f||_{L^k(p(.))} around xi0: for each radius,
/// the sup over a deterministic low-discrepancy parameter sample inside the
/// box of that radius (intersected with the domain).  Entries are cumulative
/// over nested radii.
RegularityReport regularity_diagnostic(const ParamModel& model, const Eigen::VectorXd& f,
                                       double k, const Eigen::VectorXd& xi0,
                                       const std::vector<double>& radii,
                                       std::size_t samples_per_radius = 32);

/// E_{p(xi(t))}(f) at t_samples equispaced curve times.
std::vector<double> expectation_curve(const ParamModel& model, const Eigen::VectorXd& f,
                                      const Curve& curve, std::size_t t_samples);

/// Derivative of a scalar function of the parameter along coordinate i,
/// central where the box allows and second-order one-sided at active bounds.
double fd_partial(const std::function<double(const Eigen::VectorXd&)>& fn,
                  const Eigen::VectorXd& xi, int coord, const Domain& domain);

/// Finite-difference Jacobian (rows = outputs) of a vector function of the
/// parameter, with the same boundary handling as fd_partial.
Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn,
                            const Eigen::VectorXd& xi, const Domain& domain);

}  // namespace infogeo
