#include "infogeo/param_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace infogeo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Low-discrepancy sequence on [0,1)^d (Halton, first d prime bases).
double halton(std::size_t index, unsigned base) {
  double f = 1.0, r = 0.0;
  std::size_t i = index;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace

double fd_step(double x) { return std::max(1e-5, 1e-7 * std::abs(x)); }

Domain Domain::box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() != upper.size()) throw std::invalid_argument("box bounds differ in length");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) throw std::invalid_argument("box bounds must satisfy lower < upper");
  }
  Domain d;
  d.lower = std::move(lower);
  d.upper = std::move(upper);
  d.ineq_A.resize(0, d.lower.size());
  d.ineq_b.resize(0);
  return d;
}

Domain Domain::unbounded(int dim) {
  return box(Eigen::VectorXd::Constant(dim, -kInf), Eigen::VectorXd::Constant(dim, kInf));
}

bool Domain::contains(const Eigen::VectorXd& xi, double slack) const {
  if (xi.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    if (!std::isfinite(xi[i])) return false;
    if (xi[i] < lower[i] - slack || xi[i] > upper[i] + slack) return false;
  }
  if (ineq_A.rows() > 0) {
    Eigen::VectorXd r = ineq_A * xi - ineq_b;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      if (r[i] > slack) return false;
    }
  }
  return true;
}

Eigen::VectorXd Curve::velocity_at(double t) const {
  if (velocity) return velocity(t);
  double h = fd_step(t);
  double a = t - h, b = t + h;
  if (a < t0) a = t0;
  if (b > t1) b = t1;
  if (!(b > a)) throw std::invalid_argument("curve interval too small for differentiation");
  return (position(b) - position(a)) / (b - a);
}

DensityMeasure density_at(const ParamModel& model, const Eigen::VectorXd& xi) {
  if (!model.domain.contains(xi)) throw std::domain_error("parameter out of domain");
  const std::size_t n = model.space->size();
  Eigen::VectorXd dens(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = model.density(i, xi);
    if (!std::isfinite(v) || v < 0.0) throw std::domain_error("invalid density");
    dens[static_cast<Eigen::Index>(i)] = v;
  }
  DensityMeasure mu(model.space, std::move(dens));
  if (model.is_statistical && std::abs(mu.total_mass() - 1.0) > defaults::kMassTol) {
    throw std::domain_error("invalid density: mass deviates from 1 beyond tolerance");
  }
  return mu;
}

namespace {

// Stencil along coordinate `coord` honouring the box: central when both
// neighbours stay inside, otherwise second-order one-sided.
struct Stencil {
  double offsets[3];
  double coeffs[3];  // divided by h already applied by caller
  int n;
};

Stencil make_stencil(const Eigen::VectorXd& xi, int coord, const Domain& domain, double h) {
  const auto inside = [&](double off) {
    Eigen::VectorXd p = xi;
    p[coord] += off;
    return domain.contains(p, 1e-12);
  };
  const bool minus_ok = inside(-h);
  const bool plus_ok = inside(h);
  if (minus_ok && plus_ok) return Stencil{{-h, h, 0}, {-0.5, 0.5, 0}, 2};
  if (plus_ok && inside(2 * h)) return Stencil{{0, h, 2 * h}, {-1.5, 2.0, -0.5}, 3};
  if (minus_ok && inside(-2 * h)) return Stencil{{0, -h, -2 * h}, {1.5, -2.0, 0.5}, 3};
  throw std::domain_error("score undefined: domain too thin for differentiation");
}

}  // namespace

double fd_partial(const std::function<double(const Eigen::VectorXd&)>& fn,
                  const Eigen::VectorXd& xi, int coord, const Domain& domain) {
  const double h = fd_step(xi[coord]);
  const Stencil st = make_stencil(xi, coord, domain, h);
  double acc = 0.0;
  for (int s = 0; s < st.n; ++s) {
    Eigen::VectorXd p = xi;
    p[coord] += st.offsets[s];
    acc += st.coeffs[s] * fn(p);
  }
  return acc / h;
}

Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn,
                            const Eigen::VectorXd& xi, const Domain& domain) {
  const Eigen::VectorXd base = fn(xi);
  Eigen::MatrixXd jac(base.size(), xi.size());
  for (int j = 0; j < xi.size(); ++j) {
    const double h = fd_step(xi[j]);
    const Stencil st = make_stencil(xi, j, domain, h);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(base.size());
    for (int s = 0; s < st.n; ++s) {
      Eigen::VectorXd p = xi;
      p[j] += st.offsets[s];
      acc += st.coeffs[s] * (st.offsets[s] == 0.0 ? base : fn(p));
    }
    jac.col(j) = acc / h;
  }
  return jac;
}

Eigen::MatrixXd score_at(const ParamModel& model, const Eigen::VectorXd& xi) {
  if (!model.domain.contains(xi)) throw std::domain_error("parameter out of domain");
  const std::size_t n = model.space->size();
  Eigen::MatrixXd scores(n, model.dim);
  if (model.score) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = model.density(i, xi);
      if (p == 0.0) {
        scores.row(static_cast<Eigen::Index>(i)).setZero();
        continue;
      }
      Eigen::VectorXd s = model.score(i, xi);
      if (s.size() != model.dim) throw std::logic_error("score function has wrong dimension");
      scores.row(static_cast<Eigen::Index>(i)) = s.transpose();
    }
    return scores;
  }

  // Finite differences of log density, coordinate by coordinate.
  for (int j = 0; j < model.dim; ++j) {
    const double h = fd_step(xi[j]);
    const Stencil st = make_stencil(xi, j, model.domain, h);
    for (std::size_t i = 0; i < n; ++i) {
      const double p0 = model.density(i, xi);
      if (p0 == 0.0) {
        scores(static_cast<Eigen::Index>(i), j) = 0.0;
        continue;
      }
      double acc = 0.0;
      for (int s = 0; s < st.n; ++s) {
        Eigen::VectorXd p = xi;
        p[j] += st.offsets[s];
        const double pv = st.offsets[s] == 0.0 ? p0 : model.density(i, p);
        if (!(pv > 0.0)) throw std::domain_error("score undefined");
        acc += st.coeffs[s] * std::log(pv);
      }
      scores(static_cast<Eigen::Index>(i), j) = acc / h;
    }
  }
  return scores;
}

IntegrabilityReport integrability_diagnostic(const ParamModel& model, const Curve& curve,
                                             double k, std::size_t t_samples) {
  if (!(k > 1.0)) throw std::invalid_argument("integrability diagnostic requires k > 1");
  if (t_samples < 3) throw std::invalid_argument("integrability diagnostic needs t_samples >= 3");
  IntegrabilityReport report;
  report.k = k;
  report.samples.reserve(t_samples);
  const double dt = (curve.t1 - curve.t0) / static_cast<double>(t_samples - 1);
  for (std::size_t s = 0; s < t_samples; ++s) {
    const double t = (s + 1 == t_samples) ? curve.t1 : curve.t0 + dt * static_cast<double>(s);
    const Eigen::VectorXd xi = curve.position(t);
    if (!model.domain.contains(xi)) throw std::domain_error("parameter out of domain");
    const Eigen::VectorXd v = curve.velocity_at(t);
    double norm = kInf;
    try {
      const DensityMeasure mu = density_at(model, xi);
      const Eigen::VectorXd dir_score = score_at(model, xi) * v;
      norm = lk_norm(dir_score, mu, k);
    } catch (const std::exception&) {
      norm = kInf;  // reported, not thrown: divergence is the signal
    }
    report.samples.push_back({t, norm, std::isfinite(norm) ? std::pow(norm, k) : kInf});
  }
  double jump = 0.0;
  for (std::size_t s = 0; s + 1 < report.samples.size(); ++s) {
    const double a = report.samples[s].norm, b = report.samples[s + 1].norm;
    if (!std::isfinite(a) || !std::isfinite(b)) {
      jump = kInf;
      break;
    }
    jump = std::max(jump, std::abs(b - a));
  }
  report.max_jump = jump;
  return report;
}

RegularityReport regularity_diagnostic(const ParamModel& model, const Eigen::VectorXd& f,
                                       double k, const Eigen::VectorXd& xi0,
                                       const std::vector<double>& radii,
                                       std::size_t samples_per_radius) {
  if (!(k > 1.0)) throw std::invalid_argument("regularity diagnostic requires k > 1");
  if (!model.domain.contains(xi0)) throw std::domain_error("parameter out of domain");
  RegularityReport report;
  report.radii = radii;
  std::sort(report.radii.begin(), report.radii.end());
  double running = 0.0;
  {
    const DensityMeasure mu0 = density_at(model, xi0);
    running = lk_norm(f, mu0, k);
  }
  for (std::size_t r = 0; r < report.radii.size(); ++r) {
    const double radius = report.radii[r];
    for (std::size_t s = 0; s < samples_per_radius; ++s) {
      Eigen::VectorXd xi = xi0;
      for (int j = 0; j < model.dim; ++j) {
        const double u = halton(s + 1, kPrimes[j % 12]);
        xi[j] += radius * (2.0 * u - 1.0);
        xi[j] = std::min(std::max(xi[j], model.domain.lower[j]), model.domain.upper[j]);
      }
      if (!model.domain.contains(xi)) continue;
      double norm = kInf;
      try {
        norm = lk_norm(f, density_at(model, xi), k);
      } catch (const std::exception&) {
        norm = kInf;
      }
      running = std::max(running, norm);
    }
    report.sup_norms.push_back(running);
  }
  return report;
}

std::vector<double> expectation_curve(const ParamModel& model, const Eigen::VectorXd& f,
                                      const Curve& curve, std::size_t t_samples) {
  if (t_samples < 1) throw std::invalid_argument("expectation_curve needs t_samples >= 1");
  std::vector<double> values;
  values.reserve(t_samples);
  const double dt = t_samples == 1 ? 0.0 : (curve.t1 - curve.t0) / static_cast<double>(t_samples - 1);
  for (std::size_t s = 0; s < t_samples; ++s) {
    const double t = (t_samples > 1 && s + 1 == t_samples)
                         ? curve.t1
                         : curve.t0 + dt * static_cast<double>(s);
    values.push_back(expectation(f, density_at(model, curve.position(t))));
  }
  return values;
}

}  // namespace infogeo
