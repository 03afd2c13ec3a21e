#include "infogeo/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace infogeo {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

Eigen::VectorXd vec1(double x) { return Eigen::VectorXd::Constant(1, x); }

Eigen::VectorXd vec2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}

Curve line_curve(Eigen::VectorXd from, Eigen::VectorXd to, double t0, double t1) {
  Curve c;
  c.t0 = t0;
  c.t1 = t1;
  c.position = [from, to, t0, t1](double t) -> Eigen::VectorXd {
    const double s = (t - t0) / (t1 - t0);
    return from + s * (to - from);
  };
  c.velocity = [from, to, t0, t1](double) -> Eigen::VectorXd { return (to - from) / (t1 - t0); };
  return c;
}

std::vector<double> scaled_factors() { return {0.5, 0.8, 1.2}; }

}  // namespace

ZooEntry make_bernoulli() {
  ZooEntry entry;
  entry.name = "bernoulli";
  ParamModel& m = entry.model;
  m.name = entry.name;
  m.space = SampleSpace::finite({"0", "1"});
  m.dim = 1;
  m.domain = Domain::box(vec1(0.0), vec1(1.0));
  m.density = [](std::size_t i, const Eigen::VectorXd& xi) {
    return i == 1 ? xi[0] : 1.0 - xi[0];
  };
  m.score = [](std::size_t i, const Eigen::VectorXd& xi) {
    return vec1(i == 1 ? 1.0 / xi[0] : -1.0 / (1.0 - xi[0]));
  };
  m.is_statistical = true;

  entry.closed_form_fisher = [](const Eigen::VectorXd& xi) -> Eigen::MatrixXd {
    Eigen::MatrixXd G(1, 1);
    G(0, 0) = 1.0 / (xi[0] * (1.0 - xi[0]));
    return G;
  };
  entry.default_curves.push_back(line_curve(vec1(0.1), vec1(0.9), 0.1, 0.9));

  Eigen::MatrixXd empirical(2, 1);
  empirical << 0.0, 1.0;
  entry.estimator_suite.emplace_back(Estimator("empirical", empirical), FeatureMap::identity(1));
  for (double c : scaled_factors()) {
    entry.estimator_suite.emplace_back(
        Estimator("scaled-" + std::to_string(c).substr(0, 3), (c * empirical).eval()),
        FeatureMap::identity(1));
  }
  entry.estimator_suite.emplace_back(
      Estimator("constant", Eigen::MatrixXd::Constant(2, 1, 0.5)), FeatureMap::identity(1));

  entry.default_points = {vec1(0.3), vec1(0.5), vec1(0.7)};
  return entry;
}

ZooEntry make_multinomial(int n) {
  if (n < 2) throw std::invalid_argument("multinomial needs at least two outcomes");
  ZooEntry entry;
  entry.name = "multinomial" + std::to_string(n);
  const int d = n - 1;
  ParamModel& m = entry.model;
  m.name = entry.name;
  m.space = SampleSpace::finite(static_cast<std::size_t>(n));
  m.dim = d;
  {
    Domain dom = Domain::box(Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d));
    dom.ineq_A = Eigen::MatrixXd::Ones(1, d);  // sum mu_i <= 1
    dom.ineq_b = Eigen::VectorXd::Ones(1);
    m.domain = dom;
  }
  m.density = [n, d](std::size_t i, const Eigen::VectorXd& xi) {
    if (static_cast<int>(i) < d) return xi[static_cast<Eigen::Index>(i)];
    return 1.0 - xi.sum();
  };
  m.score = [n, d](std::size_t i, const Eigen::VectorXd& xi) -> Eigen::VectorXd {
    if (static_cast<int>(i) < d) {
      Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
      s[static_cast<Eigen::Index>(i)] = 1.0 / xi[static_cast<Eigen::Index>(i)];
      return s;
    }
    return Eigen::VectorXd::Constant(d, -1.0 / (1.0 - xi.sum()));
  };
  m.is_statistical = true;

  entry.closed_form_fisher = [d](const Eigen::VectorXd& xi) -> Eigen::MatrixXd {
    const double last = 1.0 - xi.sum();
    Eigen::MatrixXd G = Eigen::MatrixXd::Constant(d, d, 1.0 / last);
    for (int i = 0; i < d; ++i) G(i, i) += 1.0 / xi[i];
    return G;
  };

  Eigen::MatrixXd empirical = Eigen::MatrixXd::Zero(n, d);
  for (int i = 0; i < d; ++i) empirical(i, i) = 1.0;  // last outcome maps to the origin
  entry.estimator_suite.emplace_back(Estimator("empirical", empirical), FeatureMap::identity(d));
  for (double c : scaled_factors()) {
    entry.estimator_suite.emplace_back(
        Estimator("scaled-" + std::to_string(c).substr(0, 3), (c * empirical).eval()),
        FeatureMap::identity(d));
  }
  entry.estimator_suite.emplace_back(
      Estimator("constant", Eigen::MatrixXd::Constant(n, d, 1.0 / n)), FeatureMap::identity(d));

  entry.default_points.push_back(Eigen::VectorXd::Constant(d, 1.0 / n));
  {
    Eigen::VectorXd p(d);
    for (int i = 0; i < d; ++i) p[i] = 0.5 / static_cast<double>(i + 2);
    entry.default_points.push_back(p);
  }
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(d, 1.0 / n);
  entry.default_curves.push_back(
      line_curve((0.6 * uniform).eval(), (1.2 * uniform).eval(), 0.0, 1.0));
  return entry;
}

ZooEntry make_full_simplex(int n) {
  if (n < 1) throw std::invalid_argument("simplex needs at least one outcome");
  ZooEntry entry;
  entry.name = "simplex" + std::to_string(n);
  ParamModel& m = entry.model;
  m.name = entry.name;
  m.space = SampleSpace::finite(static_cast<std::size_t>(n));
  m.dim = n;
  m.domain = Domain::box(Eigen::VectorXd::Zero(n),
                         Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity()));
  m.density = [](std::size_t i, const Eigen::VectorXd& mu) { return mu[static_cast<Eigen::Index>(i)]; };
  m.score = [n](std::size_t i, const Eigen::VectorXd& mu) -> Eigen::VectorXd {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
    s[static_cast<Eigen::Index>(i)] = 1.0 / mu[static_cast<Eigen::Index>(i)];
    return s;
  };
  m.is_statistical = false;

  entry.closed_form_fisher = [](const Eigen::VectorXd& mu) -> Eigen::MatrixXd {
    return mu.cwiseInverse().asDiagonal();
  };
  entry.default_points.push_back(Eigen::VectorXd::Ones(n));
  entry.default_points.push_back(Eigen::VectorXd::Constant(n, 1.0 / n));
  return entry;
}

ZooEntry make_gaussian_location(double lo, double hi, std::size_t points) {
  ZooEntry entry;
  entry.name = "gaussian-location";
  ParamModel& m = entry.model;
  m.name = entry.name;
  auto space = SampleSpace::grid(lo, hi, points);
  m.space = space;
  m.dim = 1;
  m.domain = Domain::box(vec1(-3.0), vec1(3.0));
  m.density = [space](std::size_t i, const Eigen::VectorXd& xi) {
    const double r = space->abscissa(i) - xi[0];
    return kInvSqrt2Pi * std::exp(-0.5 * r * r);
  };
  m.score = [space](std::size_t i, const Eigen::VectorXd& xi) {
    return vec1(space->abscissa(i) - xi[0]);
  };
  m.is_statistical = true;

  entry.closed_form_fisher = [](const Eigen::VectorXd&) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Identity(1, 1);
  };
  entry.default_curves.push_back(line_curve(vec1(-1.0), vec1(1.0), -1.0, 1.0));

  const std::size_t n = space->size();
  Eigen::MatrixXd empirical(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    empirical(static_cast<Eigen::Index>(i), 0) = std::clamp(space->abscissa(i), -3.0, 3.0);
  }
  entry.estimator_suite.emplace_back(Estimator("empirical", empirical), FeatureMap::identity(1));
  for (double c : scaled_factors()) {
    entry.estimator_suite.emplace_back(
        Estimator("scaled-" + std::to_string(c).substr(0, 3), (c * empirical).eval()),
        FeatureMap::identity(1));
  }
  entry.estimator_suite.emplace_back(Estimator("constant", Eigen::MatrixXd::Zero(n, 1)),
                                     FeatureMap::identity(1));
  entry.default_points = {vec1(-0.5), vec1(0.0), vec1(1.0)};
  return entry;
}

ZooEntry make_normal_mixture(double lo, double hi, std::size_t points) {
  ZooEntry entry;
  entry.name = "normal-mixture";
  ParamModel& m = entry.model;
  m.name = entry.name;
  auto space = SampleSpace::grid(lo, hi, points);
  m.space = space;
  m.dim = 2;
  m.domain = Domain::box(vec2(0.0, -6.0), vec2(1.0, 6.0));
  m.density = [space](std::size_t i, const Eigen::VectorXd& xi) {
    const double x = space->abscissa(i);
    const double a = xi[0], b = xi[1];
    return kInvSqrt2Pi *
           ((1.0 - a) * std::exp(-0.5 * x * x) + a * std::exp(-0.5 * (x - b) * (x - b)));
  };
  m.score = [space](std::size_t i, const Eigen::VectorXd& xi) -> Eigen::VectorXd {
    const double x = space->abscissa(i);
    const double a = xi[0], b = xi[1];
    const double g0 = std::exp(-0.5 * x * x);
    const double gb = std::exp(-0.5 * (x - b) * (x - b));
    const double p = (1.0 - a) * g0 + a * gb;  // (2 pi)^{1/2} p(x)
    Eigen::VectorXd s(2);
    s[0] = (gb - g0) / p;
    s[1] = a * (x - b) * gb / p;
    return s;
  };
  m.is_statistical = true;

  entry.known_ranks.push_back({vec2(0.0, 0.0), 0});
  for (double a : {0.25, 0.5, 0.75}) entry.known_ranks.push_back({vec2(a, 0.0), 1});
  for (double b : {0.5, 1.0, 2.0}) entry.known_ranks.push_back({vec2(0.0, b), 1});
  for (auto [a, b] : {std::pair{0.25, 1.0}, {0.5, 2.0}, {0.75, 1.0}, {0.3, 3.0}, {0.6, 1.5}}) {
    entry.known_ranks.push_back({vec2(a, b), 2});
  }

  entry.default_curves.push_back(line_curve(vec2(0.5, -1.0), vec2(0.5, 1.0), -1.0, 1.0));

  const std::size_t n = space->size();
  Eigen::MatrixXd empirical(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = space->abscissa(i);
    empirical(static_cast<Eigen::Index>(i), 0) = 1.0 / (1.0 + std::exp(-x));
    empirical(static_cast<Eigen::Index>(i), 1) = 4.0 * std::tanh(0.25 * x);
  }
  entry.estimator_suite.emplace_back(Estimator("empirical", empirical), FeatureMap::identity(2));
  for (double c : scaled_factors()) {
    entry.estimator_suite.emplace_back(
        Estimator("scaled-" + std::to_string(c).substr(0, 3), (c * empirical).eval()),
        FeatureMap::identity(2));
  }
  Eigen::MatrixXd constant(n, 2);
  constant.col(0).setConstant(0.5);
  constant.col(1).setConstant(1.0);
  entry.estimator_suite.emplace_back(Estimator("constant", constant), FeatureMap::identity(2));

  entry.default_points = {vec2(0.25, 1.0), vec2(0.5, 2.0), vec2(0.75, 1.0),
                          vec2(0.0, 0.0),  vec2(0.5, 0.0), vec2(0.0, 1.0)};
  return entry;
}

namespace {

// Normalization of the bump exp(-1/(u(1-u))) on (0,1), computed once on a
// fine Simpson grid.
double bump_normalizer() {
  static const double value = [] {
    const std::size_t n = 40001;
    const double h = 1.0 / static_cast<double>(n - 1);
    double acc = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double u = h * static_cast<double>(i);
      const double w = (i % 2 == 1) ? 4.0 : 2.0;
      acc += w * std::exp(-1.0 / (u * (1.0 - u)));
    }
    return acc * h / 3.0;  // endpoint values vanish
  }();
  return value;
}

double bump(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return std::exp(-1.0 / (u * (1.0 - u))) / bump_normalizer();
}

// u h'(u)/h(u) for the bump: (1-2u)/(u(1-u)^2).
double bump_log_deriv_u(double u) { return (1.0 - 2.0 * u) / (u * (1.0 - u) * (1.0 - u)); }

}  // namespace

ZooEntry make_pathology(const PathologyConfig& config) {
  if (!(config.alpha > 1.0)) throw std::invalid_argument("pathology needs alpha > 1");
  if (!(config.beta > 0.0)) throw std::invalid_argument("pathology needs beta > 0");

  std::vector<SampleSpace::Segment> segments;
  segments.push_back({-1.0, 0.0, config.left_points});
  for (int j = config.blocks; j >= 1; --j) {
    segments.push_back({std::ldexp(1.0, -j), std::ldexp(1.0, -(j - 1)), config.block_points});
  }
  auto space = SampleSpace::grid_segments(segments);

  ZooEntry entry;
  entry.name = "pathology";
  ParamModel& m = entry.model;
  m.name = entry.name;
  m.space = space;
  m.dim = 1;
  m.domain = Domain::box(vec1(-0.9), vec1(0.9));
  const double alpha = config.alpha;
  m.density = [space, alpha](std::size_t i, const Eigen::VectorXd& xi) {
    const double x = space->abscissa(i);
    const double t = std::abs(xi[0]);
    if (x <= 0.0) return t == 0.0 ? 1.0 : 1.0 - std::pow(t, alpha + 1.0);
    if (t == 0.0) return 0.0;
    return std::pow(t, alpha) * bump(x / t);
  };
  m.score = [space, alpha](std::size_t i, const Eigen::VectorXd& xi) -> Eigen::VectorXd {
    const double t = xi[0];
    if (t == 0.0) return vec1(0.0);  // dp_0 = 0
    const double at = std::abs(t);
    const double sgn = t > 0.0 ? 1.0 : -1.0;
    const double x = space->abscissa(i);
    if (x <= 0.0) {
      const double ta = std::pow(at, alpha + 1.0);
      return vec1(-sgn * (alpha + 1.0) * std::pow(at, alpha) / (1.0 - ta));
    }
    const double u = x / at;  // density > 0 guarantees u in (0,1)
    return vec1(sgn * (alpha - bump_log_deriv_u(u)) / at);
  };
  m.is_statistical = true;

  entry.default_curves.push_back(line_curve(vec1(-0.2), vec1(0.2), -0.2, 0.2));
  const std::size_t n = space->size();
  Eigen::MatrixXd empirical(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    empirical(static_cast<Eigen::Index>(i), 0) = 0.5 * space->abscissa(i);
  }
  entry.estimator_suite.emplace_back(Estimator("empirical", empirical), FeatureMap::identity(1));
  entry.estimator_suite.emplace_back(Estimator("constant", Eigen::MatrixXd::Constant(n, 1, 0.1)),
                                     FeatureMap::identity(1));
  entry.default_points = {vec1(0.2), vec1(0.1), vec1(0.05), vec1(0.01), vec1(0.0)};
  return entry;
}

Eigen::VectorXd pathology_feature(const SampleSpace& space, double beta) {
  const auto& xs = space.abscissas();
  double x_min = 0.0;
  for (double x : xs) {
    if (x > 0.0) {
      x_min = x;
      break;
    }
  }
  if (x_min == 0.0) throw std::invalid_argument("space has no positive node");
  Eigen::VectorXd phi(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const double x = xs[i];
    phi[static_cast<Eigen::Index>(i)] = (x >= x_min && x < 1.0) ? std::pow(x, -beta) : 0.0;
  }
  return phi;
}

ZooEntry make_product(const ZooEntry& base, int N) {
  if (N < 1) throw std::invalid_argument("product needs N >= 1");
  if (base.model.space->kind() != SampleSpace::Kind::Finite) {
    throw std::invalid_argument("product combinator needs a finite base space");
  }
  if (N == 1) return base;

  const std::size_t n = base.model.space->size();
  double size_check = 1.0;
  for (int k = 0; k < N; ++k) size_check *= static_cast<double>(n);
  if (size_check > 1e6) throw std::invalid_argument("product space too large");
  const std::size_t total = static_cast<std::size_t>(size_check);

  const auto& base_labels = base.model.space->labels();
  const auto& base_weights = base.model.space->base_weights();
  std::vector<std::string> labels(total);
  std::vector<double> weights(total, 1.0);
  std::vector<std::vector<std::size_t>> digits(total, std::vector<std::size_t>(N));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    std::string label;
    double w = 1.0;
    for (int k = 0; k < N; ++k) {
      const std::size_t digit = rem % n;
      rem /= n;
      digits[idx][static_cast<std::size_t>(k)] = digit;
      if (k > 0) label += ",";
      label += base_labels[digit];
      w *= base_weights[digit];
    }
    labels[idx] = label;
    weights[idx] = w;
  }

  ZooEntry entry;
  entry.name = base.name + "-x" + std::to_string(N);
  ParamModel& m = entry.model;
  m.name = entry.name;
  m.space = SampleSpace::finite(std::move(labels), std::move(weights));
  m.dim = base.model.dim;
  m.domain = base.model.domain;
  m.is_statistical = base.model.is_statistical;

  const auto base_density = base.model.density;
  auto digits_ptr = std::make_shared<std::vector<std::vector<std::size_t>>>(std::move(digits));
  m.density = [base_density, digits_ptr](std::size_t idx, const Eigen::VectorXd& xi) {
    double p = 1.0;
    for (std::size_t digit : (*digits_ptr)[idx]) p *= base_density(digit, xi);
    return p;
  };
  if (base.model.score) {
    const auto base_score = base.model.score;
    const int d = base.model.dim;
    m.score = [base_score, digits_ptr, d](std::size_t idx, const Eigen::VectorXd& xi) {
      Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
      for (std::size_t digit : (*digits_ptr)[idx]) s += base_score(digit, xi);
      return s;
    };
  }

  if (base.closed_form_fisher) {
    const auto base_fisher = base.closed_form_fisher;
    entry.closed_form_fisher = [base_fisher, N](const Eigen::VectorXd& xi) -> Eigen::MatrixXd {
      return static_cast<double>(N) * base_fisher(xi);
    };
  }

  for (const auto& [est, feat] : base.estimator_suite) {
    Eigen::MatrixXd values(total, base.model.dim);
    for (std::size_t idx = 0; idx < total; ++idx) {
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(base.model.dim);
      for (std::size_t digit : (*digits_ptr)[idx]) {
        mean += est.values.row(static_cast<Eigen::Index>(digit)).transpose();
      }
      values.row(static_cast<Eigen::Index>(idx)) = (mean / static_cast<double>(N)).transpose();
    }
    entry.estimator_suite.emplace_back(Estimator(est.name + "-mean", std::move(values)), feat);
  }
  entry.default_points = base.default_points;
  entry.default_curves = base.default_curves;
  return entry;
}

ParamModel reparametrized(const ParamModel& model, const Eigen::MatrixXd& A,
                          const Eigen::VectorXd& c) {
  if (A.rows() != model.dim || A.cols() != model.dim || c.size() != model.dim) {
    throw std::invalid_argument("reparametrization shape mismatch");
  }
  ParamModel out;
  out.name = model.name + "-reparam";
  out.space = model.space;
  out.dim = model.dim;
  out.is_statistical = model.is_statistical;

  // eta-domain: map each finite box face and inequality through xi = A eta + c.
  const int d = model.dim;
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> bs;
  for (int i = 0; i < d; ++i) {
    if (std::isfinite(model.domain.upper[i])) {
      rows.push_back(A.row(i).transpose());
      bs.push_back(model.domain.upper[i] - c[i]);
    }
    if (std::isfinite(model.domain.lower[i])) {
      rows.push_back((-A.row(i)).transpose());
      bs.push_back(c[i] - model.domain.lower[i]);
    }
  }
  for (Eigen::Index r = 0; r < model.domain.ineq_A.rows(); ++r) {
    rows.push_back((model.domain.ineq_A.row(r) * A).transpose());
    bs.push_back(model.domain.ineq_b[r] - model.domain.ineq_A.row(r).dot(c));
  }
  Domain dom = Domain::unbounded(d);
  dom.ineq_A.resize(static_cast<Eigen::Index>(rows.size()), d);
  dom.ineq_b.resize(static_cast<Eigen::Index>(bs.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    dom.ineq_A.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    dom.ineq_b[static_cast<Eigen::Index>(r)] = bs[r];
  }
  out.domain = dom;

  const auto density = model.density;
  out.density = [density, A, c](std::size_t i, const Eigen::VectorXd& eta) {
    return density(i, A * eta + c);
  };
  if (model.score) {
    const auto score = model.score;
    out.score = [score, A, c](std::size_t i, const Eigen::VectorXd& eta) -> Eigen::VectorXd {
      return A.transpose() * score(i, A * eta + c);
    };
  }
  return out;
}

}  // namespace infogeo
