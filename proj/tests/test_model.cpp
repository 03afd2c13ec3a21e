#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "infogeo/zoo.hpp"
#include "oracles.hpp"

using namespace infogeo;

namespace {

Eigen::VectorXd vec1(double x) { return Eigen::VectorXd::Constant(1, x); }

Eigen::VectorXd vec2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}

// Interior probe parameters per zoo model for the score checks.
std::vector<std::pair<ZooEntry, std::vector<Eigen::VectorXd>>> score_probe_set() {
  std::vector<std::pair<ZooEntry, std::vector<Eigen::VectorXd>>> set;
  set.emplace_back(make_bernoulli(), std::vector<Eigen::VectorXd>{vec1(0.2), vec1(0.5), vec1(0.85)});
  {
    auto multi = make_multinomial(3);
    set.emplace_back(multi, std::vector<Eigen::VectorXd>{vec2(1.0 / 3, 1.0 / 3), vec2(0.2, 0.5)});
  }
  set.emplace_back(make_gaussian_location(), std::vector<Eigen::VectorXd>{vec1(-0.7), vec1(1.3)});
  {
    auto mix = make_normal_mixture();
    set.emplace_back(mix, std::vector<Eigen::VectorXd>{vec2(0.3, 1.0), vec2(0.7, -2.0)});
  }
  return set;
}

}  // namespace

TEST_CASE("bernoulli density and domain checks") {
  auto entry = make_bernoulli();
  auto mu = density_at(entry.model, vec1(0.3));
  CHECK(mu.density[0] == doctest::Approx(0.7));
  CHECK(mu.density[1] == doctest::Approx(0.3));
  CHECK_THROWS_WITH(density_at(entry.model, vec1(1.5)), "parameter out of domain");
}

TEST_CASE("statistical mass check rejects broken densities") {
  ParamModel broken = make_bernoulli().model;
  broken.density = [](std::size_t i, const Eigen::VectorXd& xi) {
    return i == 1 ? 2.0 * xi[0] : 1.0 - xi[0];
  };
  broken.score = nullptr;
  CHECK_THROWS(density_at(broken, vec1(0.4)));
}

TEST_CASE("bernoulli scores") {
  auto entry = make_bernoulli();
  const Eigen::MatrixXd s = score_at(entry.model, vec1(0.5));
  CHECK(s(1, 0) == doctest::Approx(2.0));
  CHECK(s(0, 0) == doctest::Approx(-2.0));
}

TEST_CASE("analytic scores match finite differences of log density") {
  for (auto& [entry, points] : score_probe_set()) {
    CAPTURE(entry.name);
    REQUIRE(entry.model.score);
    ParamModel fd_model = entry.model;
    fd_model.score = nullptr;
    for (const auto& xi : points) {
      const Eigen::MatrixXd analytic = score_at(entry.model, xi);
      const Eigen::MatrixXd numeric = score_at(fd_model, xi);
      const DensityMeasure mu = density_at(entry.model, xi);
      double worst = 0.0;
      for (Eigen::Index i = 0; i < analytic.rows(); ++i) {
        if (mu.density[i] == 0.0) continue;
        worst = std::max(worst, (analytic.row(i) - numeric.row(i)).cwiseAbs().maxCoeff());
      }
      CHECK(worst <= 1e-5);
    }
  }
}

TEST_CASE("pathology scores match finite differences away from the support edge") {
  // The score is unbounded near the edge of the moving support; the
  // comparison is meaningful only where it stays moderate.
  auto entry = make_pathology();
  ParamModel fd_model = entry.model;
  fd_model.score = nullptr;
  for (double t : {0.2, -0.2, 0.4, -0.4}) {
    const Eigen::VectorXd xi = vec1(t);
    const Eigen::MatrixXd analytic = score_at(entry.model, xi);
    const Eigen::MatrixXd numeric = score_at(fd_model, xi);
    const DensityMeasure mu = density_at(entry.model, xi);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < analytic.rows(); ++i) {
      if (mu.density[i] == 0.0 || std::abs(analytic(i, 0)) > 100.0) continue;
      worst = std::max(worst, std::abs(analytic(i, 0) - numeric(i, 0)));
    }
    CHECK(worst <= 1e-5);
  }
}

TEST_CASE("score centering on statistical models") {
  for (auto& [entry, points] : score_probe_set()) {
    if (!entry.model.is_statistical) continue;
    CAPTURE(entry.name);
    for (const auto& xi : points) {
      const DensityMeasure mu = density_at(entry.model, xi);
      const Eigen::MatrixXd s = score_at(entry.model, xi);
      for (int j = 0; j < entry.model.dim; ++j) {
        CHECK(std::abs(expectation(s.col(j), mu)) <= 1e-7);
      }
    }
  }
}

TEST_CASE("normal mixture degenerate directions") {
  auto entry = make_normal_mixture();
  SUBCASE("a-score vanishes identically on b = 0") {
    const Eigen::MatrixXd s = score_at(entry.model, vec2(0.4, 0.0));
    CHECK(s.col(0).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("at a = 0 the density is the standard normal regardless of b") {
    const DensityMeasure mu = density_at(entry.model, vec2(0.0, 5.0));
    for (std::size_t i = 0; i < entry.model.space->size(); i += 257) {
      const double x = entry.model.space->abscissa(i);
      CHECK(mu.density[static_cast<Eigen::Index>(i)] ==
            doctest::Approx(std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI)).epsilon(1e-12));
    }
  }
}

TEST_CASE("differentiation under the integral on zoo models") {
  for (auto& [entry, points] : score_probe_set()) {
    if (!entry.model.is_statistical) continue;
    CAPTURE(entry.name);
    const std::size_t n = entry.model.space->size();
    Eigen::VectorXd f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = std::sin(static_cast<double>(i % 17));  // bounded
    for (const auto& xi : points) {
      const DensityMeasure mu = density_at(entry.model, xi);
      const Eigen::MatrixXd s = score_at(entry.model, xi);
      for (int j = 0; j < entry.model.dim; ++j) {
        const double lhs = fd_partial(
            [&](const Eigen::VectorXd& p) { return expectation(f, density_at(entry.model, p)); },
            xi, j, entry.model.domain);
        const double rhs = expectation((f.array() * s.col(j).array()).matrix(), mu);
        CHECK(std::abs(lhs - rhs) <= 1e-5 * std::max(1.0, std::abs(rhs)));
      }
    }
  }
}

TEST_CASE("integrability diagnostic is flat for the location family") {
  auto entry = make_gaussian_location();
  const IntegrabilityReport rep =
      integrability_diagnostic(entry.model, entry.default_curves.front(), 2.0, 21);
  for (const auto& s : rep.samples) CHECK(s.norm == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rep.max_jump <= 1e-8);
}

TEST_CASE("non-finite norms are reported as +inf entries, not errors") {
  ParamModel m;
  m.name = "spiky";
  m.space = SampleSpace::finite(2);
  m.dim = 1;
  m.domain = Domain::box(vec1(-1.0), vec1(1.0));
  m.density = [](std::size_t, const Eigen::VectorXd&) { return 0.5; };
  m.score = [](std::size_t, const Eigen::VectorXd& xi) {
    return vec1(xi[0] > 0.0 ? 1e200 : 1.0);  // fourth power overflows
  };
  m.is_statistical = true;
  Curve line;
  line.t0 = -0.5;
  line.t1 = 0.5;
  line.position = [](double t) { return vec1(t); };
  line.velocity = [](double) { return vec1(1.0); };
  const IntegrabilityReport rep = integrability_diagnostic(m, line, 4.0, 11);
  bool saw_infinite = false, saw_finite = false;
  for (const auto& s : rep.samples) {
    saw_infinite = saw_infinite || !std::isfinite(s.norm);
    saw_finite = saw_finite || std::isfinite(s.norm);
  }
  CHECK(saw_infinite);
  CHECK(saw_finite);
  CHECK(!std::isfinite(rep.max_jump));
}

TEST_CASE("regularity diagnostic") {
  auto entry = make_bernoulli();
  const std::size_t n = entry.model.space->size();
  SUBCASE("bounded functions stay below their sup") {
    Eigen::VectorXd f(n);
    f << 0.3, -0.9;
    const RegularityReport rep =
        regularity_diagnostic(entry.model, f, 2.0, vec1(0.5), {0.05, 0.1, 0.2});
    REQUIRE(rep.sup_norms.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(rep.sup_norms[i] <= 0.9 + 1e-12);
      if (i > 0) CHECK(rep.sup_norms[i] >= rep.sup_norms[i - 1]);  // nested sup is monotone
    }
  }
  SUBCASE("zero function reports zero") {
    const RegularityReport rep =
        regularity_diagnostic(entry.model, Eigen::VectorXd::Zero(n), 2.0, vec1(0.5), {0.1, 0.2});
    for (double v : rep.sup_norms) CHECK(v == 0.0);
  }
}

TEST_CASE("expectation along curves") {
  auto entry = make_bernoulli();
  const Curve& curve = entry.default_curves.front();
  const std::size_t n = entry.model.space->size();
  SUBCASE("normalization along the curve") {
    const auto values = expectation_curve(entry.model, Eigen::VectorXd::Ones(n), curve, 9);
    for (double v : values) CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("identity read-off") {
    Eigen::VectorXd delta1(n);
    delta1 << 0.0, 1.0;
    const auto values = expectation_curve(entry.model, delta1, curve, 9);
    const double dt = (curve.t1 - curve.t0) / 8.0;
    for (std::size_t s = 0; s < values.size(); ++s) {
      CHECK(values[s] == doctest::Approx(curve.t0 + dt * s).epsilon(1e-12));
    }
  }
}

TEST_CASE("finite-difference helpers honour box boundaries") {
  const Domain dom = Domain::box(vec1(0.0), vec1(1.0));
  const auto cube = [](const Eigen::VectorXd& x) { return x[0] * x[0] * x[0]; };
  CHECK(fd_partial(cube, vec1(0.5), 0, dom) == doctest::Approx(0.75).epsilon(1e-8));
  // at the boundary the one-sided stencil still has second-order accuracy
  CHECK(fd_partial(cube, vec1(0.0), 0, dom) == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(fd_partial(cube, vec1(1.0), 0, dom) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("curve velocity falls back to finite differences") {
  Curve c;
  c.t0 = 0.0;
  c.t1 = 1.0;
  c.position = [](double t) { return Eigen::VectorXd::Constant(1, t * t); };
  CHECK(c.velocity_at(0.5)[0] == doctest::Approx(1.0).epsilon(1e-6));
}
