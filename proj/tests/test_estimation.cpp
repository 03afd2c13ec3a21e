#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "infogeo/estimation.hpp"
#include "infogeo/fisher.hpp"
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

const Estimator& suite_estimator(const ZooEntry& entry, const std::string& name) {
  for (const auto& [est, feat] : entry.estimator_suite) {
    if (est.name == name) return est;
  }
  throw std::runtime_error("no estimator " + name);
}

// Models x points exercised by the cross-cutting invariants.
std::vector<std::pair<ZooEntry, std::vector<Eigen::VectorXd>>> stats_sweep() {
  std::vector<std::pair<ZooEntry, std::vector<Eigen::VectorXd>>> sweep;
  sweep.emplace_back(make_bernoulli(), std::vector<Eigen::VectorXd>{vec1(0.3), vec1(0.5), vec1(0.7)});
  sweep.emplace_back(make_multinomial(3),
                     std::vector<Eigen::VectorXd>{vec2(1.0 / 3, 1.0 / 3), vec2(0.25, 0.3)});
  {
    auto mix = make_normal_mixture();
    sweep.emplace_back(mix, mix.default_points);
  }
  sweep.emplace_back(make_product(make_bernoulli(), 4),
                     std::vector<Eigen::VectorXd>{vec1(0.3), vec1(0.6)});
  return sweep;
}

}  // namespace

TEST_CASE("phi_hat on bernoulli") {
  auto entry = make_bernoulli();
  const FeatureMap id = FeatureMap::identity(1);
  for (double xi : {0.2, 0.5, 0.8}) {
    CHECK(phi_hat(entry.model, suite_estimator(entry, "empirical"), id, vec1(xi))[0] ==
          doctest::Approx(xi).epsilon(1e-14));
    CHECK(phi_hat(entry.model, suite_estimator(entry, "scaled-0.8"), id, vec1(xi))[0] ==
          doctest::Approx(0.8 * xi).epsilon(1e-14));
  }
}

TEST_CASE("phi_hat on the single-draw multinomial is unbiased") {
  auto entry = make_multinomial(3);
  const Eigen::VectorXd mu = vec2(0.2, 0.5);
  const Eigen::VectorXd got =
      phi_hat(entry.model, suite_estimator(entry, "empirical"), FeatureMap::identity(2), mu);
  CHECK((got - mu).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("d_phi_hat on bernoulli") {
  auto entry = make_bernoulli();
  const FeatureMap id = FeatureMap::identity(1);
  SUBCASE("empirical estimator has unit derivative") {
    for (double xi : {0.3, 0.5, 0.75}) {
      CHECK(d_phi_hat(entry.model, suite_estimator(entry, "empirical"), id, vec1(xi))(0, 0) ==
            doctest::Approx(1.0).epsilon(1e-10));
    }
  }
  SUBCASE("constant estimators are annihilated by score centering") {
    CHECK(std::abs(d_phi_hat(entry.model, suite_estimator(entry, "constant"), id, vec1(0.4))(0, 0)) <=
          1e-12);
  }
}

TEST_CASE("visibility: the degenerate mixture direction never shows up") {
  auto entry = make_normal_mixture();
  for (const auto& [est, feat] : entry.estimator_suite) {
    const Eigen::MatrixXd J = d_phi_hat(entry.model, est, feat, vec2(0.4, 0.0));
    CHECK(J.col(0).cwiseAbs().maxCoeff() == 0.0);  // analytic a-score is identically zero
  }
}

TEST_CASE("estimator stats against two-point enumeration") {
  auto entry = make_bernoulli();
  const FeatureMap id = FeatureMap::identity(1);
  SUBCASE("empirical at 0.3") {
    const EstimatorStats st =
        estimator_stats(entry.model, suite_estimator(entry, "empirical"), id, vec1(0.3));
    CHECK(std::abs(st.bias[0]) <= 1e-14);
    CHECK(st.V(0, 0) == doctest::Approx(0.21).epsilon(1e-12));
    CHECK(st.MSE(0, 0) == doctest::Approx(0.21).epsilon(1e-12));
  }
  SUBCASE("scaled estimator trades variance for bias") {
    const EstimatorStats st =
        estimator_stats(entry.model, suite_estimator(entry, "scaled-0.8"), id, vec1(0.5));
    CHECK(st.bias[0] == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(st.V(0, 0) == doctest::Approx(0.16).epsilon(1e-12));
    CHECK(st.MSE(0, 0) == doctest::Approx(0.17).epsilon(1e-12));
    CHECK(st.msevb_residual <= 1e-14);
  }
  SUBCASE("degenerate constant estimator") {
    const EstimatorStats st =
        estimator_stats(entry.model, suite_estimator(entry, "constant"), id, vec1(0.3));
    CHECK(st.V.cwiseAbs().maxCoeff() <= 1e-16);
    CHECK((st.MSE - st.bias * st.bias.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("enumeration oracle agrees on a random finite cell") {
  auto entry = make_multinomial(3);
  const Eigen::VectorXd mu = vec2(0.35, 0.4);
  const Estimator& est = suite_estimator(entry, "scaled-1.2");
  const EstimatorStats st = estimator_stats(entry.model, est, FeatureMap::identity(2), mu);
  const oracles::EnumStats want =
      oracles::enum_stats({0.35, 0.4, 0.25}, est.values, mu);
  CHECK((st.phi_hat - want.mean).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((st.V - want.cov).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((st.MSE - want.mse).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("MSE identity and PSD variance across the sweep") {
  for (auto& [entry, points] : stats_sweep()) {
    CAPTURE(entry.name);
    for (const auto& xi : points) {
      for (const auto& [est, feat] : entry.estimator_suite) {
        const EstimatorStats st = estimator_stats(entry.model, est, feat, xi);
        CHECK(st.msevb_residual <= 1e-8);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(st.V);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * (1.0 + st.V.trace()));
      }
    }
  }
}

TEST_CASE("differentiation under the integral drives d_phi_hat") {
  for (auto& [entry, points] : stats_sweep()) {
    CAPTURE(entry.name);
    for (const auto& xi : points) {
      for (const auto& [est, feat] : entry.estimator_suite) {
        const Eigen::MatrixXd J = d_phi_hat(entry.model, est, feat, xi);
        const Eigen::MatrixXd J_fd = fd_jacobian(
            [&](const Eigen::VectorXd& p) { return phi_hat(entry.model, est, feat, p); }, xi,
            entry.model.domain);
        const double rel = (J - J_fd).cwiseAbs().maxCoeff() /
                           std::max(1.0, J.cwiseAbs().maxCoeff());
        CHECK(rel <= 1e-5);
      }
    }
  }
}

TEST_CASE("pre-gradient of expectation functionals") {
  auto entry = make_bernoulli();
  const std::size_t n = entry.model.space->size();
  SUBCASE("bounded functions") {
    Eigen::VectorXd f(n);
    f << 0.2, -1.3;
    const auto report = pre_gradient_check(entry.model, f, vec1(0.4), {vec1(1.0), vec1(-0.5)});
    for (const auto& e : report) CHECK(e.residual <= 1e-6);
  }
  SUBCASE("constants are annihilated") {
    const auto report =
        pre_gradient_check(entry.model, Eigen::VectorXd::Constant(n, 7.0), vec1(0.4), {vec1(1.0)});
    CHECK(std::abs(report[0].lhs) <= 1e-9);
    CHECK(std::abs(report[0].rhs) <= 1e-12);
  }
  SUBCASE("indicator recovers the identity derivative") {
    Eigen::VectorXd delta1(n);
    delta1 << 0.0, 1.0;
    const auto report = pre_gradient_check(entry.model, delta1, vec1(0.3), {vec1(1.0)});
    CHECK(report[0].lhs == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(report[0].rhs == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("estimators may leave the domain but never carry non-finite values") {
  auto entry = make_bernoulli();
  CHECK_FALSE(suite_estimator(entry, "scaled-1.2").in_domain(entry.model.domain));
  CHECK(suite_estimator(entry, "empirical").in_domain(entry.model.domain));
  Eigen::MatrixXd bad(2, 1);
  bad << 0.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(Estimator("bad", bad));
  // stats remain well defined for out-of-domain tables
  CHECK_NOTHROW(
      estimator_stats(entry.model, suite_estimator(entry, "scaled-1.2"), FeatureMap::identity(1), vec1(0.5)));
}

TEST_CASE("affine feature maps") {
  auto entry = make_multinomial(3);
  Eigen::MatrixXd A(1, 2);
  A << 1.0, 1.0;
  const FeatureMap total_mass = FeatureMap::affine(A, Eigen::VectorXd::Zero(1));
  const Eigen::VectorXd mu = vec2(0.3, 0.4);
  const Eigen::VectorXd ph =
      phi_hat(entry.model, suite_estimator(entry, "empirical"), total_mass, mu);
  CHECK(ph[0] == doctest::Approx(0.7).epsilon(1e-14));  // P(not last outcome)
  CHECK(total_mass.jacobian(mu).isApprox(A));
}
