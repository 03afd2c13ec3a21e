#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "infogeo/simplex.hpp"
#include "oracles.hpp"

using namespace infogeo;

TEST_CASE("simplex point invariants") {
  Eigen::VectorXd bad(2);
  bad << 0.5, 0.0;
  CHECK_THROWS(SimplexPoint(bad));
  Eigen::VectorXd not_prob(2);
  not_prob << 0.5, 0.6;
  CHECK_THROWS(SimplexPoint(not_prob, true));
  CHECK_NOTHROW(SimplexPoint(not_prob, false));
}

TEST_CASE("full cone Fisher metric is diag(1/mu)") {
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
  CHECK(fisher_metric_full(SimplexPoint(ones)).isApprox(Eigen::MatrixXd::Identity(3, 3)));

  Eigen::VectorXd mu(3);
  mu << 0.5, 0.25, 0.25;
  Eigen::MatrixXd G = fisher_metric_full(SimplexPoint(mu));
  CHECK(G(0, 0) == doctest::Approx(2.0));
  CHECK(G(1, 1) == doctest::Approx(4.0));
  CHECK(G(2, 2) == doctest::Approx(4.0));
  CHECK(G(0, 1) == 0.0);
}

TEST_CASE("metric times inverse pairing is the identity on covectors") {
  std::mt19937 gen(5);
  for (int n = 2; n <= 8; ++n) {
    SimplexPoint p(oracles::random_masses(n, gen, false));
    const Eigen::MatrixXd G = fisher_metric_full(p);
    // inverse_pairing_full(e_i, e_j) realizes diag(mu); G diag(mu) = I exactly.
    Eigen::MatrixXd Ginv(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Ginv(i, j) = inverse_pairing_full(p, Eigen::VectorXd::Unit(n, i), Eigen::VectorXd::Unit(n, j));
      }
    }
    CHECK((G * Ginv).isApprox(Eigen::MatrixXd::Identity(n, n), 1e-14));
  }
}

TEST_CASE("inverse pairing on the full cone") {
  std::mt19937 gen(7);
  SUBCASE("constants on a probability point") {
    Eigen::VectorXd mu(3);
    mu << 0.2, 0.3, 0.5;
    SimplexPoint p(mu, true);
    CHECK(inverse_pairing_full(p, Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(3)) ==
          doctest::Approx(1.0));
  }
  SUBCASE("Dirac functions pick out masses") {
    SimplexPoint p(oracles::random_masses(4, gen, false));
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const double got =
            inverse_pairing_full(p, Eigen::VectorXd::Unit(4, i), Eigen::VectorXd::Unit(4, j));
        CHECK(got == doctest::Approx(i == j ? p.mu[i] : 0.0));
      }
    }
  }
  SUBCASE("random vectors against the direct sum") {
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 2 + trial % 7;
      SimplexPoint p(oracles::random_masses(n, gen, false));
      const Eigen::VectorXd f = oracles::random_vector(n, gen);
      const Eigen::VectorXd g = oracles::random_vector(n, gen);
      double direct = 0.0;
      for (int i = 0; i < n; ++i) direct += f[i] * g[i] * p.mu[i];
      CHECK(inverse_pairing_full(p, f, g) == doctest::Approx(direct).epsilon(1e-14));
    }
  }
}

TEST_CASE("covariance pairing on the probability simplex") {
  std::mt19937 gen(9);
  SUBCASE("constants vanish") {
    SimplexPoint p(oracles::random_masses(5, gen, true), true);
    const Eigen::VectorXd g = oracles::random_vector(5, gen);
    CHECK(std::abs(inverse_pairing_simplex(p, Eigen::VectorXd::Constant(5, 3.3), g)) < 1e-14);
  }
  SUBCASE("two-point Bernoulli variance") {
    Eigen::VectorXd mu(2);
    mu << 0.5, 0.5;
    SimplexPoint p(mu, true);
    const Eigen::VectorXd d1 = Eigen::VectorXd::Unit(2, 0);
    CHECK(inverse_pairing_simplex(p, d1, d1) == doctest::Approx(0.25));
  }
  SUBCASE("Dirac pairs give the multinomial covariance") {
    SimplexPoint p(oracles::random_masses(6, gen, true), true);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        const double got =
            inverse_pairing_simplex(p, Eigen::VectorXd::Unit(6, i), Eigen::VectorXd::Unit(6, j));
        const double want = (i == j ? p.mu[i] : 0.0) - p.mu[i] * p.mu[j];
        CHECK(got == doctest::Approx(want).epsilon(1e-13));
      }
    }
  }
  SUBCASE("centering projection identity") {
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 2 + trial % 7;
      SimplexPoint p(oracles::random_masses(n, gen, true), true);
      const Eigen::VectorXd f = oracles::random_vector(n, gen);
      const Eigen::VectorXd g = oracles::random_vector(n, gen);
      const double fbar = (f.array() * p.mu.array()).sum();
      const double gbar = (g.array() * p.mu.array()).sum();
      const double via_full = inverse_pairing_full(
          p, (f.array() - fbar).matrix(), (g.array() - gbar).matrix());
      CHECK(inverse_pairing_simplex(p, f, g) == doctest::Approx(via_full).epsilon(1e-14));
    }
  }
}

TEST_CASE("Fisher gradients on the cone and the simplex") {
  std::mt19937 gen(13);
  SUBCASE("linear mass function has gradient mu") {
    SimplexPoint p(oracles::random_masses(4, gen, false));
    CHECK(fisher_gradient_full(p, Eigen::VectorXd::Ones(4)).isApprox(p.mu));
    CHECK(fisher_gradient_full(p, Eigen::VectorXd::Zero(4)).isZero());
  }
  SUBCASE("constants are flat on the simplex") {
    SimplexPoint p(oracles::random_masses(5, gen, true), true);
    CHECK(fisher_gradient_simplex(p, Eigen::VectorXd::Constant(5, 2.5)).norm() < 1e-14);
  }
  for (int n = 2; n <= 8; ++n) {
    CAPTURE(n);
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::VectorXd partials = oracles::random_vector(n, gen);
      const Eigen::VectorXd X = oracles::random_vector(n, gen);

      // duality on the cone: g(grad f, X) = df(X)
      SimplexPoint p(oracles::random_masses(n, gen, false));
      const Eigen::MatrixXd G = fisher_metric_full(p);
      const Eigen::VectorXd grad = fisher_gradient_full(p, partials);
      CHECK(grad.dot(G * X) == doctest::Approx(partials.dot(X)).epsilon(1e-12));

      // tangency and orthogonality on the simplex
      SimplexPoint q(oracles::random_masses(n, gen, true), true);
      const Eigen::VectorXd sgrad = fisher_gradient_simplex(q, partials);
      CHECK(std::abs(sgrad.sum()) < 1e-14);
      const Eigen::VectorXd grad_w = q.mu;  // gradient of total mass
      const Eigen::MatrixXd Gq = fisher_metric_full(q);
      CHECK(std::abs(sgrad.dot(Gq * grad_w)) < 1e-12);
    }
  }
}
