#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <random>

#include "infogeo/fisher.hpp"
#include "infogeo/simplex.hpp"
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

FisherMatrix wrap(Eigen::MatrixXd G) {
  return FisherMatrix{Eigen::VectorXd::Zero(G.rows()), std::move(G)};
}

}  // namespace

TEST_CASE("bernoulli Fisher information") {
  auto entry = make_bernoulli();
  CHECK(fisher_matrix(entry.model, vec1(0.5)).G(0, 0) == doctest::Approx(4.0).epsilon(1e-10));
  for (double xi : {0.2, 0.35, 0.8}) {
    const double got = fisher_matrix(entry.model, vec1(xi)).G(0, 0);
    CHECK(got == doctest::Approx(1.0 / (xi * (1.0 - xi))).epsilon(1e-12));
  }
}

TEST_CASE("full-measure simplex Fisher matrix equals the closed form") {
  std::mt19937 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 7;
    auto entry = make_full_simplex(n);
    const Eigen::VectorXd mu = oracles::random_masses(n, gen, false);
    const Eigen::MatrixXd G = fisher_matrix(entry.model, mu).G;
    const Eigen::MatrixXd want = mu.cwiseInverse().asDiagonal();
    CHECK((G - want).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("multinomial chart Fisher matrix at the uniform point") {
  auto entry = make_multinomial(3);
  const Eigen::MatrixXd G = fisher_matrix(entry.model, vec2(1.0 / 3, 1.0 / 3)).G;
  Eigen::MatrixXd want(2, 2);
  want << 6.0, 3.0, 3.0, 6.0;
  CHECK((G - want).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("constant-in-parameter densities carry zero information") {
  ParamModel flat;
  flat.name = "flat";
  flat.space = SampleSpace::finite(2);
  flat.dim = 1;
  flat.domain = Domain::box(vec1(-1.0), vec1(1.0));
  flat.density = [](std::size_t, const Eigen::VectorXd&) { return 0.5; };
  flat.is_statistical = true;
  const FisherMatrix F = fisher_matrix(flat, vec1(0.3));
  CHECK(F.G.cwiseAbs().maxCoeff() <= 1e-18);
  CHECK(essential_decomposition(F).rank == 0);
}

TEST_CASE("Fisher matrices are PSD across the zoo") {
  std::vector<std::pair<ZooEntry, std::vector<Eigen::VectorXd>>> sweep;
  sweep.emplace_back(make_bernoulli(), std::vector<Eigen::VectorXd>{vec1(0.1), vec1(0.5), vec1(0.9)});
  sweep.emplace_back(make_multinomial(4),
                     std::vector<Eigen::VectorXd>{Eigen::VectorXd::Constant(3, 0.25)});
  sweep.emplace_back(make_gaussian_location(), std::vector<Eigen::VectorXd>{vec1(0.0), vec1(1.5)});
  {
    auto mix = make_normal_mixture();
    sweep.emplace_back(mix, mix.default_points);
  }
  for (auto& [entry, points] : sweep) {
    CAPTURE(entry.name);
    for (const auto& xi : points) {
      const FisherMatrix F = fisher_matrix(entry.model, xi);
      CHECK((F.G - F.G.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
      const EssentialDecomposition E = essential_decomposition(F);
      CHECK(E.eigenvalues.minCoeff() >= -1e-10 * (1.0 + E.eigenvalues.maxCoeff()));
    }
  }
}

TEST_CASE("essential decomposition splits singular mixtures") {
  auto entry = make_normal_mixture();
  SUBCASE("rank one with the a-direction in the kernel") {
    const FisherMatrix F = fisher_matrix(entry.model, vec2(0.5, 0.0));
    const EssentialDecomposition E = essential_decomposition(F, 1e-8);
    REQUIRE(E.rank == 1);
    CHECK(std::abs(E.kernel_basis.col(0)[0]) >= 1.0 - 1e-6);
    CHECK((F.G * E.kernel_basis).cwiseAbs().maxCoeff() <=
          1e-8 * F.G.cwiseAbs().maxCoeff() + 1e-14);
  }
  SUBCASE("isolated singularity has trivial essential space") {
    const FisherMatrix F = fisher_matrix(entry.model, vec2(0.0, 0.0));
    CHECK(essential_decomposition(F, 1e-8).rank == 0);
  }
  SUBCASE("positive definite matrices keep full rank") {
    Eigen::MatrixXd G(2, 2);
    G << 2.0, 0.3, 0.3, 1.0;
    CHECK(essential_decomposition(wrap(G), 1e-10).rank == 2);
  }
  SUBCASE("orthonormality of the split") {
    const FisherMatrix F = fisher_matrix(entry.model, vec2(0.5, 0.0));
    const EssentialDecomposition E = essential_decomposition(F, 1e-8);
    Eigen::MatrixXd all(2, 2);
    all << E.essential_basis, E.kernel_basis;
    CHECK((all.transpose() * all - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("reduced metric and pseudoinverse") {
  SUBCASE("full rank recovers the inverse") {
    Eigen::MatrixXd G(2, 2);
    G << 3.0, 0.5, 0.5, 2.0;
    const FisherMatrix F = wrap(G);
    const ReducedMetric R = reduced_metric(essential_decomposition(F), F);
    CHECK((R.pinv - G.inverse()).cwiseAbs().maxCoeff() <= 1e-8);
  }
  SUBCASE("diagonal Moore-Penrose") {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2, 2);
    G(0, 0) = 2.0;
    const FisherMatrix F = wrap(G);
    const ReducedMetric R = reduced_metric(essential_decomposition(F), F);
    CHECK(R.pinv(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(R.pinv(1, 1)) <= 1e-14);
    CHECK(std::abs(R.pinv(0, 1)) <= 1e-14);
  }
  SUBCASE("rank-one mixture closed form") {
    auto entry = make_normal_mixture();
    const FisherMatrix F = fisher_matrix(entry.model, vec2(0.5, 0.0));
    const ReducedMetric R = reduced_metric(essential_decomposition(F), F);
    CHECK(std::abs(R.pinv(0, 0)) <= 1e-12);
    CHECK(std::abs(R.pinv(0, 1)) <= 1e-12);
    CHECK(R.pinv(1, 1) == doctest::Approx(1.0 / F.G(1, 1)).epsilon(1e-10));
  }
  SUBCASE("ill-conditioned reduced metric is refused") {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2, 2);
    G(0, 0) = 1.0;
    G(1, 1) = 1e-14;
    const FisherMatrix F = wrap(G);
    CHECK_THROWS(reduced_metric(essential_decomposition(F, 1e-16), F));
  }
}

TEST_CASE("Moore-Penrose identities over random PSD matrices") {
  std::mt19937 gen(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 8;
    const int rank = trial % (d + 1);
    const Eigen::MatrixXd G = oracles::random_psd(d, rank, gen);
    const FisherMatrix F = wrap(G);
    const EssentialDecomposition E = essential_decomposition(F, 1e-8);
    CHECK(E.rank == rank);
    const ReducedMetric R = reduced_metric(E, F);
    const double scale = std::max(1.0, G.cwiseAbs().maxCoeff());
    CHECK((G * R.pinv * G - G).cwiseAbs().maxCoeff() <= 1e-8 * scale);
    CHECK((R.pinv * G * R.pinv - R.pinv).cwiseAbs().maxCoeff() <= 1e-8 * scale);
  }
}

TEST_CASE("covector pairing") {
  auto entry = make_bernoulli();
  const FisherMatrix F = fisher_matrix(entry.model, vec1(0.5));
  const ReducedMetric R = reduced_metric(essential_decomposition(F), F);
  const Eigen::VectorXd e1 = Eigen::VectorXd::Unit(1, 0);
  CHECK(covector_pairing(R, e1, e1) == doctest::Approx(0.25).epsilon(1e-10));

  SUBCASE("kernel covectors pair to zero") {
    auto mix = make_normal_mixture();
    const FisherMatrix Fm = fisher_matrix(mix.model, vec2(0.5, 0.0));
    const EssentialDecomposition Em = essential_decomposition(Fm);
    const ReducedMetric Rm = reduced_metric(Em, Fm);
    const Eigen::VectorXd k = Em.kernel_basis.col(0);
    CHECK(std::abs(covector_pairing(Rm, k, k)) <= 1e-12);
  }
  SUBCASE("bilinearity") {
    std::mt19937 gen(29);
    auto mix = make_normal_mixture();
    const FisherMatrix Fm = fisher_matrix(mix.model, vec2(0.5, 1.0));
    const ReducedMetric Rm = reduced_metric(essential_decomposition(Fm), Fm);
    const Eigen::VectorXd u = oracles::random_vector(2, gen);
    const Eigen::VectorXd v = oracles::random_vector(2, gen);
    const Eigen::VectorXd w = oracles::random_vector(2, gen);
    CHECK(covector_pairing(Rm, u, v + w) ==
          doctest::Approx(covector_pairing(Rm, u, v) + covector_pairing(Rm, u, w)).epsilon(1e-12));
  }
}

TEST_CASE("pairings are independent of the eigenbasis choice") {
  // Repeated eigenvalues leave the eigenbasis free; the pseudoinverse must
  // not care.  Compare against the explicit formula for lambda I restricted
  // to a plane plus a kernel direction.
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(3, 3);
  G(0, 0) = G(1, 1) = 2.0;  // repeated eigenvalue
  const FisherMatrix F = wrap(G);
  const ReducedMetric R = reduced_metric(essential_decomposition(F), F);
  Eigen::MatrixXd want = Eigen::MatrixXd::Zero(3, 3);
  want(0, 0) = want(1, 1) = 0.5;
  CHECK((R.pinv - want).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("numeric reduced pairing matches the simplex covariance pairing") {
  // Coordinate covectors of the chart model paired through the numeric
  // pseudoinverse reproduce the closed-form covariance pairing on P_+.
  auto entry = make_multinomial(4);
  Eigen::VectorXd chart(3);
  chart << 0.15, 0.3, 0.25;
  Eigen::VectorXd mu(4);
  mu << chart[0], chart[1], chart[2], 1.0 - chart.sum();
  const SimplexPoint p(mu, true);

  const FisherMatrix F = fisher_matrix(entry.model, chart);
  const ReducedMetric R = reduced_metric(essential_decomposition(F), F);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double numeric =
          covector_pairing(R, Eigen::VectorXd::Unit(3, i), Eigen::VectorXd::Unit(3, j));
      const double closed =
          inverse_pairing_simplex(p, Eigen::VectorXd::Unit(4, i), Eigen::VectorXd::Unit(4, j));
      CHECK(numeric == doctest::Approx(closed).epsilon(1e-8));
    }
  }
}

TEST_CASE("affine reparametrization equivariance") {
  std::mt19937 gen(31);
  auto entry = make_multinomial(3);
  const Eigen::VectorXd xi = vec2(0.3, 0.45);
  const FisherMatrix F = fisher_matrix(entry.model, xi);
  const ReducedMetric R = reduced_metric(essential_decomposition(F), F);

  Eigen::MatrixXd A(2, 2);
  A << 1.3, 0.4, -0.2, 0.9;
  const Eigen::VectorXd c = vec2(0.05, -0.02);
  const ParamModel remodel = reparametrized(entry.model, A, c);
  const Eigen::VectorXd eta = A.inverse() * (xi - c);
  REQUIRE(remodel.domain.contains(eta));

  const FisherMatrix Fr = fisher_matrix(remodel, eta);
  const double scale = Fr.G.cwiseAbs().maxCoeff();
  CHECK((Fr.G - A.transpose() * F.G * A).cwiseAbs().maxCoeff() <= 1e-8 * scale);

  const ReducedMetric Rr = reduced_metric(essential_decomposition(Fr), Fr);
  CHECK((Rr.pinv - A.inverse() * R.pinv * A.inverse().transpose()).cwiseAbs().maxCoeff() <=
        1e-8 * R.pinv.cwiseAbs().maxCoeff());

  // covector pairing of pushed-forward covectors is invariant
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd u = oracles::random_vector(2, gen);
    const Eigen::VectorXd v = oracles::random_vector(2, gen);
    const double lhs = covector_pairing(Rr, A.transpose() * u, A.transpose() * v);
    CHECK(lhs == doctest::Approx(covector_pairing(R, u, v)).epsilon(1e-8));
  }
}
