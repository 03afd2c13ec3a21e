#include "infogeo/fisher.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace infogeo {

FisherMatrix fisher_matrix(const ParamModel& model, const Eigen::VectorXd& xi) {
  const DensityMeasure mu = density_at(model, xi);
  const Eigen::MatrixXd scores = score_at(model, xi);
  const auto& w = model.space->base_weights();
  const int d = model.dim;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t p = 0; p < model.space->size(); ++p) {
    const Eigen::Index i = static_cast<Eigen::Index>(p);
    const double mass = mu.density[i] * w[p];
    if (mass == 0.0) continue;
    const auto row = scores.row(i);
    if (!row.allFinite()) throw std::domain_error("score not square-integrable");
    G.noalias() += mass * (row.transpose() * row);
  }
  if (!G.allFinite()) throw std::domain_error("score not square-integrable");
  G = 0.5 * (G + G.transpose()).eval();
  return FisherMatrix{xi, std::move(G)};
}

EssentialDecomposition essential_decomposition(const FisherMatrix& F, double rel_threshold) {
  const int d = static_cast<int>(F.G.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(F.G);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");

  EssentialDecomposition E;
  E.rel_threshold = rel_threshold;
  E.eigenvalues.resize(d);
  E.eigenvectors.resize(d, d);
  for (int i = 0; i < d; ++i) {  // Eigen returns ascending order
    E.eigenvalues[i] = solver.eigenvalues()[d - 1 - i];
    E.eigenvectors.col(i) = solver.eigenvectors().col(d - 1 - i);
  }

  const double lambda_max = E.eigenvalues[0];
  int rank = 0;
  if (lambda_max > defaults::kRankAbsFloor) {
    while (rank < d && E.eigenvalues[rank] > rel_threshold * lambda_max) ++rank;
  }
  E.rank = rank;
  E.essential_basis = E.eigenvectors.leftCols(rank);
  E.kernel_basis = E.eigenvectors.rightCols(d - rank);
  return E;
}

ReducedMetric reduced_metric(const EssentialDecomposition& E, const FisherMatrix& F) {
  const int d = static_cast<int>(F.G.rows());
  ReducedMetric R;
  if (E.rank == 0) {
    R.reduced.resize(0, 0);
    R.reduced_inv.resize(0, 0);
    R.pinv = Eigen::MatrixXd::Zero(d, d);
    return R;
  }
  const Eigen::MatrixXd& B = E.essential_basis;
  R.reduced = B.transpose() * F.G * B;
  R.reduced = 0.5 * (R.reduced + R.reduced.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(R.reduced);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > defaults::kReducedCondLimit) {
    throw std::runtime_error("threshold too small: reduced metric numerically singular");
  }
  R.reduced_inv = solver.eigenvectors() *
                  solver.eigenvalues().cwiseInverse().asDiagonal() *
                  solver.eigenvectors().transpose();
  R.pinv = B * R.reduced_inv * B.transpose();
  return R;
}

double covector_pairing(const ReducedMetric& R, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& v) {
  if (u.size() != R.pinv.rows() || v.size() != R.pinv.rows()) {
    throw std::invalid_argument("covector length mismatch");
  }
  if (!u.allFinite() || !v.allFinite()) throw std::invalid_argument("covectors must be finite");
  return u.dot(R.pinv * v);
}

}  // namespace infogeo
