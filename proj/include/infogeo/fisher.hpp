#pragma once

#include <Eigen/Core>

#include "infogeo/param_model.hpp"

namespace infogeo {

/// Fisher information matrix at a parameter: the L2(p(xi)) Gram matrix of
/// the coordinate scores, symmetrized.
struct FisherMatrix {
  Eigen::VectorXd xi;
  Eigen::MatrixXd G;
};

/// Spectral split of a Fisher matrix into the essential tangent directions
/// (eigenvalues above threshold) and the kernel.  The essential basis spans a
/// concrete complement of the kernel, realizing the quotient tangent space.
struct EssentialDecomposition {
  Eigen::VectorXd eigenvalues;     // descending, >= 0 up to tolerance
  Eigen::MatrixXd eigenvectors;    // orthonormal columns matching eigenvalues
  int rank = 0;
  Eigen::MatrixXd essential_basis;  // d x rank
  Eigen::MatrixXd kernel_basis;     // d x (d - rank)
  double rel_threshold = defaults::kRankRelThreshold;
};

/// Fisher metric restricted to the essential basis, its inverse, and the
/// induced d x d pseudoinverse B Ghat^-1 B^T.  Sharing the rank decision with
/// the essential decomposition makes the pseudoinverse and the inverse of the
/// reduced metric the same object by construction.
struct ReducedMetric {
  Eigen::MatrixXd reduced;      // rank x rank, positive definite
  Eigen::MatrixXd reduced_inv;  // rank x rank
  Eigen::MatrixXd pinv;         // d x d
};

FisherMatrix fisher_matrix(const ParamModel& model, const Eigen::VectorXd& xi);

EssentialDecomposition essential_decomposition(const FisherMatrix& F,
                                               double rel_threshold = defaults::kRankRelThreshold);

ReducedMetric reduced_metric(const EssentialDecomposition& E, const FisherMatrix& F);

/// u^T pinv v; the inverse-metric pairing of covectors, zero on kernel
/// covectors.
double covector_pairing(const ReducedMetric& R, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& v);

}  // namespace infogeo
