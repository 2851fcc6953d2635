#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace imputekit {

struct PcaModel {
  Eigen::VectorXd original_mean;   // d
  Eigen::MatrixXd feature_vector;  // k x d, rows are eigenvectors, largest eigenvalue first
  Eigen::VectorXd eigenvalues;     // all d, descending, clamped at 0

  std::size_t k() const noexcept { return static_cast<std::size_t>(feature_vector.rows()); }
  std::size_t d() const noexcept { return static_cast<std::size_t>(original_mean.size()); }
};

struct SymmetricEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // matching columns, unit length
  int sweeps = 0;
};

/// Cyclic Jacobi rotations on a symmetric matrix. Eigenpairs are returned in
/// descending eigenvalue order and each eigenvector's largest-magnitude entry
/// is made positive.
SymmetricEigen jacobi_eigen(const Eigen::Ref<const Eigen::MatrixXd>& symmetric, int max_sweeps = 100);

/// Sample covariance with divisor n - 1.
Eigen::MatrixXd sample_covariance(const Eigen::Ref<const Eigen::MatrixXd>& data);

/// Mean-centres, forms the sample covariance, eigendecomposes and keeps the
/// top-k eigenvectors. Throws DegenerateData (n < 2), BadConfig (k outside
/// [1, d]).
PcaModel pca_fit(const Eigen::Ref<const Eigen::MatrixXd>& data, std::size_t k);

/// feature_vector * (x - original_mean). Throws LengthMismatch.
Eigen::VectorXd pca_compress(const PcaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
/// feature_vector^T * z + original_mean. Throws LengthMismatch.
Eigen::VectorXd pca_reconstruct(const PcaModel& model, const Eigen::Ref<const Eigen::VectorXd>& z);

/// Row-wise compression: n x d -> n x k.
Eigen::MatrixXd pca_compress_rows(const PcaModel& model, const Eigen::Ref<const Eigen::MatrixXd>& data);

/// eigenvalue_i / sum * 100 for all d components. Throws AllZeroVariance.
Eigen::VectorXd component_composition(const PcaModel& model);

}  // namespace imputekit
