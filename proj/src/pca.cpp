#include "imputekit/pca.hpp"

#include "imputekit/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace imputekit {

SymmetricEigen jacobi_eigen(const Eigen::Ref<const Eigen::MatrixXd>& symmetric, int max_sweeps) {
  const Eigen::Index d = symmetric.rows();
  if (symmetric.cols() != d) throw Error(ErrorCode::ShapeMismatch, "jacobi_eigen needs a square matrix");
  Eigen::MatrixXd a = 0.5 * (symmetric + symmetric.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(d, d);
  const double scale = a.squaredNorm();

  int sweeps = 0;
  for (; sweeps < max_sweeps; ++sweeps) {
    const double off = a.squaredNorm() - a.diagonal().squaredNorm();
    if (off <= 1e-30 * scale || off == 0.0) break;
    for (Eigen::Index p = 0; p < d - 1; ++p) {
      for (Eigen::Index q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // A <- J^T A J with J the (p,q) rotation
        for (Eigen::Index k = 0; k < d; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < d; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) > a(j, j); });

  SymmetricEigen out{Eigen::VectorXd(d), Eigen::MatrixXd(d, d), sweeps};
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values(k) = a(src, src);
    Eigen::VectorXd vec = v.col(src);
    Eigen::Index peak = 0;
    vec.cwiseAbs().maxCoeff(&peak);
    if (vec(peak) < 0.0) vec = -vec;
    out.vectors.col(k) = vec;
  }
  return out;
}

Eigen::MatrixXd sample_covariance(const Eigen::Ref<const Eigen::MatrixXd>& data) {
  if (data.rows() < 2) throw Error(ErrorCode::DegenerateData, "covariance needs at least 2 rows");
  const Eigen::MatrixXd centred = data.rowwise() - data.colwise().mean();
  return (centred.transpose() * centred) / static_cast<double>(data.rows() - 1);
}

PcaModel pca_fit(const Eigen::Ref<const Eigen::MatrixXd>& data, std::size_t k) {
  if (data.rows() < 2) throw Error(ErrorCode::DegenerateData, fmt::format("PCA needs n >= 2 rows, got {}", data.rows()));
  const auto d = static_cast<std::size_t>(data.cols());
  if (k < 1 || k > d) throw Error(ErrorCode::BadConfig, fmt::format("PCA k = {} outside [1, {}]", k, d));

  const SymmetricEigen eig = jacobi_eigen(sample_covariance(data));
  PcaModel model;
  model.original_mean = data.colwise().mean().transpose();
  model.eigenvalues = eig.values.cwiseMax(0.0);
  model.feature_vector = eig.vectors.leftCols(static_cast<Eigen::Index>(k)).transpose();
  return model;
}

Eigen::VectorXd pca_compress(const PcaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (static_cast<std::size_t>(x.size()) != model.d())
    throw Error(ErrorCode::LengthMismatch, fmt::format("vector length {}, PCA expects {}", x.size(), model.d()));
  return model.feature_vector * (x - model.original_mean);
}

Eigen::VectorXd pca_reconstruct(const PcaModel& model, const Eigen::Ref<const Eigen::VectorXd>& z) {
  if (static_cast<std::size_t>(z.size()) != model.k())
    throw Error(ErrorCode::LengthMismatch, fmt::format("code length {}, PCA keeps {}", z.size(), model.k()));
  return model.feature_vector.transpose() * z + model.original_mean;
}

Eigen::MatrixXd pca_compress_rows(const PcaModel& model, const Eigen::Ref<const Eigen::MatrixXd>& data) {
  if (static_cast<std::size_t>(data.cols()) != model.d())
    throw Error(ErrorCode::LengthMismatch, fmt::format("data width {}, PCA expects {}", data.cols(), model.d()));
  return (data.rowwise() - model.original_mean.transpose()) * model.feature_vector.transpose();
}

Eigen::VectorXd component_composition(const PcaModel& model) {
  const double total = model.eigenvalues.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::AllZeroVariance, "all eigenvalues are zero");
  return model.eigenvalues / total * 100.0;
}

}  // namespace imputekit
