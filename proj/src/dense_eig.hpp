#pragma once

#include <Eigen/Dense>

namespace gks::detail {

/// General complex eigendecomposition through LAPACK zgeev. Returns false if
/// the QR iteration failed. `vectors`, when given, receives unit right
/// eigenvectors column by column.
bool dense_eig(const Eigen::MatrixXcd& A, Eigen::VectorXcd& values, Eigen::MatrixXcd* vectors = nullptr);

}  // namespace gks::detail
