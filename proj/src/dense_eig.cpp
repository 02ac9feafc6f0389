#include "dense_eig.hpp"

#include <lapacke.h>

namespace gks::detail {

bool dense_eig(const Eigen::MatrixXcd& A, Eigen::VectorXcd& values, Eigen::MatrixXcd* vectors) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  Eigen::MatrixXcd work = A;  // column-major, overwritten
  values.resize(n);
  Eigen::MatrixXcd vr;
  if (vectors) vr.resize(n, n);
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', n, reinterpret_cast<lapack_complex_double*>(work.data()), n,
      reinterpret_cast<lapack_complex_double*>(values.data()), nullptr, 1,
      vectors ? reinterpret_cast<lapack_complex_double*>(vr.data()) : nullptr, vectors ? n : 1);
  if (info != 0) return false;
  if (vectors) *vectors = std::move(vr);
  return true;
}

}  // namespace gks::detail
