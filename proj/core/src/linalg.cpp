#include "dkf/linalg.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "dkf/errors.hpp"

namespace dkf {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix invert_spd(const Matrix& m, std::string_view context, JitterPolicy jitter) {
  if (m.rows() != m.cols()) {
    throw NumericalError(std::string(context) + ": matrix is not square");
  }
  Matrix sym = symmetrize(m);
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() != Eigen::Success && jitter == JitterPolicy::kRetryOnce) {
    sym.diagonal().array() += 1e-9 * sym.trace() / static_cast<double>(sym.rows());
    llt.compute(sym);
  }
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string(context) + ": matrix is not positive definite");
  }
  return symmetrize(llt.solve(Matrix::Identity(sym.rows(), sym.cols())));
}

bool is_spd(const Matrix& m, double* min_eigenvalue, double sym_tol) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > sym_tol * scale) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (min_eigenvalue) *min_eigenvalue = lo;
  return lo > 0.0;
}

int observability_rank(const Matrix& A, const Matrix& H, double rel_tol) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw ConfigError("observability_rank: A must be square");
  if (H.rows() == 0) return 0;
  if (H.cols() != n) throw ConfigError("observability_rank: H column count must match A");

  Matrix obs(H.rows() * n, n);
  Matrix block = H;
  for (Eigen::Index k = 0; k < n; ++k) {
    obs.middleRows(k * H.rows(), H.rows()) = block;
    block = block * A;
  }
  Eigen::JacobiSVD<Matrix> svd(obs);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double cutoff = rel_tol * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return rank;
}

bool is_observable_pair(const Matrix& A, const Matrix& H, double rel_tol) {
  return observability_rank(A, H, rel_tol) == A.rows();
}

}  // namespace dkf
