#pragma once

#include <string_view>

#include "dkf/types.hpp"

namespace dkf {

Matrix symmetrize(const Matrix& m);

enum class JitterPolicy {
  kNone,
  kRetryOnce,  // one diagonal jitter of 1e-9 * trace/n before giving up
};

// Inverse of a symmetric positive definite matrix via Cholesky. The input is
// symmetrized first and the result re-symmetrized. Throws NumericalError with
// `context` in the message when the factorization fails.
Matrix invert_spd(const Matrix& m, std::string_view context,
                  JitterPolicy jitter = JitterPolicy::kRetryOnce);

// Symmetric up to sym_tol (relative) and positive definite. Optionally
// reports the smallest eigenvalue of the symmetrized matrix.
bool is_spd(const Matrix& m, double* min_eigenvalue = nullptr, double sym_tol = 1e-9);

// Rank of [H; HA; ...; HA^{n-1}], counting singular values above
// rel_tol * sigma_max.
int observability_rank(const Matrix& A, const Matrix& H, double rel_tol = 1e-9);

bool is_observable_pair(const Matrix& A, const Matrix& H, double rel_tol = 1e-9);

}  // namespace dkf
