#pragma once

#include "triopt/types.hpp"

namespace triopt {

struct SpdInverseResult {
    Matrix inverse;
    double min_pivot = 0.0;  // smallest diagonal entry of the Cholesky factor
};

/// Inverse of a symmetric positive definite matrix via Cholesky
/// factorization (LL^T), with the triangular inversion and the product
/// L^-T L^-1 done blockwise. Throws NumericalError with the smallest pivot
/// when the factorization fails.
SpdInverseResult spd_inverse_cholesky(const Matrix& a);

/// (m + m^T) / 2 in place.
void symmetrize(Matrix& m);

}  // namespace triopt
