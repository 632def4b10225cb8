#include "triopt/linalg.hpp"

#include "triopt/errors.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <string>

namespace triopt {

namespace {

// In-place inverse of a lower triangular matrix, recursive blocked:
//   [L11  0 ]^-1   [ L11^-1              0     ]
//   [L21 L22]    = [-L22^-1 L21 L11^-1  L22^-1 ]
void trtri_lower(Eigen::Ref<Matrix> l) {
    const Eigen::Index n = l.rows();
    if (n <= 64) {
        Matrix inv = Matrix::Identity(n, n);
        l.triangularView<Eigen::Lower>().solveInPlace(inv);
        l = inv;
        return;
    }
    const Eigen::Index h = n / 2;
    auto l11 = l.topLeftCorner(h, h);
    auto l21 = l.bottomLeftCorner(n - h, h);
    auto l22 = l.bottomRightCorner(n - h, n - h);
    trtri_lower(l11);
    trtri_lower(l22);
    Matrix tmp = l21 * l11.triangularView<Eigen::Lower>();
    l21.noalias() = -(l22.triangularView<Eigen::Lower>() * tmp);
}

// In-place a := m^T m (lower part) for lower triangular m stored in a.
void lauum_lower(Eigen::Ref<Matrix> a) {
    const Eigen::Index n = a.rows();
    if (n <= 128) {
        Matrix m = a;
        a.setZero();
        a.selfadjointView<Eigen::Lower>().rankUpdate(m.transpose());
        return;
    }
    const Eigen::Index h = n / 2;
    auto a11 = a.topLeftCorner(h, h);
    auto a21 = a.bottomLeftCorner(n - h, h);
    auto a22 = a.bottomRightCorner(n - h, n - h);
    lauum_lower(a11);
    a11.selfadjointView<Eigen::Lower>().rankUpdate(a21.transpose());
    Matrix m21 = a21;
    a21.noalias() = a22.triangularView<Eigen::Lower>().transpose() * m21;
    lauum_lower(a22);
}

}  // namespace

SpdInverseResult spd_inverse_cholesky(const Matrix& a) {
    Eigen::LLT<Matrix> llt(a);
    const Eigen::Index n = a.rows();
    double min_pivot = n > 0 ? llt.matrixLLT().diagonal().minCoeff() : 0.0;
    if (llt.info() != Eigen::Success) {
        throw NumericalError(
            "Cholesky factorization failed, smallest pivot " + std::to_string(min_pivot));
    }
    SpdInverseResult out;
    out.min_pivot = min_pivot;
    out.inverse = llt.matrixL();
    trtri_lower(out.inverse);
    lauum_lower(out.inverse);
    out.inverse.triangularView<Eigen::StrictlyUpper>() =
        out.inverse.transpose().triangularView<Eigen::StrictlyUpper>();
    return out;
}

void symmetrize(Matrix& m) {
    m = ((m + m.transpose()) * 0.5).eval();
}

}  // namespace triopt
