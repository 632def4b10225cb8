#include "triopt/oracle.hpp"

#include "triopt/errors.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace triopt {

Matrix dense_inverse(const Matrix& m) {
    const Eigen::Index n = m.rows();
    if (m.cols() != n) {
        throw ShapeError("dense_inverse: matrix must be square");
    }
    const double scale = std::max(1.0, m.norm());
    if ((m - m.transpose()).norm() > 1e-10 * scale) {
        throw NumericalError("dense_inverse: matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("dense_inverse: eigendecomposition failed");
    }
    const double min_eig = eig.eigenvalues().minCoeff();
    if (min_eig <= 0.0) {
        throw NumericalError("dense_inverse: matrix is not positive definite, smallest eigenvalue " +
                             std::to_string(min_eig));
    }
    const Matrix inv = eig.eigenvectors() *
                       eig.eigenvalues().cwiseInverse().asDiagonal() *
                       eig.eigenvectors().transpose();
    const double resid = (m * inv - Matrix::Identity(n, n)).norm() / std::sqrt(static_cast<double>(n));
    if (resid >= 1e-8) {
        throw NumericalError("dense_inverse: residual " + std::to_string(resid) +
                             " exceeds tolerance");
    }
    return inv;
}

Matrix population_covariance(const WeightedDag& b_star, const Vector& omega) {
    const int d = b_star.dim;
    if (omega.size() != d) {
        throw ShapeError("population_covariance: omega length does not match dimension");
    }
    if ((omega.array() <= 0.0).any()) {
        throw InvalidScaleError("population_covariance: noise variances must be positive");
    }
    // rows of A = (I - B^T)^-1 by substitution in topological order:
    // x_v = eps_v + sum_j B(j,v) x_j  =>  A(v,.) = e_v + sum_j B(j,v) A(j,.)
    Matrix a = Matrix::Zero(d, d);
    for (int v : b_star.topo_order) {
        a(v, v) = 1.0;
        for (int j = 0; j < d; ++j) {
            const double w = b_star.weights(j, v);
            if (w != 0.0) a.row(v) += w * a.row(j);
        }
    }
    return a * omega.asDiagonal() * a.transpose();
}

PopulationModel make_population_model(const WeightedDag& b_star, const Vector& omega) {
    PopulationModel model;
    model.b_star = b_star;
    model.omega = omega;
    model.sigma = population_covariance(b_star, omega);
    return model;
}

namespace {

Matrix recover_from_sigma(const Matrix& sigma, const std::vector<int>& perm) {
    const int d = static_cast<int>(perm.size());
    Matrix sigma_pi(d, d);
    for (int p = 0; p < d; ++p) {
        for (int q = 0; q < d; ++q) sigma_pi(p, q) = sigma(perm[p], perm[q]);
    }
    Matrix b_hat = Matrix::Zero(d, d);
    for (int q = 1; q < d; ++q) {
        const Matrix block = sigma_pi.topLeftCorner(q, q);
        const Vector rhs = sigma_pi.block(0, q, q, 1);
        Matrix block_inv;
        try {
            block_inv = dense_inverse(block);  // PD since sigma is PD
        } catch (const NumericalError& e) {
            throw RankDeficiencyError(
                "population_recover: predecessor block singular for column " +
                    std::to_string(q) + " (" + e.what() + ")",
                q);
        }
        const Vector w = block_inv * rhs;
        for (int p = 0; p < q; ++p) b_hat(perm[p], perm[q]) = w(p);
    }
    return b_hat;
}

}  // namespace

Matrix population_recover(const PopulationModel& model) {
    return recover_from_sigma(model.sigma, model.b_star.topo_order);
}

Matrix population_recover(const PopulationModel& model, const CausalOrder& order) {
    if (static_cast<int>(order.perm.size()) != model.b_star.dim) {
        throw ShapeError("population_recover: order length does not match dimension");
    }
    return recover_from_sigma(model.sigma, order.perm);
}

}  // namespace triopt
