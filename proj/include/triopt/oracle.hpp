#pragma once

#include "triopt/types.hpp"

namespace triopt {

/// Analytic linear-SEM model: ground-truth weights, diagonal noise variances
/// and the exact covariance Sigma = A Omega A^T with A = (I - B^T)^-1.
struct PopulationModel {
    WeightedDag b_star;
    Vector omega;  // noise variances, all positive
    Matrix sigma;
};

/// Direct dense inverse via symmetric eigendecomposition; deliberately a
/// different algorithm from the Cholesky-plus-downdate path it checks.
/// Throws NumericalError for non-symmetric or non-PD input, or when the
/// inverse residual ||M M^-1 - I||_F / sqrt(n) reaches 1e-8.
Matrix dense_inverse(const Matrix& m);

/// Exact covariance by forward substitution along the topological order;
/// no sampling, no matrix inversion.
Matrix population_covariance(const WeightedDag& b_star, const Vector& omega);

PopulationModel make_population_model(const WeightedDag& b_star, const Vector& omega);

/// Per-column population OLS on the analytic covariance, using the model's
/// own topological order; equals the true weights exactly (up to roundoff).
Matrix population_recover(const PopulationModel& model);

/// Same, but under an arbitrary (possibly wrong) ordering.
Matrix population_recover(const PopulationModel& model, const CausalOrder& order);

}  // namespace triopt
