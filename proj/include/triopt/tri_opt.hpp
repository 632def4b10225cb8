#pragma once

#include "triopt/types.hpp"

#include <vector>

namespace triopt {

struct OptConfig {
    double lambda = 0.001;     // l1 weight
    double epsilon = 1e-4;     // Charbonnier smoothing, must stay positive
    int max_iter = 100;
    double w_threshold = 0.3;
    double tol = 1e-8;         // relative objective decrease for convergence
    // step control
    int lbfgs_memory = 8;
    double armijo_c = 1e-4;
    double backtrack_factor = 0.5;
};

struct GramSummary {
    Matrix gram;       // (1/n) X^T X
    double trace_g = 0.0;
};

struct OptimizeInfo {
    int iterations = 0;
    double objective_value = 0.0;
    std::vector<double> objective_trace;  // value after each accepted step
};

/// Column i of the result is the column of x holding the variable at
/// position i of the order (ancestors first).
DataMatrix permute_data(const DataMatrix& x, const CausalOrder& order);

GramSummary gram(const DataMatrix& x);

/// Penalized loss 1/2 Tr(W^T G W) - Tr(G W) + 1/2 Tr(G) + lambda |W|_{1,eps}
/// with the Charbonnier sum over strictly-upper-triangular entries only.
/// W must be exactly zero on the diagonal and below.
double objective(const Matrix& w, const GramSummary& gs, const OptConfig& cfg);

/// Analytic gradient G(W - I) + lambda W / sqrt(W^2 + eps^2), masked to the
/// strict upper triangle.
Matrix gradient(const Matrix& w, const GramSummary& gs, const OptConfig& cfg);

/// First-order minimization (L-BFGS directions, Armijo backtracking) in the
/// masked space, starting from W = 0. Every iterate is re-masked, so the
/// result is feasible with objective <= objective(0). Xpi must be centered.
Matrix optimize(const DataMatrix& xpi, const OptConfig& cfg, OptimizeInfo* info = nullptr);

/// Same minimization given a precomputed Gram summary (d inferred from it).
Matrix optimize_gram(const GramSummary& gs, const OptConfig& cfg, OptimizeInfo* info = nullptr);

/// Entries with |w| < w_threshold set to zero; survivors keep their value.
Matrix threshold(const Matrix& w, double w_threshold);

/// B-hat = P W P^T back in original variable indexing; the order witnesses
/// acyclicity of the result.
WeightedDag unpermute(const Matrix& wpi, const CausalOrder& order);

/// Per-column OLS on the predecessor block of the Gram matrix; the
/// unpenalized exact minimizer under the ordering (strictly upper
/// triangular storage, entry (i,j) with i < j).
Matrix closed_form_solve(const DataMatrix& xpi);
Matrix closed_form_solve_gram(const Matrix& gram_matrix);

}  // namespace triopt
