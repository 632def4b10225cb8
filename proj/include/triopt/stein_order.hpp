#pragma once

#include "triopt/types.hpp"

#include <vector>

namespace triopt {

/// Maintained pair (regularized Gram kernel, its inverse) over the active
/// columns: kernel = X X^T + eta I, kinv its inverse, updated either by
/// Sherman-Morrison rank-1 downdates or full re-inversion. Keeping the
/// kernel alongside the inverse lets the downdate refine v = kinv u by one
/// residual-correction pass, which suppresses precision loss when single
/// columns dominate the kernel spectrum.
struct KernelState {
    Matrix kernel;            // n x n, K + eta I
    Matrix kinv;              // n x n, (K + eta I)^-1
    std::vector<int> active;  // surviving variable indices, ordered
    double eta = 0.9;
    int downdates_since_reinvert = 0;
    int reinvert_period = 100;   // tau
    double alpha_floor = 1e-7;   // zeta
};

struct OrderingConfig {
    double eta = 0.9;
    double zeta = 1e-7;
    int tau = 100;
    bool use_downdate = true;
};

enum class DowndateOutcome { applied, rebuild_required };

struct OrderingRound {
    int leaf = -1;          // variable index removed this round
    double alpha = 0.0;     // downdate denominator (NaN when not computed)
    bool fallback = false;  // |alpha| < zeta forced a rebuild
    bool rebuilt = false;   // kernel re-inverted from scratch this round
};

struct OrderingTrace {
    std::vector<OrderingRound> rounds;
    int fallback_events = 0;
    int rebuild_count = 0;
};

/// Subtract each column's mean. Requires n >= 2.
DataMatrix center(const DataMatrix& x);

/// K = X X^T + eta I and its inverse via Cholesky; counters reset,
/// active = {0..d-1}. X must be centered.
KernelState build_kernel(const DataMatrix& x, double eta);

/// Linear-kernel Stein estimate of the score at the samples:
/// G = -n * (kinv * X). X must hold exactly the active columns.
Matrix stein_score(const KernelState& state, const DataMatrix& x);

/// Hessian-diagonal proxy H = -(G .* G).
Matrix hessian_diag(const Matrix& g);

/// Position (into the active list) of the column maximizing the column mean
/// of H; ties break to the smallest position.
int select_leaf(const Matrix& h, const std::vector<int>& active);

/// Rank-1 downdate after removing data column u: v = kinv u (refined once
/// against the stored kernel), alpha = 1 - u^T v, kinv += v v^T / alpha,
/// kernel -= u u^T, both re-symmetrized. Returns rebuild_required (state
/// untouched) when |alpha| < alpha_floor or the downdate counter has
/// reached reinvert_period. alpha_out, when given, receives the computed
/// denominator (NaN if the counter fired first).
DowndateOutcome sm_downdate(KernelState& state, const Vector& u, double* alpha_out = nullptr);

/// Full ordering loop: d-1 leaf removals, reversed so leaves come last.
/// With use_downdate=false the kernel inverse is rebuilt from scratch every
/// round. Centering happens once up front and is not redone after column
/// removals (they do not change the remaining columns' means).
CausalOrder order(const DataMatrix& x, const OrderingConfig& cfg, OrderingTrace* trace = nullptr);

}  // namespace triopt
