#include "triopt/stein_order.hpp"

#include "triopt/errors.hpp"
#include "triopt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace triopt {

DataMatrix center(const DataMatrix& x) {
    if (x.n() < 2) {
        throw InsufficientSamplesError("center: need at least 2 samples, got " +
                                       std::to_string(x.n()));
    }
    DataMatrix out;
    out.values = x.values.rowwise() - x.values.colwise().mean();
    out.centered = true;
    return out;
}

KernelState build_kernel(const DataMatrix& x, double eta) {
    if (!x.centered) {
        throw UncenteredDataError("build_kernel: data must be centered");
    }
    if (eta <= 0.0) {
        throw InvalidScaleError("build_kernel: eta must be positive");
    }
    const Eigen::Index n = x.n();
    KernelState state;
    state.kernel = Matrix::Zero(n, n);
    state.kernel.selfadjointView<Eigen::Lower>().rankUpdate(x.values);
    state.kernel.triangularView<Eigen::StrictlyUpper>() =
        state.kernel.transpose().triangularView<Eigen::StrictlyUpper>();
    state.kernel.diagonal().array() += eta;

    state.kinv = spd_inverse_cholesky(state.kernel).inverse;
    state.active.resize(x.d());
    std::iota(state.active.begin(), state.active.end(), 0);
    state.eta = eta;
    state.downdates_since_reinvert = 0;
    return state;
}

Matrix stein_score(const KernelState& state, const DataMatrix& x) {
    if (state.kinv.rows() != x.n()) {
        throw ShapeError("stein_score: kernel is " + std::to_string(state.kinv.rows()) +
                         "x" + std::to_string(state.kinv.cols()) + " but data has " +
                         std::to_string(x.n()) + " rows");
    }
    if (static_cast<Eigen::Index>(state.active.size()) != x.d()) {
        throw ShapeError("stein_score: state tracks " + std::to_string(state.active.size()) +
                         " active columns but data has " + std::to_string(x.d()));
    }
    return -static_cast<double>(x.n()) * (state.kinv * x.values);
}

Matrix hessian_diag(const Matrix& g) {
    return -(g.array() * g.array()).matrix();
}

int select_leaf(const Matrix& h, const std::vector<int>& active) {
    if (active.empty() || h.cols() == 0) {
        throw EmptySelectionError("select_leaf: no active columns");
    }
    if (h.cols() != static_cast<Eigen::Index>(active.size())) {
        throw ShapeError("select_leaf: proxy has " + std::to_string(h.cols()) +
                         " columns for " + std::to_string(active.size()) + " active variables");
    }
    const Eigen::RowVectorXd means = h.colwise().mean();
    int best = 0;
    for (int j = 1; j < means.size(); ++j) {
        if (means(j) > means(best)) best = j;
    }
    return best;
}

DowndateOutcome sm_downdate(KernelState& state, const Vector& u, double* alpha_out) {
    if (u.size() != state.kinv.rows() || state.kernel.rows() != state.kinv.rows()) {
        throw ShapeError("sm_downdate: vector length " + std::to_string(u.size()) +
                         " does not match kernel size " + std::to_string(state.kinv.rows()));
    }
    if (alpha_out) *alpha_out = std::numeric_limits<double>::quiet_NaN();
    if (state.downdates_since_reinvert >= state.reinvert_period) {
        return DowndateOutcome::rebuild_required;
    }
    Vector v = state.kinv * u;
    // one residual-correction pass; O(n^2), recovers the digits lost when
    // u dominates the kernel spectrum
    v += state.kinv * (u - state.kernel * v);
    const double alpha = 1.0 - u.dot(v);
    if (alpha_out) *alpha_out = alpha;
    if (std::abs(alpha) < state.alpha_floor) {
        return DowndateOutcome::rebuild_required;
    }
    state.kinv.selfadjointView<Eigen::Lower>().rankUpdate(v, 1.0 / alpha);
    state.kinv.triangularView<Eigen::StrictlyUpper>() =
        state.kinv.transpose().triangularView<Eigen::StrictlyUpper>();
    state.kernel.selfadjointView<Eigen::Lower>().rankUpdate(u, -1.0);
    state.kernel.triangularView<Eigen::StrictlyUpper>() =
        state.kernel.transpose().triangularView<Eigen::StrictlyUpper>();
    ++state.downdates_since_reinvert;
    return DowndateOutcome::applied;
}

namespace {

// Columns of x listed in `active`, packed left to right.
Matrix active_columns(const Matrix& x, const std::vector<int>& active) {
    Matrix out(x.rows(), static_cast<Eigen::Index>(active.size()));
    for (std::size_t j = 0; j < active.size(); ++j) out.col(j) = x.col(active[j]);
    return out;
}

KernelState rebuild_state(const Matrix& x, const std::vector<int>& active, double eta,
                          int tau, double zeta) {
    DataMatrix sub;
    sub.values = active_columns(x, active);
    sub.centered = true;
    KernelState state = build_kernel(sub, eta);
    state.active = active;
    state.reinvert_period = tau;
    state.alpha_floor = zeta;
    return state;
}

}  // namespace

CausalOrder order(const DataMatrix& x, const OrderingConfig& cfg, OrderingTrace* trace) {
    if (x.d() < 1) {
        throw InvalidDimensionError("order: need at least one variable");
    }
    const DataMatrix centered_x = x.centered ? x : center(x);
    const Matrix& xm = centered_x.values;
    const int d = static_cast<int>(x.d());

    std::vector<int> active(d);
    std::iota(active.begin(), active.end(), 0);
    std::vector<int> removal;
    removal.reserve(d);

    KernelState state = rebuild_state(xm, active, cfg.eta, cfg.tau, cfg.zeta);
    if (trace) {
        trace->rounds.clear();
        trace->fallback_events = 0;
        trace->rebuild_count = 1;
    }

    for (int round = 0; round < d - 1; ++round) {
        DataMatrix sub;
        sub.values = active_columns(xm, active);
        sub.centered = true;
        const Matrix g = stein_score(state, sub);
        const Matrix h = hessian_diag(g);
        const int l = select_leaf(h, active);
        const int leaf = active[l];
        removal.push_back(leaf);

        OrderingRound info;
        info.leaf = leaf;
        info.alpha = std::numeric_limits<double>::quiet_NaN();

        const Vector u = xm.col(leaf);
        active.erase(active.begin() + l);

        bool rebuild = !cfg.use_downdate;
        if (cfg.use_downdate) {
            // state still covers the kernel including the leaf column, so
            // the downdate removes exactly u
            if (sm_downdate(state, u, &info.alpha) == DowndateOutcome::applied) {
                state.active = active;
            } else {
                rebuild = true;
                info.fallback = std::isfinite(info.alpha);  // zeta fired, not the counter
                if (info.fallback && trace) ++trace->fallback_events;
            }
        }
        if (rebuild && active.size() > 1) {
            state = rebuild_state(xm, active, cfg.eta, cfg.tau, cfg.zeta);
            info.rebuilt = true;
            if (trace) ++trace->rebuild_count;
        }
        if (trace) trace->rounds.push_back(info);
    }
    removal.push_back(active.front());

    CausalOrder result;
    result.perm.assign(removal.rbegin(), removal.rend());
    return result;
}

}  // namespace triopt
