#include "triopt/tri_opt.hpp"

#include "triopt/errors.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace triopt {

namespace {

void mask_strict_upper(Matrix& w) {
    const Eigen::Index d = w.rows();
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = j; i < d; ++i) w(i, j) = 0.0;
    }
}

void require_masked(const Matrix& w, const char* who) {
    const Eigen::Index d = w.rows();
    if (w.cols() != d) {
        throw ShapeError(std::string(who) + ": matrix must be square");
    }
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = j; i < d; ++i) {
            if (w(i, j) != 0.0) {
                throw ConstraintViolationError(
                    std::string(who) + ": entry (" + std::to_string(i) + "," +
                    std::to_string(j) + ") violates the strict upper triangular mask");
            }
        }
    }
}

double charbonnier_sum(const Matrix& w, double eps) {
    const Eigen::Index d = w.rows();
    double s = 0.0;
    for (Eigen::Index j = 1; j < d; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            s += std::sqrt(w(i, j) * w(i, j) + eps * eps);
        }
    }
    return s;
}

}  // namespace

DataMatrix permute_data(const DataMatrix& x, const CausalOrder& order) {
    if (static_cast<Eigen::Index>(order.perm.size()) != x.d()) {
        throw ShapeError("permute_data: order length " + std::to_string(order.perm.size()) +
                         " does not match d=" + std::to_string(x.d()));
    }
    DataMatrix out;
    out.values.resize(x.n(), x.d());
    for (std::size_t k = 0; k < order.perm.size(); ++k) {
        out.values.col(static_cast<Eigen::Index>(k)) = x.values.col(order.perm[k]);
    }
    out.centered = x.centered;
    return out;
}

GramSummary gram(const DataMatrix& x) {
    if (x.n() < 1) {
        throw InsufficientSamplesError("gram: need at least one sample");
    }
    GramSummary gs;
    const Eigen::Index d = x.d();
    gs.gram = Matrix::Zero(d, d);
    gs.gram.selfadjointView<Eigen::Lower>().rankUpdate(x.values.transpose(),
                                                       1.0 / static_cast<double>(x.n()));
    gs.gram.triangularView<Eigen::StrictlyUpper>() =
        gs.gram.transpose().triangularView<Eigen::StrictlyUpper>();
    gs.trace_g = gs.gram.trace();
    return gs;
}

double objective(const Matrix& w, const GramSummary& gs, const OptConfig& cfg) {
    require_masked(w, "objective");
    const Matrix gw = gs.gram * w;
    const double quad = 0.5 * (w.transpose() * gw).trace();
    const double lin = gw.trace();  // Tr(G W) = Tr(W G) since G is symmetric
    return quad - lin + 0.5 * gs.trace_g + cfg.lambda * charbonnier_sum(w, cfg.epsilon);
}

Matrix gradient(const Matrix& w, const GramSummary& gs, const OptConfig& cfg) {
    require_masked(w, "gradient");
    Matrix g = gs.gram * w - gs.gram;
    const Eigen::Index d = w.rows();
    for (Eigen::Index j = 1; j < d; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            g(i, j) += cfg.lambda * w(i, j) /
                       std::sqrt(w(i, j) * w(i, j) + cfg.epsilon * cfg.epsilon);
        }
    }
    mask_strict_upper(g);
    return g;
}

namespace {

// objective without the masked-feasibility recheck (iterates are masked by
// construction inside the optimizer)
double objective_unchecked(const Matrix& w, const GramSummary& gs, const OptConfig& cfg) {
    const Matrix gw = gs.gram * w;
    return 0.5 * (w.transpose() * gw).trace() - gw.trace() + 0.5 * gs.trace_g +
           cfg.lambda * charbonnier_sum(w, cfg.epsilon);
}

}  // namespace

Matrix optimize_gram(const GramSummary& gs, const OptConfig& cfg, OptimizeInfo* info) {
    if (cfg.epsilon <= 0.0) {
        throw InvalidScaleError("optimize: epsilon must be positive");
    }
    const Eigen::Index d = gs.gram.rows();
    Matrix w = Matrix::Zero(d, d);
    if (info) {
        info->iterations = 0;
        info->objective_trace.clear();
    }
    double f = objective_unchecked(w, gs, cfg);
    if (info) info->objective_value = f;
    if (d <= 1) return w;

    Matrix g = gradient(w, gs, cfg);

    // Preconditioner: the quadratic term's Hessian is block diagonal over
    // columns, column j's block being the leading j x j Gram block. One
    // Cholesky of the shifted Gram provides every block factor at once
    // (leading submatrices of L factor the leading submatrices of G), and
    // the shift matches the Charbonnier curvature at zero. Armijo descent
    // stays valid whatever the preconditioner, this only buys convergence
    // speed on badly scaled Grams.
    const double shift = std::max(cfg.lambda / cfg.epsilon,
                                  1e-8 * (1.0 + gs.trace_g / static_cast<double>(d)));
    Matrix shifted = gs.gram;
    shifted.diagonal().array() += shift;
    Eigen::LLT<Matrix> llt(shifted);
    const bool have_factor = (llt.info() == Eigen::Success);
    Matrix lfac;
    if (have_factor) lfac = llt.matrixL();
    const double fallback_scale =
        1.0 / (gs.gram.cwiseAbs().rowwise().sum().maxCoeff() + cfg.lambda / cfg.epsilon + 1e-12);
    auto apply_h0 = [&](Matrix q) {
        if (!have_factor) return Matrix(fallback_scale * q);
        for (Eigen::Index j = 1; j < d; ++j) {
            auto seg = q.block(0, j, j, 1);
            lfac.topLeftCorner(j, j).triangularView<Eigen::Lower>().solveInPlace(seg);
            lfac.topLeftCorner(j, j)
                .triangularView<Eigen::Lower>()
                .transpose()
                .solveInPlace(seg);
        }
        return q;
    };

    // L-BFGS history in flattened form
    std::deque<Matrix> s_hist, y_hist;
    std::deque<double> rho_hist;

    int accepted_steps = 0;
    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        // two-loop recursion for the search direction
        Matrix q = g;
        std::vector<double> alpha(s_hist.size());
        for (int k = static_cast<int>(s_hist.size()) - 1; k >= 0; --k) {
            alpha[k] = rho_hist[k] * (s_hist[k].array() * q.array()).sum();
            q -= alpha[k] * y_hist[k];
        }
        q = apply_h0(std::move(q));
        for (std::size_t k = 0; k < s_hist.size(); ++k) {
            const double beta = rho_hist[k] * (y_hist[k].array() * q.array()).sum();
            q += (alpha[k] - beta) * s_hist[k];
        }
        Matrix dir = -q;

        double slope = (g.array() * dir.array()).sum();
        if (slope >= 0.0) {  // history went stale, fall back to steepest descent
            dir = -g;
            slope = -(g.array() * g.array()).sum();
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }
        if (slope == 0.0) break;  // exact stationary point

        // Armijo backtracking
        double t = 1.0;
        Matrix w_next;
        double f_next = f;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            w_next = w + t * dir;
            mask_strict_upper(w_next);
            f_next = objective_unchecked(w_next, gs, cfg);
            if (!std::isfinite(f_next)) {
                throw OptimizerDivergenceError(
                    "optimize: non-finite objective at iteration " + std::to_string(iter), iter);
            }
            if (f_next <= f + cfg.armijo_c * t * slope) {
                accepted = true;
                break;
            }
            t *= cfg.backtrack_factor;
        }
        if (!accepted || f_next > f) break;  // no further descent possible

        const Matrix g_next = gradient(w_next, gs, cfg);
        Matrix s = w_next - w;
        Matrix y = g_next - g;
        const double sy = (s.array() * y.array()).sum();
        if (sy > 1e-12 * std::sqrt((s.array() * s.array()).sum() *
                                   (y.array() * y.array()).sum())) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > cfg.lbfgs_memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }

        const double decrease = f - f_next;
        w = std::move(w_next);
        g = g_next;
        f = f_next;
        ++accepted_steps;
        if (info) info->objective_trace.push_back(f);
        if (decrease < cfg.tol * std::max(1.0, std::abs(f))) break;
    }
    if (info) {
        info->iterations = accepted_steps;
        info->objective_value = f;
    }
    return w;
}

Matrix optimize(const DataMatrix& xpi, const OptConfig& cfg, OptimizeInfo* info) {
    if (!xpi.centered) {
        throw UncenteredDataError("optimize: data must be centered");
    }
    if (xpi.d() < 1) {
        throw InvalidDimensionError("optimize: need at least one variable");
    }
    return optimize_gram(gram(xpi), cfg, info);
}

Matrix threshold(const Matrix& w, double w_threshold) {
    Matrix out = w;
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            if (std::abs(out(i, j)) < w_threshold) out(i, j) = 0.0;
        }
    }
    return out;
}

WeightedDag unpermute(const Matrix& wpi, const CausalOrder& order) {
    require_masked(wpi, "unpermute");
    const int d = static_cast<int>(wpi.rows());
    if (static_cast<int>(order.perm.size()) != d) {
        throw ShapeError("unpermute: order length does not match matrix size");
    }
    WeightedDag dag;
    dag.dim = d;
    dag.topo_order = order.perm;
    dag.weights = Matrix::Zero(d, d);
    for (int p = 0; p < d; ++p) {
        for (int q = p + 1; q < d; ++q) {
            dag.weights(order.perm[p], order.perm[q]) = wpi(p, q);
        }
    }
    return dag;
}

Matrix closed_form_solve_gram(const Matrix& gram_matrix) {
    const Eigen::Index d = gram_matrix.rows();
    Matrix w = Matrix::Zero(d, d);
    for (Eigen::Index j = 1; j < d; ++j) {
        const auto block = gram_matrix.topLeftCorner(j, j);
        const Vector b = gram_matrix.block(0, j, j, 1);
        Eigen::LDLT<Matrix> ldlt(block);
        // a vanishing pivot marks a singular predecessor block even when the
        // right-hand side happens to be consistent
        const double d_max = ldlt.vectorD().cwiseAbs().maxCoeff();
        const double d_min = ldlt.vectorD().minCoeff();
        if (ldlt.info() != Eigen::Success || !(d_min > 1e-12 * d_max)) {
            throw RankDeficiencyError(
                "closed_form_solve: predecessor Gram block singular for column " +
                    std::to_string(j),
                static_cast<int>(j));
        }
        const Vector sol = ldlt.solve(b);
        if (!sol.allFinite()) {
            throw RankDeficiencyError(
                "closed_form_solve: predecessor Gram block singular for column " +
                    std::to_string(j),
                static_cast<int>(j));
        }
        w.block(0, j, j, 1) = sol;
    }
    return w;
}

Matrix closed_form_solve(const DataMatrix& xpi) {
    return closed_form_solve_gram(gram(xpi).gram);
}

}  // namespace triopt
