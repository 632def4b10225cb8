#include "triopt/metrics.hpp"

#include "triopt/errors.hpp"
#include "triopt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace triopt {

BinaryGraph binarize(const WeightedDag& dag) {
    BinaryGraph g;
    g.dim = dag.dim;
    g.adjacency = IntMatrix::Zero(dag.dim, dag.dim);
    for (int j = 0; j < dag.dim; ++j) {
        for (int i = 0; i < dag.dim; ++i) {
            if (i != j && dag.weights(i, j) != 0.0) g.adjacency(i, j) = 1;
        }
    }
    return g;
}

ShdResult shd(const BinaryGraph& pred, const BinaryGraph& truth) {
    if (pred.dim != truth.dim) {
        throw ShapeError("shd: graphs have different dimensions " + std::to_string(pred.dim) +
                         " vs " + std::to_string(truth.dim));
    }
    const int d = pred.dim;
    int raw = 0;
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            const int a1 = pred.adjacency(i, j), a2 = pred.adjacency(j, i);
            const int b1 = truth.adjacency(i, j), b2 = truth.adjacency(j, i);
            if (a1 == b1 && a2 == b2) continue;
            // single reversed edge is one flip, everything else is counted
            // per directed slot
            if (a1 + a2 == 1 && b1 + b2 == 1) {
                ++raw;
            } else {
                raw += (a1 != b1) + (a2 != b2);
            }
        }
    }
    ShdResult out;
    out.raw = raw;
    out.normalized = d > 1 ? static_cast<double>(raw) / (static_cast<double>(d) * (d - 1)) : 0.0;
    return out;
}

double f1(const BinaryGraph& pred, const BinaryGraph& truth) {
    if (pred.dim != truth.dim) {
        throw ShapeError("f1: graphs have different dimensions");
    }
    const int d = pred.dim;
    int tp = 0, pred_edges = 0, true_edges = 0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (i == j) continue;
            const bool p = pred.adjacency(i, j) != 0;
            const bool t = truth.adjacency(i, j) != 0;
            pred_edges += p;
            true_edges += t;
            tp += p && t;
        }
    }
    if (pred_edges == 0 && true_edges == 0) return 1.0;  // perfect agreement on emptiness
    if (pred_edges == 0 || true_edges == 0) return 0.0;
    const double precision = static_cast<double>(tp) / pred_edges;
    const double recall = static_cast<double>(tp) / true_edges;
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

int order_divergence(const CausalOrder& order, const BinaryGraph& truth) {
    const int d = truth.dim;
    if (static_cast<int>(order.perm.size()) != d) {
        throw ShapeError("order_divergence: order length does not match graph dimension");
    }
    const std::vector<int> pos = inverse_permutation(order.perm);
    int count = 0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (truth.adjacency(i, j) != 0 && pos[i] > pos[j]) ++count;
        }
    }
    return count;
}

namespace {

// first m entries of a partial Fisher-Yates over 0..n-1
std::vector<int> sample_distinct(int n, int m, Rng& rng) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < m; ++i) {
        const int j = i + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(m);
    return idx;
}

void swap_positions(std::vector<int>& perm, int p, int q, PerturbLog* log) {
    if (log) {
        log->swapped_positions.emplace_back(p, q);
        log->swapped_variables.emplace_back(perm[p], perm[q]);
    }
    std::swap(perm[p], perm[q]);
}

}  // namespace

CausalOrder perturb(const CausalOrder& order, const BinaryGraph& truth, const PerturbSpec& spec,
                    PerturbLog* log) {
    if (spec.fraction < 0.0 || spec.fraction > 1.0) {
        throw InvalidFractionError("perturb: fraction must lie in [0,1], got " +
                                   std::to_string(spec.fraction));
    }
    const int d = static_cast<int>(order.perm.size());
    CausalOrder out = order;
    const int m = static_cast<int>(std::ceil(spec.fraction * d));
    if (m == 0 || d < 2) return out;
    Rng rng = Rng(spec.seed).fork(0x5045525455ULL + static_cast<std::uint64_t>(spec.kind));

    switch (spec.kind) {
        case PerturbKind::random_shuffle: {
            std::vector<int> positions = sample_distinct(d, m, rng);
            std::sort(positions.begin(), positions.end());
            std::vector<int> vars(m);
            for (int i = 0; i < m; ++i) vars[i] = out.perm[positions[i]];
            for (int i = m - 1; i > 0; --i) {
                const int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(i) + 1));
                std::swap(vars[i], vars[j]);
            }
            for (int i = 0; i < m; ++i) out.perm[positions[i]] = vars[i];
            if (log) log->shuffled_positions = positions;
            break;
        }
        case PerturbKind::block_reversal: {
            const int len = std::min(m, d);
            const int start = static_cast<int>(
                rng.uniform_int(static_cast<std::uint64_t>(d - len) + 1));
            std::reverse(out.perm.begin() + start, out.perm.begin() + start + len);
            if (log) {
                log->block_start = start;
                log->block_len = len;
            }
            break;
        }
        case PerturbKind::adjacent_swap: {
            const int swaps = std::min(m, d - 1);
            const std::vector<int> ps = sample_distinct(d - 1, swaps, rng);
            for (int p : ps) swap_positions(out.perm, p, p + 1, log);
            break;
        }
        case PerturbKind::ancestor_swap: {
            std::vector<std::pair<int, int>> edges;
            for (int i = 0; i < truth.dim; ++i) {
                for (int j = 0; j < truth.dim; ++j) {
                    if (truth.adjacency(i, j) != 0) edges.emplace_back(i, j);
                }
            }
            const int picks = std::min<int>(m, static_cast<int>(edges.size()));
            const std::vector<int> which =
                sample_distinct(static_cast<int>(edges.size()), picks, rng);
            std::vector<int> pos = inverse_permutation(out.perm);
            for (int e : which) {
                const auto [i, j] = edges[e];
                swap_positions(out.perm, pos[i], pos[j], log);
                std::swap(pos[i], pos[j]);
            }
            break;
        }
        case PerturbKind::hub_swap: {
            std::vector<int> degree(d, 0);
            for (int i = 0; i < truth.dim; ++i) {
                for (int j = 0; j < truth.dim; ++j) {
                    if (truth.adjacency(i, j) != 0) {
                        ++degree[i];
                        ++degree[j];
                    }
                }
            }
            std::vector<int> nodes(d);
            std::iota(nodes.begin(), nodes.end(), 0);
            std::stable_sort(nodes.begin(), nodes.end(), [&](int a, int b) {
                return degree[a] > degree[b];
            });
            std::vector<int> pos = inverse_permutation(out.perm);
            for (int k = 0; k < std::min(m, d); ++k) {
                const int hub = nodes[k];
                const int p = pos[hub];
                // uniform among the d-1 other positions
                int q = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(d - 1)));
                if (q >= p) ++q;
                const int other = out.perm[q];
                swap_positions(out.perm, p, q, log);
                std::swap(pos[hub], pos[other]);
            }
            break;
        }
    }
    return out;
}

}  // namespace triopt
