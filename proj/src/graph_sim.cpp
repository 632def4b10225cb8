#include "triopt/graph_sim.hpp"

#include "triopt/errors.hpp"
#include "triopt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace triopt {

namespace {

constexpr double kEulerMascheroni = 0.57721566490153286061;

std::vector<int> random_permutation(int d, Rng& rng) {
    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = d - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(i) + 1));
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

}  // namespace

WeightedDag gen_er_dag(int d, int degree, std::uint64_t seed) {
    if (d < 2) {
        throw InvalidDimensionError("gen_er_dag: d must be >= 2, got " + std::to_string(d));
    }
    if (degree < 1) {
        throw InvalidDimensionError("gen_er_dag: degree must be positive");
    }
    Rng rng = Rng(seed).fork(0x45520000ULL);
    WeightedDag dag;
    dag.dim = d;
    dag.topo_order = random_permutation(d, rng);
    dag.weights = Matrix::Zero(d, d);

    const double p = std::min(
        1.0, 2.0 * static_cast<double>(degree) * d / (static_cast<double>(d) * d - d));
    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b) {
            if (rng.uniform01() < p) {
                dag.weights(dag.topo_order[a], dag.topo_order[b]) = 1.0;
            }
        }
    }
    return dag;
}

WeightedDag gen_sf_dag(int d, int k, std::uint64_t seed) {
    if (k < 1 || d <= k) {
        throw InvalidDimensionError("gen_sf_dag: need d > k >= 1, got d=" + std::to_string(d) +
                                    " k=" + std::to_string(k));
    }
    Rng rng = Rng(seed).fork(0x53460000ULL);
    WeightedDag dag;
    dag.dim = d;
    dag.topo_order.resize(d);
    std::iota(dag.topo_order.begin(), dag.topo_order.end(), 0);
    dag.weights = Matrix::Zero(d, d);

    // endpoints of existing edges, repeated by degree; empty until the first edge
    std::vector<int> repeated;
    repeated.reserve(2 * static_cast<std::size_t>(d) * k);
    std::vector<char> chosen(d, 0);
    for (int t = 1; t < d; ++t) {
        const int m = std::min(t, k);
        std::vector<int> targets;
        targets.reserve(m);
        while (static_cast<int>(targets.size()) < m) {
            int c;
            if (repeated.empty()) {
                c = static_cast<int>(rng.uniform_int(t));
            } else {
                c = repeated[rng.uniform_int(repeated.size())];
            }
            if (!chosen[c]) {
                chosen[c] = 1;
                targets.push_back(c);
            }
        }
        for (int c : targets) {
            chosen[c] = 0;
            dag.weights(c, t) = 1.0;
            repeated.push_back(c);
            repeated.push_back(t);
        }
    }
    return dag;
}

WeightedDag sample_weights(const WeightedDag& skeleton, double scale, std::uint64_t seed) {
    if (scale <= 0.0) {
        throw InvalidScaleError("sample_weights: scale must be positive, got " +
                                std::to_string(scale));
    }
    Rng rng = Rng(seed).fork(0x57470000ULL);
    WeightedDag dag = skeleton;
    const int d = dag.dim;
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) {
            const double s = skeleton.weights(j, i);
            if (s == 0.0) continue;
            if (s != 1.0) {
                throw ConstraintViolationError("sample_weights: skeleton entries must be 0 or 1");
            }
            const double magnitude = rng.uniform(0.5, 2.0);
            const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
            dag.weights(j, i) = scale * sign * magnitude;
        }
    }
    return dag;
}

DataMatrix sample_sem(const WeightedDag& dag, int n, const NoiseSpec& noise, std::uint64_t seed) {
    if (n < 1) {
        throw InvalidSampleCountError("sample_sem: n must be >= 1, got " + std::to_string(n));
    }
    const int d = dag.dim;
    const Rng base(seed);
    DataMatrix out;
    out.values.resize(n, d);
    out.centered = false;

    // independent noise stream per variable, shifted to zero mean
    for (int i = 0; i < d; ++i) {
        Rng rng = base.fork(0x4e4f49534500ULL + static_cast<std::uint64_t>(i));
        for (int r = 0; r < n; ++r) {
            double e = 0.0;
            switch (noise.family) {
                case NoiseFamily::gaussian_ev:
                    e = noise.scale * rng.normal();
                    break;
                case NoiseFamily::gumbel:
                    e = noise.scale * (rng.gumbel() - kEulerMascheroni);
                    break;
                case NoiseFamily::exponential:
                    e = noise.scale * (rng.exponential() - 1.0);
                    break;
            }
            out.values(r, i) = e;
        }
    }

    for (int v : dag.topo_order) {
        for (int j = 0; j < d; ++j) {
            const double w = dag.weights(j, v);
            if (w != 0.0) out.values.col(v) += w * out.values.col(j);
        }
    }
    return out;
}

}  // namespace triopt
