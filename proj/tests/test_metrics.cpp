#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "triopt/errors.hpp"
#include "triopt/graph_sim.hpp"
#include "triopt/metrics.hpp"
#include "triopt/rng.hpp"

#include <numeric>
#include <set>

using namespace triopt;

namespace {

BinaryGraph random_graph(int d, double p, std::uint64_t seed) {
    Rng rng(seed);
    BinaryGraph g;
    g.dim = d;
    g.adjacency = IntMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j && rng.uniform01() < p) g.adjacency(i, j) = 1;
    return g;
}

// brute-force SHD: per unordered pair, count operations via explicit cases
int shd_oracle(const BinaryGraph& a, const BinaryGraph& b) {
    int ops = 0;
    for (int i = 0; i < a.dim; ++i) {
        for (int j = i + 1; j < a.dim; ++j) {
            const int af = a.adjacency(i, j), ar = a.adjacency(j, i);
            const int bf = b.adjacency(i, j), br = b.adjacency(j, i);
            if (af == bf && ar == br) continue;
            const int a_edges = af + ar, b_edges = bf + br;
            if (a_edges == 1 && b_edges == 1) {
                ops += 1;  // reversal
            } else {
                ops += std::abs(af - bf) + std::abs(ar - br);
            }
        }
    }
    return ops;
}

CausalOrder identity_order(int d) {
    CausalOrder o;
    o.perm.resize(d);
    std::iota(o.perm.begin(), o.perm.end(), 0);
    return o;
}

BinaryGraph chain_graph(int d) {
    BinaryGraph g;
    g.dim = d;
    g.adjacency = IntMatrix::Zero(d, d);
    for (int i = 0; i + 1 < d; ++i) g.adjacency(i, i + 1) = 1;
    return g;
}

}  // namespace

TEST_CASE("binarize maps nonzero weights to edges") {
    WeightedDag dag;
    dag.dim = 3;
    dag.weights = Matrix::Zero(3, 3);
    dag.topo_order = {0, 1, 2};
    CHECK(binarize(dag).adjacency.sum() == 0);

    dag.weights(0, 1) = -1.3;
    dag.weights(1, 2) = 0.4;
    const BinaryGraph g = binarize(dag);
    CHECK(g.adjacency(0, 1) == 1);
    CHECK(g.adjacency(1, 2) == 1);
    CHECK(g.adjacency.sum() == 2);
    CHECK(g.adjacency.diagonal().sum() == 0);
}

TEST_CASE("shd of identical graphs is zero") {
    const BinaryGraph g = random_graph(10, 0.2, 1);
    const ShdResult r = shd(g, g);
    CHECK(r.raw == 0);
    CHECK(r.normalized == 0.0);
}

TEST_CASE("one reversed edge costs a single flip") {
    BinaryGraph a = chain_graph(4);
    BinaryGraph b = chain_graph(4);
    b.adjacency(1, 2) = 0;
    b.adjacency(2, 1) = 1;
    const ShdResult r = shd(a, b);
    CHECK(r.raw == 1);
    CHECK(r.normalized == doctest::Approx(1.0 / 12.0));
}

TEST_CASE("shd matches the exhaustive pairwise oracle on random graphs") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const BinaryGraph a = random_graph(50, 0.05, 2 * seed);
        const BinaryGraph b = random_graph(50, 0.05, 2 * seed + 1);
        CHECK(shd(a, b).raw == shd_oracle(a, b));
    }
}

TEST_CASE("shd is symmetric and zero on the diagonal of the metric") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const BinaryGraph a = random_graph(12, 0.2, 100 + seed);
        const BinaryGraph b = random_graph(12, 0.2, 200 + seed);
        CHECK(shd(a, b).raw == shd(b, a).raw);
        CHECK(shd(a, a).raw == 0);
    }
    CHECK_THROWS_AS(shd(random_graph(3, 0.5, 0), random_graph(4, 0.5, 0)), ShapeError);
}

TEST_CASE("f1 basics") {
    const BinaryGraph truth = chain_graph(5);
    CHECK(f1(truth, truth) == 1.0);

    BinaryGraph empty;
    empty.dim = 5;
    empty.adjacency = IntMatrix::Zero(5, 5);
    CHECK(f1(empty, truth) == 0.0);
    CHECK(f1(empty, empty) == 1.0);  // two empty graphs agree perfectly

    // half the true edges, no extras: F1 = 2/3
    BinaryGraph half = chain_graph(5);
    half.adjacency(0, 1) = 0;
    half.adjacency(2, 3) = 0;
    CHECK(f1(half, truth) == doctest::Approx(2.0 * 0.5 / 1.5));
}

TEST_CASE("f1 stays within [0,1] and hits 1 only on exact direction match") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const BinaryGraph a = random_graph(10, 0.2, 300 + seed);
        const BinaryGraph b = random_graph(10, 0.2, 400 + seed);
        const double v = f1(a, b);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        if (v == 1.0) CHECK(a.adjacency == b.adjacency);
    }
    // reversed edge is not a true positive
    BinaryGraph fwd = chain_graph(2);
    BinaryGraph rev;
    rev.dim = 2;
    rev.adjacency = IntMatrix::Zero(2, 2);
    rev.adjacency(1, 0) = 1;
    CHECK(f1(rev, fwd) == 0.0);
}

TEST_CASE("order_divergence is zero for the graph's own order") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const WeightedDag dag = gen_er_dag(15, 2, seed);
        CausalOrder o;
        o.perm = dag.topo_order;
        CHECK(order_divergence(o, binarize(dag)) == 0);
    }
}

TEST_CASE("order_divergence of a reversed chain is d-1") {
    const int d = 7;
    const BinaryGraph g = chain_graph(d);
    CausalOrder rev;
    rev.perm.resize(d);
    for (int i = 0; i < d; ++i) rev.perm[i] = d - 1 - i;
    CHECK(order_divergence(rev, g) == d - 1);
}

TEST_CASE("order_divergence matches a brute-force pair scan") {
    Rng rng(500);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const WeightedDag dag = gen_er_dag(6, 2, 600 + seed);
        const BinaryGraph g = binarize(dag);
        CausalOrder o = identity_order(6);
        for (int i = 5; i > 0; --i) {
            const int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(i) + 1));
            std::swap(o.perm[i], o.perm[j]);
        }
        // brute force: position lookup per edge
        int expect = 0;
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
                if (g.adjacency(i, j) == 0) continue;
                int pi = -1, pj = -1;
                for (int k = 0; k < 6; ++k) {
                    if (o.perm[k] == i) pi = k;
                    if (o.perm[k] == j) pj = k;
                }
                if (pi > pj) ++expect;
            }
        }
        CHECK(order_divergence(o, g) == expect);
    }
}

TEST_CASE("perturb with fraction 0 is the identity") {
    const BinaryGraph g = chain_graph(10);
    const CausalOrder o = identity_order(10);
    for (auto kind : {PerturbKind::random_shuffle, PerturbKind::block_reversal,
                      PerturbKind::adjacent_swap, PerturbKind::ancestor_swap,
                      PerturbKind::hub_swap}) {
        PerturbSpec spec;
        spec.kind = kind;
        spec.fraction = 0.0;
        spec.seed = 3;
        CHECK(perturb(o, g, spec).perm == o.perm);
    }
}

TEST_CASE("perturb rejects fractions outside [0,1]") {
    const BinaryGraph g = chain_graph(4);
    PerturbSpec spec;
    spec.fraction = 1.5;
    CHECK_THROWS_AS(perturb(identity_order(4), g, spec), InvalidFractionError);
    spec.fraction = -0.1;
    CHECK_THROWS_AS(perturb(identity_order(4), g, spec), InvalidFractionError);
}

TEST_CASE("block reversal at fraction 1 reverses everything") {
    const BinaryGraph g = chain_graph(8);
    PerturbSpec spec;
    spec.kind = PerturbKind::block_reversal;
    spec.fraction = 1.0;
    spec.seed = 5;
    const CausalOrder out = perturb(identity_order(8), g, spec);
    for (int i = 0; i < 8; ++i) CHECK(out.perm[i] == 7 - i);
}

TEST_CASE("all perturbations return valid permutations") {
    const WeightedDag dag = gen_er_dag(30, 2, 9);
    const BinaryGraph g = binarize(dag);
    CausalOrder o;
    o.perm = dag.topo_order;
    for (auto kind : {PerturbKind::random_shuffle, PerturbKind::block_reversal,
                      PerturbKind::adjacent_swap, PerturbKind::ancestor_swap,
                      PerturbKind::hub_swap}) {
        for (double fraction : {0.01, 0.2, 0.5, 1.0}) {
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                PerturbSpec spec;
                spec.kind = kind;
                spec.fraction = fraction;
                spec.seed = seed;
                const CausalOrder out = perturb(o, g, spec);
                CHECK(is_permutation(out.perm));
            }
        }
    }
}

TEST_CASE("adjacent swaps add at most one violation per edge-carrying swap") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const WeightedDag dag = gen_er_dag(40, 2, 700 + seed);
        const BinaryGraph g = binarize(dag);
        CausalOrder o;
        o.perm = dag.topo_order;

        PerturbSpec spec;
        spec.kind = PerturbKind::adjacent_swap;
        spec.fraction = 0.15;
        spec.seed = seed;
        PerturbLog log;
        const CausalOrder out = perturb(o, g, spec, &log);

        int edge_swaps = 0;
        for (const auto& [a, b] : log.swapped_variables) {
            if (g.adjacency(a, b) != 0 || g.adjacency(b, a) != 0) ++edge_swaps;
        }
        const int base = order_divergence(o, g);
        const int delta = order_divergence(out, g) - base;
        CHECK(delta <= edge_swaps);
    }
}

TEST_CASE("ancestor swap inverts true edges") {
    const BinaryGraph g = chain_graph(10);
    PerturbSpec spec;
    spec.kind = PerturbKind::ancestor_swap;
    spec.fraction = 0.1;  // one edge
    spec.seed = 11;
    PerturbLog log;
    const CausalOrder out = perturb(identity_order(10), g, spec, &log);
    REQUIRE(log.swapped_variables.size() == 1);
    const auto [i, j] = log.swapped_variables[0];
    CHECK(g.adjacency(i, j) + g.adjacency(j, i) == 1);
    CHECK(order_divergence(out, g) >= 1);
}

TEST_CASE("hub swap picks the highest-degree nodes first") {
    // star graph: node 0 has degree d-1, everything else degree 1
    BinaryGraph star;
    star.dim = 8;
    star.adjacency = IntMatrix::Zero(8, 8);
    for (int j = 1; j < 8; ++j) star.adjacency(0, j) = 1;
    PerturbSpec spec;
    spec.kind = PerturbKind::hub_swap;
    spec.fraction = 1.0 / 8.0;  // exactly one swap
    spec.seed = 21;
    PerturbLog log;
    const CausalOrder out = perturb(identity_order(8), star, spec, &log);
    REQUIRE(log.swapped_variables.size() == 1);
    CHECK((log.swapped_variables[0].first == 0 || log.swapped_variables[0].second == 0));
    CHECK(is_permutation(out.perm));
}

TEST_CASE("perturbations are deterministic per seed") {
    const WeightedDag dag = gen_er_dag(25, 2, 77);
    const BinaryGraph g = binarize(dag);
    CausalOrder o;
    o.perm = dag.topo_order;
    PerturbSpec spec;
    spec.kind = PerturbKind::random_shuffle;
    spec.fraction = 0.3;
    spec.seed = 1234;
    const CausalOrder first = perturb(o, g, spec);
    CHECK(first.perm == perturb(o, g, spec).perm);
    spec.seed = 1235;
    CHECK(first.perm != perturb(o, g, spec).perm);
}
