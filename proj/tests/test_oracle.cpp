#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "triopt/errors.hpp"
#include "triopt/graph_sim.hpp"
#include "triopt/oracle.hpp"
#include "triopt/rng.hpp"
#include "triopt/stein_order.hpp"

#include <cmath>

using namespace triopt;

namespace {

Matrix random_spd(int n, std::uint64_t seed, double shift) {
    Rng rng(seed);
    Matrix m(n, n + 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n + 2; ++j) m(i, j) = rng.normal();
    return m * m.transpose() + shift * Matrix::Identity(n, n);
}

}  // namespace

TEST_CASE("dense_inverse of identity and diagonal matrices") {
    const Matrix id = Matrix::Identity(5, 5);
    CHECK((dense_inverse(id) - id).cwiseAbs().maxCoeff() < 1e-14);

    Matrix diag = Matrix::Zero(2, 2);
    diag(0, 0) = 2.0;
    diag(1, 1) = 4.0;
    const Matrix inv = dense_inverse(diag);
    CHECK(inv(0, 0) == doctest::Approx(0.5));
    CHECK(inv(1, 1) == doctest::Approx(0.25));
    CHECK(std::abs(inv(0, 1)) < 1e-16);
}

TEST_CASE("dense_inverse rejects asymmetric and indefinite input") {
    Matrix asym = Matrix::Zero(2, 2);
    asym(0, 1) = 1.0;
    CHECK_THROWS_AS(dense_inverse(asym), NumericalError);

    Matrix indef = Matrix::Identity(3, 3);
    indef(2, 2) = -1.0;
    CHECK_THROWS_AS(dense_inverse(indef), NumericalError);
}

TEST_CASE("dense_inverse composed with itself is the identity map") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const int n = 5 + static_cast<int>(seed % 12);
        const Matrix a = random_spd(n, seed, 0.5 * n);
        const Matrix back = dense_inverse(dense_inverse(a));
        CHECK((back - a).norm() / a.norm() < 1e-8);
    }
}

TEST_CASE("dense_inverse residual meets the contract") {
    const Matrix a = random_spd(40, 3, 1.0);
    const Matrix inv = dense_inverse(a);
    CHECK((a * inv - Matrix::Identity(40, 40)).norm() / std::sqrt(40.0) < 1e-8);
}

TEST_CASE("sm_downdate agrees with dense_inverse of the downdated matrix") {
    Rng rng(88);
    int tested = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 4 + static_cast<int>(rng.uniform_int(17));  // n <= 20
        const Matrix a = random_spd(n, 1000 + trial, static_cast<double>(n));
        Vector u(n);
        for (int i = 0; i < n; ++i) u(i) = 0.25 * rng.normal();

        KernelState state;
        state.kinv = dense_inverse(a);
        state.reinvert_period = 1000;
        state.alpha_floor = 1e-7;
        if (sm_downdate(state, u) != DowndateOutcome::applied) continue;
        const Matrix direct = dense_inverse(a - u * u.transpose());
        CHECK((state.kinv - direct).norm() / direct.norm() < 1e-9);
        ++tested;
    }
    CHECK(tested >= 45);
}

TEST_CASE("population_covariance closed forms") {
    WeightedDag empty;
    empty.dim = 3;
    empty.weights = Matrix::Zero(3, 3);
    empty.topo_order = {0, 1, 2};
    CHECK((population_covariance(empty, Vector::Ones(3)) - Matrix::Identity(3, 3))
              .cwiseAbs()
              .maxCoeff() < 1e-15);

    WeightedDag chain;
    chain.dim = 2;
    chain.weights = Matrix::Zero(2, 2);
    chain.weights(0, 1) = 0.7;
    chain.topo_order = {0, 1};
    const Matrix sigma = population_covariance(chain, Vector::Ones(2));
    CHECK(sigma(0, 0) == doctest::Approx(1.0));
    CHECK(sigma(0, 1) == doctest::Approx(0.7));
    CHECK(sigma(1, 0) == doctest::Approx(0.7));
    CHECK(sigma(1, 1) == doctest::Approx(1.49));
}

TEST_CASE("population_covariance matches Monte Carlo at d=8") {
    const WeightedDag dag = sample_weights(gen_er_dag(8, 2, 5), 1.0, 6);
    Rng rng(7);
    Vector omega(8);
    for (int i = 0; i < 8; ++i) omega(i) = 0.5 + rng.uniform01();
    const Matrix sigma = population_covariance(dag, omega);

    // simulate with per-variable noise scales sqrt(omega)
    const int n = 200000;
    Matrix x(n, 8);
    Rng base(9);
    for (int i = 0; i < 8; ++i) {
        Rng sub = base.fork(i);
        const double s = std::sqrt(omega(i));
        for (int r = 0; r < n; ++r) x(r, i) = s * sub.normal();
    }
    for (int v : dag.topo_order) {
        for (int j = 0; j < 8; ++j) {
            if (dag.weights(j, v) != 0.0) x.col(v) += dag.weights(j, v) * x.col(j);
        }
    }
    const Matrix centered = x.rowwise() - x.colwise().mean();
    const Matrix emp = centered.transpose() * centered / static_cast<double>(n);
    CHECK((emp - sigma).norm() / sigma.norm() < 0.02);
}

TEST_CASE("population_covariance is positive definite") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const WeightedDag dag = sample_weights(gen_er_dag(7, 2, seed), 1.0, seed + 50);
        Rng rng(seed);
        Vector omega(7);
        for (int i = 0; i < 7; ++i) omega(i) = 0.2 + rng.uniform01();
        const Matrix sigma = population_covariance(dag, omega);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
        CHECK(eig.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("population_recover with B = 0 returns the zero matrix") {
    WeightedDag empty;
    empty.dim = 4;
    empty.weights = Matrix::Zero(4, 4);
    empty.topo_order = {2, 0, 3, 1};
    const PopulationModel model = make_population_model(empty, Vector::Ones(4));
    CHECK(population_recover(model).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("population_recover is exact for random DAGs with unequal variances") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const int d = 3 + static_cast<int>(seed % 6);  // d <= 8
        const WeightedDag dag =
            sample_weights(gen_er_dag(d, 2, 9000 + seed), 1.0, 9100 + seed);
        Rng rng(9200 + seed);
        Vector omega(d);
        for (int i = 0; i < d; ++i) omega(i) = 0.3 + 2.0 * rng.uniform01();
        const PopulationModel model = make_population_model(dag, omega);
        const Matrix rec = population_recover(model);
        CHECK((rec - dag.weights).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("population_recover is invariant to a common variance rescale") {
    const WeightedDag dag = sample_weights(gen_er_dag(6, 2, 11), 1.0, 12);
    Rng rng(13);
    Vector omega(6);
    for (int i = 0; i < 6; ++i) omega(i) = 0.4 + rng.uniform01();
    const Matrix a = population_recover(make_population_model(dag, omega));
    const Matrix b = population_recover(make_population_model(dag, 5.0 * omega));
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("a reversed edge in the ordering forces a zero and biases the rest") {
    const WeightedDag dag = sample_weights(gen_er_dag(6, 2, 31), 1.0, 32);
    Rng rng(33);
    Vector omega(6);
    for (int i = 0; i < 6; ++i) omega(i) = 0.5 + rng.uniform01();
    const PopulationModel model = make_population_model(dag, omega);

    // reverse the positions of one true edge's endpoints
    int from = -1, to = -1;
    for (int a = 0; a < 6 && from < 0; ++a)
        for (int b = 0; b < 6 && from < 0; ++b)
            if (dag.weights(a, b) != 0.0) {
                from = a;
                to = b;
            }
    REQUIRE(from >= 0);
    CausalOrder wrong;
    wrong.perm = dag.topo_order;
    const std::vector<int> pos = inverse_permutation(wrong.perm);
    std::swap(wrong.perm[pos[from]], wrong.perm[pos[to]]);

    const Matrix rec = population_recover(model, wrong);
    CHECK(rec(from, to) == 0.0);  // structurally masked by the wrong order
    CHECK((rec - dag.weights).norm() > 1e-6);
}
