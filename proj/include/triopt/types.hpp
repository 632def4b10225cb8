#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace triopt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntMatrix = Eigen::MatrixXi;

/// Weighted adjacency matrix of a DAG. weights(j, i) is the coefficient of
/// the edge j -> i, so the SEM reads x_i = sum_j weights(j, i) * x_j + eps_i
/// (equivalently X = B^T X + eps with B = weights). topo_order lists the
/// variables ancestors-first and witnesses acyclicity: permuting rows and
/// columns by it makes the matrix strictly upper triangular.
struct WeightedDag {
    int dim = 0;
    Matrix weights;
    std::vector<int> topo_order;
};

/// n x d sample matrix, one row per observation.
struct DataMatrix {
    Matrix values;
    bool centered = false;

    Eigen::Index n() const { return values.rows(); }
    Eigen::Index d() const { return values.cols(); }
};

enum class NoiseFamily { gaussian_ev, gumbel, exponential };

struct NoiseSpec {
    NoiseFamily family = NoiseFamily::gaussian_ev;
    double scale = 1.0;
};

/// Causal order as a permutation of {0..d-1}; perm[k] is the variable at
/// position k, so earlier entries are ancestors of later ones.
struct CausalOrder {
    std::vector<int> perm;
};

/// 0/1 adjacency with zero diagonal; adjacency(i, j) = 1 iff edge i -> j.
struct BinaryGraph {
    int dim = 0;
    IntMatrix adjacency;
};

bool is_permutation(const std::vector<int>& perm);

/// Positions of each variable: result[v] = k with perm[k] == v.
std::vector<int> inverse_permutation(const std::vector<int>& perm);

/// Entrywise check that permuting rows/columns of dag.weights by
/// dag.topo_order leaves zeros on the diagonal and lower triangle.
bool is_strictly_upper_under_order(const Matrix& weights, const std::vector<int>& order);

}  // namespace triopt
