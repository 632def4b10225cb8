#pragma once

#include "triopt/types.hpp"

#include <cstdint>

namespace triopt {

/// Erdos-Renyi DAG skeleton (weights in {0,1}). A random permutation fixes
/// the ancestral order, then each forward pair carries an edge with
/// probability 2*(degree*d)/(d^2-d), clamped to 1, so the expected edge
/// count is degree*d.
WeightedDag gen_er_dag(int d, int degree, std::uint64_t seed);

/// Scale-free DAG skeleton via Barabasi-Albert preferential attachment.
/// Node t attaches min(t, k) edges to distinct earlier nodes; edges point
/// from the attached (earlier) node to the newcomer, so the arrival order
/// 0..d-1 is the topological order.
WeightedDag gen_sf_dag(int d, int k, std::uint64_t seed);

/// Replace each unit entry of the skeleton with an independent uniform draw
/// from scale * ([-2,-0.5] u [0.5,2]); zeros stay zero.
WeightedDag sample_weights(const WeightedDag& skeleton, double scale, std::uint64_t seed);

/// Draw n i.i.d. rows of the linear SEM x_i = sum_j B(j,i) x_j + eps_i by
/// evaluating variables in topological order. Gumbel and exponential noise
/// are location-shifted to zero mean; each variable's noise comes from its
/// own sub-stream. The result is not centered.
DataMatrix sample_sem(const WeightedDag& dag, int n, const NoiseSpec& noise, std::uint64_t seed);

}  // namespace triopt
