#pragma once

#include "triopt/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace triopt {

enum class PerturbKind { random_shuffle, block_reversal, adjacent_swap, ancestor_swap, hub_swap };

struct PerturbSpec {
    PerturbKind kind = PerturbKind::random_shuffle;
    double fraction = 0.0;  // in [0, 1]; ceil(fraction * d) positions/pairs affected
    std::uint64_t seed = 0;
};

/// What a perturbation actually did, for diagnostics and property tests.
struct PerturbLog {
    // adjacent/ancestor/hub swaps: (position, position) pairs in application order
    std::vector<std::pair<int, int>> swapped_positions;
    // the variables that traded places, aligned with swapped_positions
    std::vector<std::pair<int, int>> swapped_variables;
    int block_start = -1;
    int block_len = 0;
    std::vector<int> shuffled_positions;
};

struct ShdResult {
    int raw = 0;
    double normalized = 0.0;  // raw / (d * (d - 1))
};

/// Nonzero weights become edges.
BinaryGraph binarize(const WeightedDag& dag);

/// Edge operations (add, delete, flip; a flip counts once) turning pred
/// into truth, plus the d(d-1)-normalized value.
ShdResult shd(const BinaryGraph& pred, const BinaryGraph& truth);

/// Directed-edge F1; a true positive requires matching direction. Two empty
/// graphs score 1.
double f1(const BinaryGraph& pred, const BinaryGraph& truth);

/// Number of true edges i -> j that the ordering places i after j, i.e.
/// edges the downstream triangular optimization can no longer recover.
int order_divergence(const CausalOrder& order, const BinaryGraph& truth);

/// Apply one of the five ordering perturbations; the output is always a
/// permutation. fraction outside [0, 1] is rejected.
CausalOrder perturb(const CausalOrder& order, const BinaryGraph& truth, const PerturbSpec& spec,
                    PerturbLog* log = nullptr);

}  // namespace triopt
