#include "triopt/types.hpp"

namespace triopt {

bool is_permutation(const std::vector<int>& perm) {
    const int d = static_cast<int>(perm.size());
    std::vector<bool> seen(d, false);
    for (int v : perm) {
        if (v < 0 || v >= d || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

std::vector<int> inverse_permutation(const std::vector<int>& perm) {
    std::vector<int> pos(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) pos[perm[k]] = static_cast<int>(k);
    return pos;
}

bool is_strictly_upper_under_order(const Matrix& weights, const std::vector<int>& order) {
    const int d = static_cast<int>(order.size());
    if (weights.rows() != d || weights.cols() != d) return false;
    for (int p = 0; p < d; ++p) {
        for (int q = 0; q <= p; ++q) {
            if (weights(order[p], order[q]) != 0.0) return false;
        }
    }
    return true;
}

}  // namespace triopt
