#ifndef HJBQRNET_CHEBYSHEV_HPP
#define HJBQRNET_CHEBYSHEV_HPP

#include "hjbqrnet/common.hpp"

namespace hjbqrnet {

/// Chebyshev collocation grid on [-1, 1] with its differentiation matrix.
/// Nodes are xi_j = cos(j pi / N), j = 0..N (so N+1 points, xi_0 = 1,
/// xi_N = -1), and D maps function samples to derivative samples.
struct ChebyshevGrid {
    Vector nodes;  // N+1 points, descending from 1 to -1
    Matrix diff;   // (N+1) x (N+1)
};

/// Builds the grid for polynomial degree N (N >= 1; N = 0 is rejected).
/// Rows of D sum to zero exactly (enforced via the negative-sum-of-offdiag
/// diagonal trick).
ChebyshevGrid chebyshev_diff_matrix(int degree);

}  // namespace hjbqrnet

#endif
