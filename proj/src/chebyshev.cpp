#include "hjbqrnet/chebyshev.hpp"

#include <cmath>

namespace hjbqrnet {

ChebyshevGrid chebyshev_diff_matrix(int degree) {
    if (degree < 1) throw ConfigError("chebyshev_diff_matrix: degree must be >= 1");
    const int np = degree + 1;
    ChebyshevGrid grid;
    grid.nodes.resize(np);
    for (int j = 0; j < np; ++j) grid.nodes(j) = std::cos(j * M_PI / degree);

    auto weight = [&](int i) { return (i == 0 || i == degree) ? 2.0 : 1.0; };

    grid.diff = Matrix::Zero(np, np);
    for (int i = 0; i < np; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < np; ++j) {
            if (i == j) continue;
            double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            double d = (weight(i) / weight(j)) * sign / (grid.nodes(i) - grid.nodes(j));
            grid.diff(i, j) = d;
            row_sum += d;
        }
        // negative-sum diagonal: rows annihilate constants exactly
        grid.diff(i, i) = -row_sum;
    }
    return grid;
}

}  // namespace hjbqrnet
