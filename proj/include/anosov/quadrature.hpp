#pragma once

#include <vector>

namespace anosov {

struct GaussLegendreRule {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule; rules are computed once and cached.
[[nodiscard]] const GaussLegendreRule& gauss_legendre(int n);

}  // namespace anosov
