#pragma once

#include <array>
#include <vector>

namespace sacfem {

/// Symmetric quadrature on a triangle in barycentric coordinates. Weights sum
/// to 1; multiply by the element area at the use site.
struct QuadratureRule {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
    int degree = 0;

    std::size_t size() const { return weights.size(); }

    // Strang-Fix / Dunavant rules: 6 points (degree 4), 12 (degree 6), 16 (degree 8).
    static const QuadratureRule& degree4();
    static const QuadratureRule& degree6();
    static const QuadratureRule& degree8();

    // Smallest tabulated rule exact to at least `degree` (<= 8).
    static const QuadratureRule& at_least(int degree);
};

}  // namespace sacfem
