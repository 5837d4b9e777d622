#pragma once

#include <array>

#include "sacfem/mesh.hpp"

namespace sacfem {

using Mat2 = std::array<std::array<double, 2>, 2>;

/// Which denominator the bump cutoff uses inside |x| < 0.3.
///   squared_radius: 0.09 - |x|^2 (smooth, compactly supported)
///   literal:        0.0081 - |x|^2 (singular at |x| = 0.09)
enum class BumpDenominator { squared_radius, literal };

struct FieldEval {
    Point2 X{};
    Mat2 gradX{};  // gradX[i][j] = dX_j / dx_i
    Mat2 B{};      // X (x) X
    Point2 b{};    // b_j = grad(X_j) . X
    Point2 divB_minus_b{};
};

/// The noise-carrying field X(x) = phi(x) * (x1 + x2, x1 - x2), with phi a
/// bump supported on |x| < 0.3. All quantities are closed-form.
class NoiseField {
public:
    static constexpr double kCutoffRadius = 0.3;
    static constexpr double kBumpStrength = 0.001;

    explicit NoiseField(BumpDenominator denominator = BumpDenominator::squared_radius)
        : denominator_(denominator) {}

    BumpDenominator denominator() const { return denominator_; }

    double bump(const Point2& x) const;
    FieldEval eval(const Point2& x) const;

private:
    double denominator_constant() const;

    BumpDenominator denominator_;
};

}  // namespace sacfem
