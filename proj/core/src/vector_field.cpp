#include "sacfem/vector_field.hpp"

#include <cmath>

namespace sacfem {

double NoiseField::denominator_constant() const {
    const double r2 = kCutoffRadius * kCutoffRadius;
    return denominator_ == BumpDenominator::squared_radius ? r2 : r2 * r2;
}

double NoiseField::bump(const Point2& x) const {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    if (r2 >= kCutoffRadius * kCutoffRadius) {
        return 0.0;
    }
    return std::exp(-kBumpStrength / (denominator_constant() - r2));
}

FieldEval NoiseField::eval(const Point2& x) const {
    FieldEval out;
    const double r2 = x[0] * x[0] + x[1] * x[1];
    if (r2 >= kCutoffRadius * kCutoffRadius) {
        return out;
    }
    const double denom = denominator_constant() - r2;
    const double phi = std::exp(-kBumpStrength / denom);
    // grad(phi) = phi * (-2 * strength * x) / denom^2
    const double scale = phi * (-2.0 * kBumpStrength) / (denom * denom);
    const Point2 grad_phi{scale * x[0], scale * x[1]};

    const Point2 v{x[0] + x[1], x[0] - x[1]};
    // dv_j/dx_i: v1 = x1 + x2, v2 = x1 - x2
    constexpr Mat2 grad_v{{{1.0, 1.0}, {1.0, -1.0}}};

    out.X = {phi * v[0], phi * v[1]};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out.gradX[i][j] = grad_phi[i] * v[j] + phi * grad_v[i][j];
            out.B[i][j] = out.X[i] * out.X[j];
        }
    }
    for (int j = 0; j < 2; ++j) {
        out.b[j] = out.gradX[0][j] * out.X[0] + out.gradX[1][j] * out.X[1];
    }
    // div v = 0, so div X = grad(phi) . v
    const double div_x = grad_phi[0] * v[0] + grad_phi[1] * v[1];
    out.divB_minus_b = {div_x * out.X[0], div_x * out.X[1]};
    return out;
}

}  // namespace sacfem
