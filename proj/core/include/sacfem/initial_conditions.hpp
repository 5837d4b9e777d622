#pragma once

#include <string>

#include "sacfem/assembly.hpp"
#include "sacfem/mesh.hpp"

namespace sacfem {

struct EllipseDistance {
    double distance = 0.0;  // signed: positive outside, negative inside
    bool used_fallback = false;
};

/// Signed distance to the axis-aligned ellipse x^2/a^2 + y^2/b^2 = 1 (a >= b).
/// Newton on the closest-point equation converged to 1e-12; dense angular
/// sampling is used if Newton stalls.
EllipseDistance ellipse_signed_distance(const Point2& p, double a, double b);

// tanh(d(x) / (sqrt(2) eps)) with d the signed distance to x^2/0.04 + y^2/0.01 = 1.
double init_test1(const Point2& x, double epsilon);

// Dumbbell initial state u1(3 x1, 3 x2), branches tried in the listed order.
// Throws EvaluationError at points no branch covers.
double init_test2(const Point2& x, double epsilon);

// tanh((|x| - radius) / (sqrt(2) eps)): -1 inside the circle, +1 outside.
double init_circle(const Point2& x, double radius, double epsilon);

struct InitialCondition {
    enum class Kind { test1, test2, constant, circle, custom };

    Kind kind = Kind::test1;
    double value = 1.0;    // constant
    double radius = 0.25;  // circle
    ScalarFunction custom;  // expression hook, not serializable

    double operator()(const Point2& x, double epsilon) const;
    std::string name() const;
    static Kind parse_kind(const std::string& name);
};

// P_h u0 (L2 projection); constants are reproduced exactly.
NodalField project_initial_condition(const Mesh& mesh, const InitialCondition& ic, double epsilon);

}  // namespace sacfem
