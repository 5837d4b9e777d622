#include "sacfem/initial_conditions.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "sacfem/errors.hpp"

namespace sacfem {

namespace {

constexpr double kEllipseA = 0.2;
constexpr double kEllipseB = 0.1;

double profile(double signed_distance, double epsilon) {
    return std::tanh(signed_distance / (std::numbers::sqrt2 * epsilon));
}

// Distance from (y0, y1), both >= 0, to the ellipse by brute-force sampling
// of the first-quadrant arc followed by golden-section refinement.
double sampled_distance(double y0, double y1, double a, double b) {
    auto dist = [&](double theta) { return std::hypot(a * std::cos(theta) - y0, b * std::sin(theta) - y1); };
    constexpr int kSamples = 20000;
    const double half_pi = 0.5 * std::numbers::pi;
    int best = 0;
    double best_d = dist(0.0);
    for (int i = 1; i <= kSamples; ++i) {
        const double d = dist(half_pi * i / kSamples);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    double lo = half_pi * std::max(best - 1, 0) / kSamples;
    double hi = half_pi * std::min(best + 1, kSamples) / kSamples;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 100; ++it) {
        const double m1 = hi - g * (hi - lo);
        const double m2 = lo + g * (hi - lo);
        if (dist(m1) < dist(m2)) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    return std::min(best_d, dist(0.5 * (lo + hi)));
}

}  // namespace

EllipseDistance ellipse_signed_distance(const Point2& p, double a, double b) {
    if (!(a >= b && b > 0.0)) throw InvalidArgument("ellipse_signed_distance: need a >= b > 0");
    const double y0 = std::abs(p[0]);
    const double y1 = std::abs(p[1]);
    EllipseDistance out;
    double d = 0.0;
    if (y1 > 0.0) {
        if (y0 > 0.0) {
            // Closest point (a^2 y0 / (s + c), b^2 y1 / s) with s = t + b^2,
            // c = a^2 - b^2, where F(s) = (a y0 / (s + c))^2 + (b y1 / s)^2 - 1 = 0.
            // F is convex and decreasing on s > 0; Newton from the left of
            // the root increases monotonically. Iterating on s avoids the
            // cancellation in t + b^2 near the major axis.
            const double ay = a * y0;
            const double by = b * y1;
            const double c = a * a - b * b;
            double sv = by;
            bool converged = false;
            for (int it = 0; it < 200; ++it) {
                const double r0 = ay / (sv + c);
                const double r1 = by / sv;
                const double f = r0 * r0 + r1 * r1 - 1.0;
                const double df = -2.0 * (r0 * r0 / (sv + c) + r1 * r1 / sv);
                const double ds = -f / df;
                if (!std::isfinite(ds)) break;
                sv += ds;
                if (ds <= 1e-15 * sv) {
                    converged = true;
                    break;
                }
            }
            if (converged) {
                const double x0 = a * a * y0 / (sv + c);
                const double x1 = b * b * y1 / sv;
                d = std::hypot(x0 - y0, x1 - y1);
            } else {
                d = sampled_distance(y0, y1, a, b);
                out.used_fallback = true;
            }
        } else {
            d = std::abs(y1 - b);
        }
    } else {
        const double focal = (a * a - b * b) / a;
        if (y0 < focal) {
            const double x0 = a * a * y0 / (a * a - b * b);
            const double x1 = b * std::sqrt(std::max(0.0, 1.0 - (x0 / a) * (x0 / a)));
            d = std::hypot(x0 - y0, x1);
        } else {
            d = std::abs(y0 - a);
        }
    }
    const double level = (p[0] / a) * (p[0] / a) + (p[1] / b) * (p[1] / b);
    out.distance = level < 1.0 ? -d : d;
    return out;
}

double init_test1(const Point2& x, double epsilon) {
    return profile(ellipse_signed_distance(x, kEllipseA, kEllipseB).distance, epsilon);
}

double init_test2(const Point2& x, double epsilon) {
    const double x1 = 3.0 * x[0];
    const double x2 = 3.0 * x[1];
    // NaN from a negative radicand makes every comparison involving it false.
    const double psi1 = (-1.0 + std::sqrt(0.8 * x2 + 0.04)) / 2.0;
    const double psi2 = (1.0 - std::sqrt(1.92 * x2 + 0.2304)) / 2.0;
    const double psi3 = (-1.0 + std::sqrt(-0.8 * x2 + 0.04)) / 2.0;
    const double psi4 = (1.0 - std::sqrt(-1.92 * x2 + 0.2304)) / 2.0;
    const double psi5_arg = (1.0 - 0.2451 * x2 * x2) / 0.0049;
    auto psi5 = [&] {
        if (psi5_arg < 0.0) {
            std::ostringstream msg;
            msg << "init_test2: negative radicand in psi5 at (" << x[0] << ", " << x[1] << ")";
            throw EvaluationError(msg.str());
        }
        return -std::sqrt(psi5_arg);
    };
    auto u = [&](double d) { return profile(d, epsilon); };
    const double right_lobe = std::sqrt((x1 - 0.5) * (x1 - 0.5) + x2 * x2) - 0.39;
    const double left_lobe = std::sqrt((x1 + 0.5) * (x1 + 0.5) + x2 * x2) - 0.25;
    const bool neck = -0.3 <= x1 && x1 <= 0.14;

    if (x1 > 0.14 && 0.0 <= x2 && x2 < -5.0 / 12.0 * (x1 - 0.5)) {
        return u(-std::sqrt((x1 - 0.14) * (x1 - 0.14) + (x2 - 0.15) * (x2 - 0.15)));
    }
    if (x1 > 0.14 && 5.0 / 12.0 * (x1 - 0.5) < x2 && x2 < 0.0) {
        return u(-std::sqrt((x1 - 0.14) * (x1 - 0.14) + (x2 + 0.15) * (x2 + 0.15)));
    }
    if (x1 < -0.3 && 0.0 <= x2 && x2 < 3.0 / 4.0 * (x1 + 0.5)) {
        return u(-std::sqrt((x1 + 0.3) * (x1 + 0.3) + (x2 - 0.15) * (x2 - 0.15)));
    }
    if (x1 < -0.3 && -3.0 / 4.0 * (x1 + 0.5) < x2 && x2 < 0.0) {
        return u(-std::sqrt((x1 + 0.3) * (x1 + 0.3) + (x2 + 0.15) * (x2 + 0.15)));
    }
    if (x1 > 0.14 && (x2 >= -5.0 / 12.0 * (x1 - 0.5) || x2 <= 5.0 / 12.0 * (x1 - 0.5))) {
        return u(right_lobe);
    }
    if (x1 < -0.3 && (x2 >= -3.0 / 4.0 * (x1 + 0.5) || x2 <= -3.0 / 4.0 * (x1 + 0.5))) {
        return u(left_lobe);
    }
    if (neck && psi1 <= x1 && x1 <= psi2 && psi3 <= x1 && x1 <= psi4) {
        return u(std::abs(x2) - 0.15);
    }
    if (neck && x1 >= psi2 && x1 >= psi5()) return u(right_lobe);
    if (neck && x1 >= psi4 && x1 >= psi5()) return u(right_lobe);
    if (neck && x1 <= psi1 && x1 <= psi5()) return u(left_lobe);
    if (neck && x1 <= psi3 && x1 <= psi5()) return u(left_lobe);

    std::ostringstream msg;
    msg << "init_test2: no branch of the piecewise definition covers (" << x[0] << ", " << x[1] << ")";
    throw EvaluationError(msg.str());
}

double init_circle(const Point2& x, double radius, double epsilon) {
    return profile(std::hypot(x[0], x[1]) - radius, epsilon);
}

double InitialCondition::operator()(const Point2& x, double epsilon) const {
    switch (kind) {
        case Kind::test1:
            return init_test1(x, epsilon);
        case Kind::test2:
            return init_test2(x, epsilon);
        case Kind::constant:
            return value;
        case Kind::circle:
            return init_circle(x, radius, epsilon);
        case Kind::custom:
            if (!custom) throw InvalidArgument("custom initial condition has no function");
            return custom(x);
    }
    throw InvalidArgument("unknown initial condition kind");
}

std::string InitialCondition::name() const {
    switch (kind) {
        case Kind::test1:
            return "test1";
        case Kind::test2:
            return "test2";
        case Kind::constant:
            return "constant";
        case Kind::circle:
            return "circle";
        case Kind::custom:
            return "custom";
    }
    return "unknown";
}

InitialCondition::Kind InitialCondition::parse_kind(const std::string& name) {
    if (name == "test1") return Kind::test1;
    if (name == "test2") return Kind::test2;
    if (name == "constant") return Kind::constant;
    if (name == "circle") return Kind::circle;
    throw InvalidArgument("unknown initial condition '" + name + "' (expected test1, test2, constant, circle)");
}

NodalField project_initial_condition(const Mesh& mesh, const InitialCondition& ic, double epsilon) {
    if (ic.kind == InitialCondition::Kind::constant) {
        return NodalField::Constant(static_cast<Eigen::Index>(mesh.num_vertices()), ic.value);
    }
    return l2_project(mesh, [&](const Point2& x) { return ic(x, epsilon); });
}

}  // namespace sacfem
