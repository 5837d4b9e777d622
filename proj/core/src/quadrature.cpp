#include "sacfem/quadrature.hpp"

#include <string>

#include "sacfem/errors.hpp"

namespace sacfem {

namespace {

struct RuleBuilder {
    QuadratureRule rule;

    RuleBuilder& centroid(double w) {
        rule.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        rule.weights.push_back(w);
        return *this;
    }

    // Orbit of (1 - 2a, a, a).
    RuleBuilder& orbit3(double w, double a) {
        const double b = 1.0 - 2.0 * a;
        for (const auto& p : {std::array{b, a, a}, std::array{a, b, a}, std::array{a, a, b}}) {
            rule.points.push_back(p);
            rule.weights.push_back(w);
        }
        return *this;
    }

    // Orbit of (a, b, 1 - a - b) under all permutations.
    RuleBuilder& orbit6(double w, double a, double b) {
        const double c = 1.0 - a - b;
        for (const auto& p : {std::array{a, b, c}, std::array{a, c, b}, std::array{b, a, c},
                              std::array{b, c, a}, std::array{c, a, b}, std::array{c, b, a}}) {
            rule.points.push_back(p);
            rule.weights.push_back(w);
        }
        return *this;
    }

    QuadratureRule build(int degree) {
        rule.degree = degree;
        return std::move(rule);
    }
};

}  // namespace

const QuadratureRule& QuadratureRule::degree4() {
    static const QuadratureRule rule = RuleBuilder{}
                                           .orbit3(0.22338158967801146570, 0.44594849091596488632)
                                           .orbit3(0.10995174365532186764, 0.09157621350977074346)
                                           .build(4);
    return rule;
}

const QuadratureRule& QuadratureRule::degree6() {
    static const QuadratureRule rule =
        RuleBuilder{}
            .orbit3(0.11678627572637936603, 0.24928674517091042129)
            .orbit3(0.050844906370206816921, 0.06308901449150222834)
            .orbit6(0.082851075618373575194, 0.053145049844816947353, 0.31035245103378440542)
            .build(6);
    return rule;
}

const QuadratureRule& QuadratureRule::degree8() {
    static const QuadratureRule rule =
        RuleBuilder{}
            .centroid(0.144315607677787)
            .orbit3(0.095091634267285, 0.459292588292723)
            .orbit3(0.103217370534718, 0.170569307751760)
            .orbit3(0.032458497623198, 0.050547228317031)
            .orbit6(0.027230314174435, 0.008394777409958, 0.263112829634638)
            .build(8);
    return rule;
}

const QuadratureRule& QuadratureRule::at_least(int degree) {
    if (degree <= 4) return degree4();
    if (degree <= 6) return degree6();
    if (degree <= 8) return degree8();
    throw InvalidArgument("no tabulated triangle rule of degree " + std::to_string(degree));
}

}  // namespace sacfem
