#include <gtest/gtest.h>

#include <cmath>

#include "sacfem/quadrature.hpp"

using namespace sacfem;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Integral of x^p y^q over the reference triangle (0,0),(1,0),(0,1).
double monomial_exact(int p, int q) { return factorial(p) * factorial(q) / factorial(p + q + 2); }

void check_exactness(const QuadratureRule& rule, double tol) {
    double wsum = 0.0;
    for (double w : rule.weights) {
        EXPECT_GT(w, 0.0);
        wsum += w;
    }
    EXPECT_NEAR(wsum, 1.0, 1e-15);
    for (const auto& bc : rule.points) EXPECT_NEAR(bc[0] + bc[1] + bc[2], 1.0, 1e-15);
    for (int p = 0; p <= rule.degree; ++p) {
        for (int q = 0; p + q <= rule.degree; ++q) {
            double sum = 0.0;
            for (std::size_t k = 0; k < rule.size(); ++k) {
                const double x = rule.points[k][1], y = rule.points[k][2];
                sum += rule.weights[k] * 0.5 * std::pow(x, p) * std::pow(y, q);
            }
            EXPECT_NEAR(sum, monomial_exact(p, q), tol) << "degree " << rule.degree << " x^" << p << " y^" << q;
        }
    }
}

}  // namespace

TEST(Quadrature, Degree4Exact) {
    EXPECT_EQ(QuadratureRule::degree4().size(), 6u);
    check_exactness(QuadratureRule::degree4(), 1e-14);
}

TEST(Quadrature, Degree6Exact) { check_exactness(QuadratureRule::degree6(), 1e-14); }

TEST(Quadrature, Degree8Exact) {
    EXPECT_EQ(QuadratureRule::degree8().size(), 16u);
    check_exactness(QuadratureRule::degree8(), 1e-14);
}

TEST(Quadrature, Degree4NotExactForDegree6) {
    const auto& rule = QuadratureRule::degree4();
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) sum += rule.weights[k] * 0.5 * std::pow(rule.points[k][1], 6);
    EXPECT_GT(std::abs(sum - monomial_exact(6, 0)), 1e-8);
}

TEST(Quadrature, AtLeast) {
    EXPECT_EQ(QuadratureRule::at_least(1).degree, 4);
    EXPECT_EQ(QuadratureRule::at_least(5).degree, 6);
    EXPECT_EQ(QuadratureRule::at_least(8).degree, 8);
    EXPECT_ANY_THROW(QuadratureRule::at_least(9));
}
