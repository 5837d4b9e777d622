#include <gtest/gtest.h>

#include <vector>

#include "sacfem/errors.hpp"
#include "sacfem/sparse.hpp"

using namespace sacfem;

namespace {

CsrMatrix small() {
    // [1 0 2]
    // [0 3 0]
    // [4 0 5]
    return CsrMatrix(3, 3, {0, 2, 3, 5}, {0, 2, 1, 0, 2}, {1, 2, 3, 4, 5});
}

}  // namespace

TEST(CsrMatrix, Construction) {
    auto m = small();
    EXPECT_EQ(m.rows(), 3u);
    EXPECT_EQ(m.cols(), 3u);
    EXPECT_EQ(m.nnz(), 5u);
    EXPECT_EQ(m.coeff(0, 2), 2.0);
    EXPECT_EQ(m.coeff(0, 1), 0.0);
    EXPECT_EQ(m.find(1, 0), CsrMatrix::npos);
}

TEST(CsrMatrix, RejectsUnsortedColumns) {
    EXPECT_THROW(CsrMatrix(1, 3, {0, 2}, {2, 0}, {1, 1}), InvalidArgument);
    EXPECT_THROW(CsrMatrix(1, 3, {0, 2}, {1, 1}, {1, 1}), InvalidArgument);
    EXPECT_THROW(CsrMatrix(1, 3, {0, 1}, {3}, {1}), InvalidArgument);
    EXPECT_THROW(CsrMatrix(2, 3, {0, 1}, {0}, {1}), InvalidArgument);
}

TEST(CsrMatrix, MultiplyMatchesDense) {
    auto m = small();
    Eigen::VectorXd x(3);
    x << 1.0, -2.0, 0.5;
    const Eigen::VectorXd y = m * x;
    const Eigen::VectorXd ref = m.to_dense() * x;
    EXPECT_DOUBLE_EQ((y - ref).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_DOUBLE_EQ(y[0], 2.0);
    EXPECT_DOUBLE_EQ(y[1], -6.0);
    EXPECT_DOUBLE_EQ(y[2], 6.5);
    const Eigen::VectorXd via_eigen = m.to_eigen() * x;
    EXPECT_LE((via_eigen - ref).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CsrMatrix, AddOnlyInsidePattern) {
    auto m = small();
    m.add(1, 1, 2.0);
    EXPECT_EQ(m.coeff(1, 1), 5.0);
    EXPECT_THROW(m.add(1, 0, 1.0), InvalidArgument);
}

TEST(CsrMatrix, AxpyAndScale) {
    auto a = small();
    auto b = small();
    a.axpy(2.0, b).scale(0.5);
    for (std::size_t k = 0; k < a.nnz(); ++k) EXPECT_DOUBLE_EQ(a.values()[k], 1.5 * b.values()[k]);
    auto c = CsrMatrix::from_rows(3, {{0}, {1}, {2}});
    EXPECT_FALSE(a.same_pattern(c));
    EXPECT_THROW(a.axpy(1.0, c), InvalidArgument);
}

TEST(CsrMatrix, FromRowsZeroValued) {
    auto m = CsrMatrix::from_rows(4, {{0, 3}, {}, {1, 2, 3}});
    EXPECT_EQ(m.rows(), 3u);
    EXPECT_EQ(m.cols(), 4u);
    EXPECT_EQ(m.nnz(), 5u);
    for (double v : m.values()) EXPECT_EQ(v, 0.0);
    m.add(2, 2, 1.0);
    m.set_zero();
    EXPECT_EQ(m.coeff(2, 2), 0.0);
}
