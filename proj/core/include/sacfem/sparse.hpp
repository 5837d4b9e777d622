#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace sacfem {

/// Compressed sparse row matrix over doubles. Column indices are strictly
/// increasing within each row. The sparsity pattern is fixed at construction;
/// only values change afterwards.
class CsrMatrix {
public:
    CsrMatrix() = default;
    CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
              std::vector<std::size_t> col_indices, std::vector<double> values);

    // Zero-valued matrix with the pattern given as per-row sorted column lists.
    static CsrMatrix from_rows(std::size_t cols, const std::vector<std::vector<std::size_t>>& row_columns);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    std::span<const std::size_t> row_offsets() const { return row_offsets_; }
    std::span<const std::size_t> col_indices() const { return col_indices_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    // Position of (i, j) in values(), or npos if structurally zero.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t find(std::size_t i, std::size_t j) const;

    double coeff(std::size_t i, std::size_t j) const;
    // Accumulates into an existing structural entry; throws InvalidArgument otherwise.
    void add(std::size_t i, std::size_t j, double value);
    void set_zero();

    bool same_pattern(const CsrMatrix& other) const;
    // this += alpha * other; patterns must match.
    CsrMatrix& axpy(double alpha, const CsrMatrix& other);
    CsrMatrix& scale(double alpha);

    void multiply(std::span<const double> x, std::span<double> y) const;
    Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;

    Eigen::SparseMatrix<double> to_eigen() const;
    Eigen::MatrixXd to_dense() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_offsets_{0};
    std::vector<std::size_t> col_indices_;
    std::vector<double> values_;
};

}  // namespace sacfem
