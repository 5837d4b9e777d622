#include "sacfem/sparse.hpp"

#include <algorithm>
#include <string>

#include "sacfem/errors.hpp"

namespace sacfem {

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
                     std::vector<std::size_t> col_indices, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
    if (row_offsets_.size() != rows_ + 1 || row_offsets_.front() != 0 || row_offsets_.back() != col_indices_.size() ||
        col_indices_.size() != values_.size()) {
        throw InvalidArgument("CsrMatrix: inconsistent storage sizes");
    }
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
            if (col_indices_[k] >= cols_ || (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1])) {
                throw InvalidArgument("CsrMatrix: column indices must be in range and strictly increasing in row " +
                                      std::to_string(i));
            }
        }
    }
}

CsrMatrix CsrMatrix::from_rows(std::size_t cols, const std::vector<std::vector<std::size_t>>& row_columns) {
    std::vector<std::size_t> offsets{0};
    offsets.reserve(row_columns.size() + 1);
    std::vector<std::size_t> indices;
    for (const auto& row : row_columns) {
        indices.insert(indices.end(), row.begin(), row.end());
        offsets.push_back(indices.size());
    }
    std::vector<double> values(indices.size(), 0.0);
    return CsrMatrix(row_columns.size(), cols, std::move(offsets), std::move(indices), std::move(values));
}

std::size_t CsrMatrix::find(std::size_t i, std::size_t j) const {
    if (i >= rows_) return npos;
    const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
    const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return npos;
    return static_cast<std::size_t>(it - col_indices_.begin());
}

double CsrMatrix::coeff(std::size_t i, std::size_t j) const {
    const std::size_t k = find(i, j);
    return k == npos ? 0.0 : values_[k];
}

void CsrMatrix::add(std::size_t i, std::size_t j, double value) {
    const std::size_t k = find(i, j);
    if (k == npos) {
        throw InvalidArgument("CsrMatrix::add: (" + std::to_string(i) + ", " + std::to_string(j) +
                              ") is not in the sparsity pattern");
    }
    values_[k] += value;
}

void CsrMatrix::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

bool CsrMatrix::same_pattern(const CsrMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && row_offsets_ == other.row_offsets_ &&
           col_indices_ == other.col_indices_;
}

CsrMatrix& CsrMatrix::axpy(double alpha, const CsrMatrix& other) {
    if (!same_pattern(other)) {
        throw InvalidArgument("CsrMatrix::axpy: sparsity patterns differ");
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
        values_[k] += alpha * other.values_[k];
    }
    return *this;
}

CsrMatrix& CsrMatrix::scale(double alpha) {
    for (double& v : values_) v *= alpha;
    return *this;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != cols_ || y.size() != rows_) {
        throw InvalidArgument("CsrMatrix::multiply: dimension mismatch");
    }
    for (std::size_t i = 0; i < rows_; ++i) {
        double sum = 0.0;
        for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
            sum += values_[k] * x[col_indices_[k]];
        }
        y[i] = sum;
    }
}

Eigen::VectorXd CsrMatrix::operator*(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows_));
    multiply(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
             std::span<double>(y.data(), rows_));
    return y;
}

Eigen::SparseMatrix<double> CsrMatrix::to_eigen() const {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(values_.size());
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
            triplets.emplace_back(static_cast<int>(i), static_cast<int>(col_indices_[k]), values_[k]);
        }
    }
    Eigen::SparseMatrix<double> out(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

Eigen::MatrixXd CsrMatrix::to_dense() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col_indices_[k])) = values_[k];
        }
    }
    return out;
}

}  // namespace sacfem
