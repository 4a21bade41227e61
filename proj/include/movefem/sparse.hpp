// Compressed-row sparse matrix built from assembly triplets.
#pragma once

#include "movefem/common.hpp"

#include <algorithm>
#include <cmath>

namespace movefem {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

class CsrMatrix {
 public:
  CsrMatrix() = default;

  static CsrMatrix from_triplets(int n_rows, int n_cols, std::vector<Triplet>& trips) {
    std::sort(trips.begin(), trips.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m;
    m.rows_ = n_rows;
    m.cols_ = n_cols;
    m.row_offsets_.assign(n_rows + 1, 0);
    for (size_t i = 0; i < trips.size();) {
      size_t j = i;
      double v = 0;
      while (j < trips.size() && trips[j].row == trips[i].row && trips[j].col == trips[i].col)
        v += trips[j++].value;
      m.col_indices_.push_back(trips[i].col);
      m.values_.push_back(v);
      ++m.row_offsets_[trips[i].row + 1];
      i = j;
    }
    for (int r = 0; r < n_rows; ++r) m.row_offsets_[r + 1] += m.row_offsets_[r];
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nnz() const { return static_cast<int>(values_.size()); }
  const std::vector<int>& row_offsets() const { return row_offsets_; }
  const std::vector<int>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  Vector apply(const Vector& x) const {
    Vector y = Vector::Zero(rows_);
    for (int r = 0; r < rows_; ++r)
      for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
        y[r] += values_[k] * x[col_indices_[k]];
    return y;
  }

  double coeff(int r, int c) const {
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
      if (col_indices_[k] == c) return values_[k];
    return 0.0;
  }

  // max |A - A^T| entry, for symmetry checks
  double asymmetry() const {
    double a = 0;
    for (int r = 0; r < rows_; ++r)
      for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
        a = std::max(a, std::abs(values_[k] - coeff(col_indices_[k], r)));
    return a;
  }

  Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
      for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
        D(r, col_indices_[k]) += values_[k];
    return D;
  }

  // Symmetric elimination of Dirichlet rows/columns: constrained rows and
  // columns are zeroed, the diagonal set to one, and the right-hand side
  // adjusted so the solution carries the boundary value exactly.
  void apply_dirichlet(Vector& rhs, const std::vector<std::uint8_t>& constrained,
                       double boundary_value = 0.0) {
    for (int r = 0; r < rows_; ++r) {
      if (constrained[r]) continue;
      for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
        const int c = col_indices_[k];
        if (constrained[c]) {
          rhs[r] -= values_[k] * boundary_value;
          values_[k] = 0.0;
        }
      }
    }
    for (int r = 0; r < rows_; ++r) {
      if (!constrained[r]) continue;
      bool diag = false;
      for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
        const bool d = (col_indices_[k] == r);
        values_[k] = d ? 1.0 : 0.0;
        diag = diag || d;
      }
      if (!diag) throw Error("apply_dirichlet: constrained row without diagonal entry");
      rhs[r] = boundary_value;
    }
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_offsets_;
  std::vector<int> col_indices_;
  std::vector<double> values_;
};

// alpha * A + beta * B
inline CsrMatrix csr_add(const CsrMatrix& A, double alpha, const CsrMatrix& B, double beta) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) throw Error("csr_add: dimension mismatch");
  std::vector<Triplet> trips;
  trips.reserve(A.nnz() + B.nnz());
  for (int r = 0; r < A.rows(); ++r)
    for (int k = A.row_offsets()[r]; k < A.row_offsets()[r + 1]; ++k)
      trips.push_back({r, A.col_indices()[k], alpha * A.values()[k]});
  for (int r = 0; r < B.rows(); ++r)
    for (int k = B.row_offsets()[r]; k < B.row_offsets()[r + 1]; ++k)
      trips.push_back({r, B.col_indices()[k], beta * B.values()[k]});
  return CsrMatrix::from_triplets(A.rows(), A.cols(), trips);
}

}  // namespace movefem
