/// @file matrix.hpp
/// @brief Dense matrices of exact symbolic entries with cofactor determinant
///        and 3x3 adjugate.
#pragma once

#include <stdexcept>
#include <vector>

#include "macrolab/sym/expr.hpp"

namespace macrolab::sym {

// ============================================================
// SymMatrix
// ============================================================

class SymMatrix {
 public:
  SymMatrix() = default;
  SymMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}

  static SymMatrix identity(int n) {
    SymMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = SymExpr::one();
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  SymExpr& at(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const SymExpr& at(int i, int j) const {
    return a_[static_cast<size_t>(i) * cols_ + j];
  }

  friend SymMatrix operator*(const SymMatrix& x, const SymMatrix& y) {
    if (x.cols_ != y.rows_) throw std::invalid_argument("SymMatrix: mul shape");
    SymMatrix r(x.rows_, y.cols_);
    for (int i = 0; i < x.rows_; ++i)
      for (int j = 0; j < y.cols_; ++j) {
        SymExpr s;
        for (int k = 0; k < x.cols_; ++k) s += x.at(i, k) * y.at(k, j);
        r.at(i, j) = std::move(s);
      }
    return r;
  }
  friend SymMatrix operator+(const SymMatrix& x, const SymMatrix& y) {
    if (x.rows_ != y.rows_ || x.cols_ != y.cols_)
      throw std::invalid_argument("SymMatrix: add shape");
    SymMatrix r = x;
    for (size_t k = 0; k < r.a_.size(); ++k) r.a_[k] += y.a_[k];
    return r;
  }
  friend SymMatrix operator-(const SymMatrix& x, const SymMatrix& y) {
    if (x.rows_ != y.rows_ || x.cols_ != y.cols_)
      throw std::invalid_argument("SymMatrix: sub shape");
    SymMatrix r = x;
    for (size_t k = 0; k < r.a_.size(); ++k) r.a_[k] -= y.a_[k];
    return r;
  }
  friend SymMatrix operator*(const SymExpr& s, const SymMatrix& x) {
    SymMatrix r = x;
    for (auto& e : r.a_) e = s * e;
    return r;
  }

  SymMatrix transpose() const {
    SymMatrix r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
  }

  /// Keeps the listed rows (all columns).
  SymMatrix select_rows(const std::vector<int>& rows) const {
    SymMatrix r(static_cast<int>(rows.size()), cols_);
    for (int i = 0; i < (int)rows.size(); ++i)
      for (int j = 0; j < cols_; ++j) r.at(i, j) = at(rows[i], j);
    return r;
  }

  /// Cofactor (Laplace) determinant; intended for n <= 4.
  SymExpr det() const {
    if (rows_ != cols_) throw std::invalid_argument("SymMatrix: det shape");
    return det_rec(*this);
  }

  /// Rows joined as "[e, e, ...]; [...]" for reports and logs.
  std::string str() const {
    std::string out;
    for (int i = 0; i < rows_; ++i) {
      if (i) out += "; ";
      out += "[";
      for (int j = 0; j < cols_; ++j) {
        if (j) out += ", ";
        out += at(i, j).str();
      }
      out += "]";
    }
    return out;
  }

  /// Transposed cofactor matrix; 3x3 only. Satisfies m*adj(m) = det(m)*I.
  SymMatrix adjugate() const {
    if (rows_ != 3 || cols_ != 3)
      throw std::invalid_argument("SymMatrix: adjugate needs 3x3");
    SymMatrix r(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        int r0 = (i + 1) % 3, r1 = (i + 2) % 3;
        int c0 = (j + 1) % 3, c1 = (j + 2) % 3;
        // Cyclic index choice bakes in the (-1)^(i+j) sign.
        r.at(j, i) = at(r0, c0) * at(r1, c1) - at(r0, c1) * at(r1, c0);
      }
    return r;
  }

 private:
  static SymExpr det_rec(const SymMatrix& m) {
    int n = m.rows_;
    if (n == 1) return m.at(0, 0);
    if (n == 2)
      return m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0);
    SymExpr d;
    for (int j = 0; j < n; ++j) {
      if (m.at(0, j).is_zero()) continue;
      SymMatrix minor(n - 1, n - 1);
      for (int i = 1; i < n; ++i) {
        int cc = 0;
        for (int c = 0; c < n; ++c) {
          if (c == j) continue;
          minor.at(i - 1, cc++) = m.at(i, c);
        }
      }
      SymExpr t = m.at(0, j) * det_rec(minor);
      if (j % 2)
        d -= t;
      else
        d += t;
    }
    return d;
  }

  int rows_ = 0, cols_ = 0;
  std::vector<SymExpr> a_;
};

}  // namespace macrolab::sym
