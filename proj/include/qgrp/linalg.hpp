// Exact sparse/dense linear algebra over Q(q).
//
// SVec / SMat are sparse column containers used for module generator actions;
// Dense plus the solver routines handle the per-weight-space systems (Gram
// solves, nullspaces, change of basis).  Every kernel with a data-parallel
// loop exists in a serial reference flavor and an OpenMP flavor selected by
// Exec; results are required to be structurally identical, which the linalg
// tests and the bench tool both exercise.

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qgrp/scalar.hpp"

namespace qgrp {

enum class Exec { serial, omp };

// Process-wide default execution policy (set from the CLI's --parallel flag).
Exec& exec_policy();
// Threads used by omp kernels; 0 means the OpenMP default.
int& exec_threads();

// Sparse vector: entries sorted by index, no stored zeros.
class SVec {
 public:
  SVec() = default;
  static SVec unit(int i, RatFn c = RatFn::one());

  bool is_zero() const { return e_.empty(); }
  int nnz() const { return static_cast<int>(e_.size()); }
  RatFn at(int i) const;
  const std::vector<std::pair<int, RatFn>>& entries() const { return e_; }

  // Construction helper: entries may arrive unsorted/duplicated.
  static SVec from_entries(std::vector<std::pair<int, RatFn>> raw);

  SVec operator+(const SVec& o) const;
  SVec operator-(const SVec& o) const;
  SVec scaled(const RatFn& c) const;
  SVec& add_scaled(const RatFn& c, const SVec& o);  // *this += c*o
  SVec bar() const;  // coefficientwise bar
  bool operator==(const SVec& o) const { return e_ == o.e_; }
  bool operator!=(const SVec& o) const { return !(*this == o); }

  // leading entry = smallest index
  int lead_index() const { return e_.front().first; }
  const RatFn& lead_coeff() const { return e_.front().second; }

 private:
  std::vector<std::pair<int, RatFn>> e_;
};

RatFn dot(const SVec& a, const SVec& b);

// Sparse matrix stored by columns.
class SMat {
 public:
  SMat() : rows_(0) {}
  SMat(int rows, int cols) : rows_(rows), col_(cols) {}
  static SMat identity(int n);
  static SMat diagonal(const std::vector<RatFn>& d);

  int rows() const { return rows_; }
  int cols() const { return static_cast<int>(col_.size()); }
  const SVec& column(int j) const { return col_[j]; }
  void set_column(int j, SVec v) { col_[j] = std::move(v); }
  void set(int r, int c, const RatFn& v);
  RatFn at(int r, int c) const { return col_[c].at(r); }
  bool is_zero() const;

  SVec apply(const SVec& v) const;  // matrix * column vector
  SMat operator+(const SMat& o) const;
  SMat operator-(const SMat& o) const;
  SMat scaled(const RatFn& c) const;
  bool operator==(const SMat& o) const {
    return rows_ == o.rows_ && col_ == o.col_;
  }
  bool operator!=(const SMat& o) const { return !(*this == o); }

  SMat transpose() const;
  SMat bar() const;  // entrywise q -> q^{-1}

 private:
  int rows_;
  std::vector<SVec> col_;
};

// this * o, parallel over output columns under Exec::omp.
SMat compose(const SMat& a, const SMat& b, Exec ex = exec_policy());
// apply a to each vector, parallel over vectors under Exec::omp.
std::vector<SVec> apply_many(const SMat& a, const std::vector<SVec>& vs,
                             Exec ex = exec_policy());

// Dense row-major matrix for per-weight-space solves.
struct Dense {
  int rows = 0, cols = 0;
  std::vector<RatFn> a;
  Dense() = default;
  Dense(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}
  RatFn& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  const RatFn& at(int r, int c) const {
    return a[static_cast<size_t>(r) * cols + c];
  }
};

// In-place reduced row echelon form; returns pivot column list.
// Row eliminations run in parallel under Exec::omp.
std::vector<int> rref(Dense& m, Exec ex = exec_policy());

// Basis of the right nullspace of m (each vector dense, length m.cols).
std::vector<std::vector<RatFn>> nullspace(Dense m, Exec ex = exec_policy());

// Solve a x = b for square invertible a with any number of right-hand sides;
// returns x column-per-rhs.  Throws std::logic_error when singular.
std::vector<std::vector<RatFn>> solve_square(
    Dense a, const std::vector<std::vector<RatFn>>& rhs,
    Exec ex = exec_policy());

// Incremental span with expression tracking: keeps a row-reduced basis of
// everything added, remembers how each reduced row decomposes over the kept
// originals, and can express arbitrary vectors over the kept originals.
class SpanBuilder {
 public:
  explicit SpanBuilder(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(rows_.size()); }

  // Returns true (and keeps v as basis member) when the rank grows.
  bool add(const SVec& v);
  // Coefficients over the kept originals, in insertion order; nullopt when
  // v is outside the span.
  std::optional<std::vector<RatFn>> express(const SVec& v) const;
  bool contains(const SVec& v) const;

 private:
  struct Row {
    SVec v;                    // reduced vector, pivot coefficient 1
    std::vector<RatFn> expr;   // v = sum expr[k] * kept_original[k]
  };
  int dim_;
  std::vector<Row> rows_;  // sorted by pivot index
};

}  // namespace qgrp
