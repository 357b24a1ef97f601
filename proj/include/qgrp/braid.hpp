// Braid-group operators on integrable modules: the rank-one string closed
// form, compositions along Weyl words, lazy materialization with exact
// inverses, and the i-string decomposition they are built from.

#pragma once

#include "qgrp/rep.hpp"

namespace qgrp {

// One i-string summand of a vector: the contribution F_i^{(k)} top with
// E_i top = 0 and n = <h_i, wt top> (the string length through top).
struct IStringPart {
  int k = 0;
  int n = 0;
  SVec top;
};

// Decompose v = sum_parts F_i^{(k)} top; only nonzero parts are returned.
// The input may be weight-inhomogeneous; parts are grouped per i-weight.
std::vector<IStringPart> istring_decompose(const Module& m, int i,
                                           const SVec& v);

// A braid operator T_w on a fixed module, word given as node indices.  The
// matrix and its inverse are materialized on first use and cached; handles
// are cheap to copy and share the cache.
class BraidOperator {
 public:
  BraidOperator() = default;
  bool valid() const { return static_cast<bool>(d_); }

  const Module& mod() const;
  const WeylWord& word() const;
  const SMat& matrix() const;
  const SMat& inverse_matrix() const;
  SVec apply(const SVec& v) const;
  SVec apply_inverse(const SVec& v) const;

 private:
  struct Data;
  std::shared_ptr<Data> d_;
  friend BraidOperator braid_T_w(const Module&, const WeylWord&);
};

// Rank-one operator: on each i-string through an i-highest u with
// n = <h_i, wt u>,  T(F_i^{(j)} u) = (-1)^{n-j} q_i^{(n-j)(j+1)} F_i^{(n-j)} u.
BraidOperator braid_T_i(const Module& m, int i);

// Composition T_w = T_{i_1} ... T_{i_r} for w = i_1 ... i_r (reduced).
BraidOperator braid_T_w(const Module& m, const WeylWord& w);

}  // namespace qgrp
