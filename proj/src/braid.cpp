#include "qgrp/braid.hpp"

#include <map>
#include <mutex>
#include <optional>

namespace qgrp {

std::vector<IStringPart> istring_decompose(const Module& m, int i,
                                           const SVec& v) {
  // Group entries by their i-weight; strings never mix i-weights.
  std::map<int, SVec> classes;
  for (const auto& [idx, c] : v.entries())
    classes[m.weight_of(idx)[i]].add_scaled(c, SVec::unit(idx));
  std::vector<IStringPart> parts;
  for (auto& [mi, cur] : classes) {
    while (!cur.is_zero()) {
      int kmax = 0;
      while (!m.divided_e(i, kmax + 1, cur).is_zero()) ++kmax;
      int n = mi + 2 * kmax;
      SVec top = m.divided_e(i, kmax, cur).scaled(
          RatFn(Laurent::one(), qbinom(n, kmax, m.datum().d(i))));
      cur = cur - m.divided_f(i, kmax, top);
      parts.push_back({kmax, n, std::move(top)});
    }
  }
  return parts;
}

struct BraidOperator::Data {
  Module mod;
  WeylWord word;
  mutable std::optional<SMat> fwd, inv;
  mutable std::mutex mu;
};

namespace {

// Single-letter matrix: e = +1 gives T''_{i,1}; e = -1 gives its inverse
// T'_{i,-1}:  F^{(j)}u -> (-1)^j q_i^{-j(n-j+1)} F^{(n-j)} u.
SMat single_letter(const Module& m, int i, int e) {
  int dim = m.dim(), di = m.datum().d(i);
  SMat t(dim, dim);
  for (int c = 0; c < dim; ++c) {
    SVec out;
    for (const auto& part : istring_decompose(m, i, SVec::unit(c))) {
      int j = part.k, n = part.n;
      int sign = e > 0 ? n - j : j;
      int power = e > 0 ? (n - j) * (j + 1) : -j * (n - j + 1);
      RatFn coef = RatFn::q_power(di * power);
      if (sign % 2) coef = -coef;
      out.add_scaled(coef, m.divided_f(i, n - j, part.top));
    }
    t.set_column(c, out);
  }
  return t;
}

}  // namespace

const Module& BraidOperator::mod() const { return d_->mod; }
const WeylWord& BraidOperator::word() const { return d_->word; }

const SMat& BraidOperator::matrix() const {
  std::lock_guard<std::mutex> lk(d_->mu);
  if (!d_->fwd) {
    SMat acc = SMat::identity(d_->mod.dim());
    for (auto it = d_->word.rbegin(); it != d_->word.rend(); ++it)
      acc = compose(single_letter(d_->mod, *it, +1), acc);
    d_->fwd = std::move(acc);
  }
  return *d_->fwd;
}

const SMat& BraidOperator::inverse_matrix() const {
  std::lock_guard<std::mutex> lk(d_->mu);
  if (!d_->inv) {
    SMat acc = SMat::identity(d_->mod.dim());
    for (int i : d_->word) acc = compose(single_letter(d_->mod, i, -1), acc);
    d_->inv = std::move(acc);
  }
  return *d_->inv;
}

SVec BraidOperator::apply(const SVec& v) const { return matrix().apply(v); }

SVec BraidOperator::apply_inverse(const SVec& v) const {
  return inverse_matrix().apply(v);
}

BraidOperator braid_T_w(const Module& m, const WeylWord& w) {
  BraidOperator op;
  op.d_ = std::make_shared<BraidOperator::Data>();
  op.d_->mod = m;
  op.d_->word = w;
  return op;
}

BraidOperator braid_T_i(const Module& m, int i) { return braid_T_w(m, {i}); }

}  // namespace qgrp
