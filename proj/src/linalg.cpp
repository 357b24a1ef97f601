#include "qgrp/linalg.hpp"

#include <omp.h>

#include <algorithm>
#include <stdexcept>

namespace qgrp {

Exec& exec_policy() {
  static Exec policy = Exec::omp;
  return policy;
}

int& exec_threads() {
  static int threads = 0;
  return threads;
}

namespace {

int omp_thread_count() {
  int t = exec_threads();
  return t > 0 ? t : omp_get_max_threads();
}

}  // namespace

SVec SVec::unit(int i, RatFn c) {
  SVec v;
  if (!c.is_zero()) v.e_.emplace_back(i, std::move(c));
  return v;
}

RatFn SVec::at(int i) const {
  auto it = std::lower_bound(
      e_.begin(), e_.end(), i,
      [](const std::pair<int, RatFn>& t, int k) { return t.first < k; });
  if (it != e_.end() && it->first == i) return it->second;
  return RatFn::zero();
}

SVec SVec::from_entries(std::vector<std::pair<int, RatFn>> raw) {
  std::sort(raw.begin(), raw.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SVec v;
  for (auto& [i, c] : raw) {
    if (!v.e_.empty() && v.e_.back().first == i)
      v.e_.back().second += c;
    else
      v.e_.emplace_back(i, std::move(c));
  }
  std::erase_if(v.e_, [](const auto& t) { return t.second.is_zero(); });
  return v;
}

SVec SVec::operator+(const SVec& o) const {
  SVec r;
  r.e_.reserve(e_.size() + o.e_.size());
  size_t i = 0, j = 0;
  while (i < e_.size() || j < o.e_.size()) {
    if (j == o.e_.size() || (i < e_.size() && e_[i].first < o.e_[j].first)) {
      r.e_.push_back(e_[i++]);
    } else if (i == e_.size() || o.e_[j].first < e_[i].first) {
      r.e_.push_back(o.e_[j++]);
    } else {
      RatFn c = e_[i].second + o.e_[j].second;
      if (!c.is_zero()) r.e_.emplace_back(e_[i].first, std::move(c));
      ++i;
      ++j;
    }
  }
  return r;
}

SVec SVec::operator-(const SVec& o) const { return *this + o.scaled(RatFn(-1L)); }

SVec SVec::scaled(const RatFn& c) const {
  if (c.is_zero()) return SVec();
  SVec r = *this;
  for (auto& t : r.e_) t.second *= c;
  return r;
}

SVec& SVec::add_scaled(const RatFn& c, const SVec& o) {
  *this = *this + o.scaled(c);
  return *this;
}

SVec SVec::bar() const {
  SVec r = *this;
  for (auto& t : r.e_) t.second = t.second.bar();
  return r;
}

RatFn dot(const SVec& a, const SVec& b) {
  RatFn s;
  size_t i = 0, j = 0;
  while (i < a.entries().size() && j < b.entries().size()) {
    int ia = a.entries()[i].first, ib = b.entries()[j].first;
    if (ia < ib)
      ++i;
    else if (ib < ia)
      ++j;
    else {
      s += a.entries()[i].second * b.entries()[j].second;
      ++i;
      ++j;
    }
  }
  return s;
}

SMat SMat::identity(int n) {
  SMat m(n, n);
  for (int i = 0; i < n; ++i) m.col_[i] = SVec::unit(i);
  return m;
}

SMat SMat::diagonal(const std::vector<RatFn>& d) {
  SMat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (int i = 0; i < m.cols(); ++i) m.col_[i] = SVec::unit(i, d[i]);
  return m;
}

void SMat::set(int r, int c, const RatFn& v) {
  std::vector<std::pair<int, RatFn>> raw(col_[c].entries().begin(),
                                         col_[c].entries().end());
  std::erase_if(raw, [&](const auto& t) { return t.first == r; });
  if (!v.is_zero()) raw.emplace_back(r, v);
  col_[c] = SVec::from_entries(std::move(raw));
}

bool SMat::is_zero() const {
  for (const auto& c : col_)
    if (!c.is_zero()) return false;
  return true;
}

SVec SMat::apply(const SVec& v) const {
  SVec r;
  for (const auto& [j, c] : v.entries()) r.add_scaled(c, col_[j]);
  return r;
}

SMat SMat::operator+(const SMat& o) const {
  SMat r(rows_, cols());
  for (int j = 0; j < cols(); ++j) r.col_[j] = col_[j] + o.col_[j];
  return r;
}

SMat SMat::operator-(const SMat& o) const {
  return *this + o.scaled(RatFn(-1L));
}

SMat SMat::scaled(const RatFn& c) const {
  SMat r(rows_, cols());
  for (int j = 0; j < cols(); ++j) r.col_[j] = col_[j].scaled(c);
  return r;
}

SMat SMat::transpose() const {
  std::vector<std::vector<std::pair<int, RatFn>>> rows(rows_);
  for (int j = 0; j < cols(); ++j)
    for (const auto& [i, c] : col_[j].entries()) rows[i].emplace_back(j, c);
  SMat r(cols(), rows_);
  for (int i = 0; i < rows_; ++i)
    r.col_[i] = SVec::from_entries(std::move(rows[i]));
  return r;
}

SMat SMat::bar() const {
  SMat r(rows_, cols());
  for (int j = 0; j < cols(); ++j) r.col_[j] = col_[j].bar();
  return r;
}

SMat compose(const SMat& a, const SMat& b, Exec ex) {
  SMat r(a.rows(), b.cols());
  if (ex == Exec::omp) {
#pragma omp parallel for schedule(dynamic) num_threads(omp_thread_count())
    for (int j = 0; j < b.cols(); ++j) r.set_column(j, a.apply(b.column(j)));
  } else {
    for (int j = 0; j < b.cols(); ++j) r.set_column(j, a.apply(b.column(j)));
  }
  return r;
}

std::vector<SVec> apply_many(const SMat& a, const std::vector<SVec>& vs,
                             Exec ex) {
  std::vector<SVec> out(vs.size());
  int n = static_cast<int>(vs.size());
  if (ex == Exec::omp) {
#pragma omp parallel for schedule(dynamic) num_threads(omp_thread_count())
    for (int i = 0; i < n; ++i) out[i] = a.apply(vs[i]);
  } else {
    for (int i = 0; i < n; ++i) out[i] = a.apply(vs[i]);
  }
  return out;
}

std::vector<int> rref(Dense& m, Exec ex) {
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < m.cols && r < m.rows; ++c) {
    int p = -1;
    for (int i = r; i < m.rows; ++i)
      if (!m.at(i, c).is_zero()) {
        p = i;
        break;
      }
    if (p < 0) continue;
    if (p != r)
      for (int j = 0; j < m.cols; ++j) std::swap(m.at(p, j), m.at(r, j));
    RatFn inv = m.at(r, c).inverse();
    for (int j = c; j < m.cols; ++j) m.at(r, j) *= inv;
    auto eliminate = [&](int i) {
      if (i == r || m.at(i, c).is_zero()) return;
      RatFn f = m.at(i, c);
      for (int j = c; j < m.cols; ++j) m.at(i, j) -= f * m.at(r, j);
    };
    if (ex == Exec::omp) {
#pragma omp parallel for schedule(dynamic) num_threads(omp_thread_count())
      for (int i = 0; i < m.rows; ++i) eliminate(i);
    } else {
      for (int i = 0; i < m.rows; ++i) eliminate(i);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

std::vector<std::vector<RatFn>> nullspace(Dense m, Exec ex) {
  std::vector<int> pivots = rref(m, ex);
  std::vector<bool> is_pivot(m.cols, false);
  for (int c : pivots) is_pivot[c] = true;
  std::vector<std::vector<RatFn>> basis;
  for (int c = 0; c < m.cols; ++c) {
    if (is_pivot[c]) continue;
    std::vector<RatFn> v(m.cols);
    v[c] = RatFn::one();
    for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m.at(static_cast<int>(r), c);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<std::vector<RatFn>> solve_square(
    Dense a, const std::vector<std::vector<RatFn>>& rhs, Exec ex) {
  if (a.rows != a.cols) throw std::logic_error("solve_square: not square");
  int n = a.rows;
  int k = static_cast<int>(rhs.size());
  Dense aug(n, n + k);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug.at(i, j) = a.at(i, j);
    for (int j = 0; j < k; ++j) aug.at(i, n + j) = rhs[j][i];
  }
  std::vector<int> pivots = rref(aug, ex);
  if (static_cast<int>(pivots.size()) != n || (n > 0 && pivots.back() >= n))
    throw std::logic_error("solve_square: singular matrix");
  std::vector<std::vector<RatFn>> out(k, std::vector<RatFn>(n));
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) out[j][i] = aug.at(i, n + j);
  return out;
}

bool SpanBuilder::add(const SVec& v) {
  // Rows are kept mutually reduced (each row vanishes at every other row's
  // pivot), so one pass in pivot order is a complete reduction.
  SVec w = v;
  size_t n_kept = rows_.size();
  std::vector<RatFn> expr(n_kept + 1);
  expr[n_kept] = RatFn::one();
  for (size_t k = 0; k < rows_.size() && !w.is_zero(); ++k) {
    RatFn c = w.at(rows_[k].v.lead_index());
    if (c.is_zero()) continue;
    w.add_scaled(-c, rows_[k].v);
    for (size_t j = 0; j < rows_[k].expr.size(); ++j)
      expr[j] -= c * rows_[k].expr[j];
  }
  if (w.is_zero()) return false;
  RatFn inv = w.lead_coeff().inverse();
  for (auto& c : expr) c *= inv;
  Row row{w.scaled(inv), std::move(expr)};
  // Back-eliminate the new pivot from the existing rows.
  int piv = row.v.lead_index();
  for (auto& r : rows_) {
    RatFn c = r.v.at(piv);
    if (c.is_zero()) continue;
    r.v.add_scaled(-c, row.v);
    r.expr.resize(n_kept + 1);
    for (size_t j = 0; j <= n_kept; ++j) r.expr[j] -= c * row.expr[j];
  }
  auto pos = std::lower_bound(rows_.begin(), rows_.end(), row,
                              [](const Row& a, const Row& b) {
                                return a.v.lead_index() < b.v.lead_index();
                              });
  rows_.insert(pos, std::move(row));
  return true;
}

std::optional<std::vector<RatFn>> SpanBuilder::express(const SVec& v) const {
  SVec w = v;
  std::vector<RatFn> out(rows_.size());
  std::vector<RatFn> used(rows_.size());
  for (size_t k = 0; k < rows_.size() && !w.is_zero(); ++k) {
    RatFn c = w.at(rows_[k].v.lead_index());
    if (c.is_zero()) continue;
    w.add_scaled(-c, rows_[k].v);
    used[k] = c;
  }
  if (!w.is_zero()) return std::nullopt;
  for (size_t k = 0; k < rows_.size(); ++k) {
    if (used[k].is_zero()) continue;
    for (size_t j = 0; j < rows_[k].expr.size(); ++j)
      out[j] += used[k] * rows_[k].expr[j];
  }
  return out;
}

bool SpanBuilder::contains(const SVec& v) const {
  SVec w = v;
  for (size_t k = 0; k < rows_.size() && !w.is_zero(); ++k) {
    RatFn c = w.at(rows_[k].v.lead_index());
    if (!c.is_zero()) w.add_scaled(-c, rows_[k].v);
  }
  return w.is_zero();
}

}  // namespace qgrp
