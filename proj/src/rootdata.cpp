#include "qgrp/rootdata.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace qgrp {

namespace {

// Exact inverse of a small integer matrix, row-major output.
std::vector<Rat> invert(const std::vector<int>& a, int n) {
  std::vector<Rat> m(static_cast<size_t>(n) * 2 * n);
  auto at = [&](int r, int c) -> Rat& { return m[static_cast<size_t>(r) * 2 * n + c]; };
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) at(r, c) = a[static_cast<size_t>(r) * n + c];
    at(r, n + r) = 1;
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    while (piv < n && at(piv, col) == 0) ++piv;
    if (piv == n) throw std::logic_error("singular Cartan matrix");
    if (piv != col)
      for (int c = 0; c < 2 * n; ++c) std::swap(at(piv, c), at(col, c));
    Rat inv = 1 / at(col, col);
    for (int c = 0; c < 2 * n; ++c) at(col, c) *= inv;
    for (int r = 0; r < n; ++r) {
      if (r == col || at(r, col) == 0) continue;
      Rat f = at(r, col);
      for (int c = 0; c < 2 * n; ++c) at(r, c) -= f * at(col, c);
    }
  }
  std::vector<Rat> out(static_cast<size_t>(n) * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out[static_cast<size_t>(r) * n + c] = at(r, n + c);
  return out;
}

// Z-basis of { x : k x = 0 } for a small integer matrix, via unimodular
// column reduction to echelon form.
std::vector<Coweight> integer_kernel(const std::vector<Int>& k0, int n) {
  std::vector<Int> a = k0;                           // row-major n x n
  std::vector<Int> u(static_cast<size_t>(n) * n, 0); // column ops tracker
  auto A = [&](int r, int c) -> Int& { return a[static_cast<size_t>(r) * n + c]; };
  auto U = [&](int r, int c) -> Int& { return u[static_cast<size_t>(r) * n + c]; };
  for (int i = 0; i < n; ++i) U(i, i) = 1;
  auto col_sub = [&](int dst, int src, const Int& f) {
    for (int r = 0; r < n; ++r) A(r, dst) -= f * A(r, src);
    for (int r = 0; r < n; ++r) U(r, dst) -= f * U(r, src);
  };
  auto col_swap = [&](int i, int j) {
    for (int r = 0; r < n; ++r) std::swap(A(r, i), A(r, j));
    for (int r = 0; r < n; ++r) std::swap(U(r, i), U(r, j));
  };
  int lead = 0;
  for (int row = 0; row < n && lead < n; ++row) {
    for (;;) {
      int best = -1;
      for (int c = lead; c < n; ++c)
        if (A(row, c) != 0 &&
            (best < 0 || abs(A(row, c)) < abs(A(row, best))))
          best = c;
      if (best < 0) break;
      col_swap(lead, best);
      bool clean = true;
      for (int c = lead + 1; c < n; ++c) {
        if (A(row, c) == 0) continue;
        Int f = A(row, c) / A(row, lead);
        col_sub(c, lead, f);
        if (A(row, c) != 0) clean = false;
      }
      if (clean) {
        ++lead;
        break;
      }
    }
  }
  std::vector<Coweight> basis;
  for (int c = lead; c < n; ++c) {
    Coweight v(n);
    for (int r = 0; r < n; ++r) v[r] = static_cast<int>(U(r, c).get_si());
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace

RootDatum RootDatum::build(Series s, int n) {
  auto fail = [&](const std::string& msg) { throw UnsupportedType(msg); };
  RootDatum dt;
  dt.series_ = s;
  dt.rank_ = n;
  dt.a_.assign(static_cast<size_t>(n) * n, 0);
  dt.d_.assign(n, 1);
  auto A = [&](int i, int j) -> int& { return dt.a_[static_cast<size_t>(i) * n + j]; };
  auto chain = [&] {
    for (int i = 0; i < n; ++i) A(i, i) = 2;
    for (int i = 0; i + 1 < n; ++i) A(i, i + 1) = A(i + 1, i) = -1;
  };
  switch (s) {
    case Series::A:
      if (n < 1) fail("type A needs rank >= 1");
      chain();
      break;
    case Series::B:
      if (n < 2) fail("type B needs rank >= 2");
      chain();
      A(n - 1, n - 2) = -2;  // node n-1 short
      for (int i = 0; i + 1 < n; ++i) dt.d_[i] = 2;
      break;
    case Series::C:
      if (n < 3) fail("type C needs rank >= 3");
      chain();
      A(n - 2, n - 1) = -2;  // node n-1 long
      dt.d_[n - 1] = 2;
      break;
    case Series::D:
      if (n < 4) fail("type D needs rank >= 4");
      chain();
      A(n - 2, n - 1) = A(n - 1, n - 2) = 0;
      A(n - 3, n - 1) = A(n - 1, n - 3) = -1;
      break;
    case Series::F4:
      if (n != 4) fail("type F4 has rank 4");
      chain();
      A(2, 1) = -2;  // nodes 0,1 long; nodes 2,3 short
      dt.d_[0] = dt.d_[1] = 2;
      break;
    case Series::A1xA1:
      if (n != 2) fail("type A1xA1 has rank 2");
      A(0, 0) = A(1, 1) = 2;
      break;
  }
  dt.ainv_ = invert(dt.a_, n);
  return dt;
}

Weight RootDatum::fundamental(int i) const {
  Weight w(rank_, 0);
  w[i] = 1;
  return w;
}

Weight RootDatum::simple_root(int j) const {
  Weight w(rank_);
  for (int i = 0; i < rank_; ++i) w[i] = cartan(i, j);
  return w;
}

int RootDatum::pairing(const Coweight& h, const Weight& la) {
  int s = 0;
  for (size_t k = 0; k < h.size(); ++k) s += h[k] * la[k];
  return s;
}

bool RootDatum::dominant(const Weight& la) const {
  return std::all_of(la.begin(), la.end(), [](int c) { return c >= 0; });
}

Weight RootDatum::reflect(int i, Weight la) const {
  int c = la[i];
  for (int k = 0; k < rank_; ++k) la[k] -= c * cartan(k, i);
  return la;
}

Coweight RootDatum::reflect_co(int i, Coweight h) const {
  int c = 0;
  for (int k = 0; k < rank_; ++k) c += h[k] * cartan(k, i);
  h[i] -= c;
  return h;
}

Weight RootDatum::act(const WeylWord& w, Weight la) const {
  for (auto it = w.rbegin(); it != w.rend(); ++it) la = reflect(*it, std::move(la));
  return la;
}

Coweight RootDatum::act_co(const WeylWord& w, Coweight h) const {
  for (auto it = w.rbegin(); it != w.rend(); ++it) h = reflect_co(*it, std::move(h));
  return h;
}

std::vector<Rat> RootDatum::root_coords(const Weight& la) const {
  std::vector<Rat> c(rank_);
  for (int j = 0; j < rank_; ++j)
    for (int k = 0; k < rank_; ++k)
      c[j] += ainv_[static_cast<size_t>(j) * rank_ + k] * la[k];
  return c;
}

bool RootDatum::leq(const Weight& la, const Weight& mu) const {
  Weight diff(rank_);
  for (int k = 0; k < rank_; ++k) diff[k] = mu[k] - la[k];
  for (const Rat& c : root_coords(diff)) {
    if (c < 0) return false;
    if (c.get_den() != 1) return false;
  }
  return true;
}

Rat RootDatum::height(const Weight& la) const {
  auto c = root_coords(la);
  return std::accumulate(c.begin(), c.end(), Rat(0));
}

std::string RootDatum::series_name() const {
  switch (series_) {
    case Series::A: return "A";
    case Series::B: return "B";
    case Series::C: return "C";
    case Series::D: return "D";
    case Series::F4: return "F4";
    case Series::A1xA1: return "A1xA1";
  }
  return "?";
}

WeylWord longest_word(const RootDatum& datum, const std::vector<int>& subset) {
  Weight la = datum.zero_weight();
  for (int i : subset) la[i] = 1;
  WeylWord word;
  for (;;) {
    int pick = -1;
    for (int i : subset)
      if (la[i] > 0) {
        pick = i;
        break;
      }
    if (pick < 0) break;
    word.push_back(pick);
    la = datum.reflect(pick, std::move(la));
  }
  return word;
}

WeylWord longest_word(const RootDatum& datum) {
  std::vector<int> all(datum.rank());
  std::iota(all.begin(), all.end(), 0);
  return longest_word(datum, all);
}

std::string pair_kind_name(PairKind k) {
  switch (k) {
    case PairKind::AI: return "AI";
    case PairKind::AII: return "AII";
    case PairKind::AIII: return "AIII";
    case PairKind::AIV: return "AIV";
    case PairKind::BII: return "BII";
    case PairKind::CII: return "CII";
    case PairKind::DII: return "DII";
    case PairKind::FII: return "FII";
  }
  return "?";
}

std::optional<PairKind> pair_kind_from_name(const std::string& s) {
  for (PairKind k : {PairKind::AI, PairKind::AII, PairKind::AIII, PairKind::AIV,
                     PairKind::BII, PairKind::CII, PairKind::DII, PairKind::FII})
    if (pair_kind_name(k) == s) return k;
  return std::nullopt;
}

bool AdmissiblePair::is_black(int i) const {
  return std::binary_search(black.begin(), black.end(), i);
}

std::vector<int> AdmissiblePair::white() const {
  std::vector<int> w;
  for (int i = 0; i < datum.rank(); ++i)
    if (!is_black(i)) w.push_back(i);
  return w;
}

Weight AdmissiblePair::tau_weight(const Weight& la) const {
  Weight out(la.size());
  for (size_t i = 0; i < la.size(); ++i) out[i] = la[tau[i]];
  return out;
}

Weight AdmissiblePair::theta(const Weight& nu) const {
  Weight t = datum.act(w_black, tau_weight(nu));
  for (size_t k = 0; k < t.size(); ++k) t[k] += nu[k];
  return t;
}

int AdmissiblePair::theta_multiple(const Weight& nu) const {
  if (!datum.dominant(nu)) throw NotDominant("theta_multiple needs a dominant weight");
  Weight t = theta(nu);
  int m = -1;
  for (int k = 0; k < datum.rank(); ++k) {
    if (varpi[k] == 0) {
      if (t[k] != 0) throw NotMultipleOfVarpi(name);
      continue;
    }
    if (t[k] % varpi[k] != 0) throw NotMultipleOfVarpi(name);
    int mk = t[k] / varpi[k];
    if (m >= 0 && mk != m) throw NotMultipleOfVarpi(name);
    m = mk;
  }
  if (m < 0) m = 0;  // varpi has a nonzero entry for every registered pair
  if (m < 0 || !datum.dominant(t)) throw NotMultipleOfVarpi(name);
  return m;
}

std::vector<Coweight> AdmissiblePair::y_imath_basis() const {
  int n = datum.rank();
  // Column i of k: h_i + w_black(tau(h_i)) in the coroot basis.
  std::vector<Int> k(static_cast<size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) {
    Coweight h(n, 0);
    h[tau[i]] = 1;
    h = datum.act_co(w_black, std::move(h));
    h[i] += 1;
    for (int r = 0; r < n; ++r) k[static_cast<size_t>(r) * n + i] = h[r];
  }
  return integer_kernel(k, n);
}

Rat AdmissiblePair::rho_co_black_pairing(int i) const {
  // rho_co is the unique rational combination of black coroots pairing to 1
  // with every black simple root.
  int m = static_cast<int>(black.size());
  if (m == 0) return 0;
  std::vector<Rat> sys(static_cast<size_t>(m) * (m + 1));
  auto S = [&](int r, int c) -> Rat& { return sys[static_cast<size_t>(r) * (m + 1) + c]; };
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) S(r, c) = datum.cartan(black[c], black[r]);
    S(r, m) = 1;
  }
  // Gaussian elimination on the augmented system.
  for (int col = 0; col < m; ++col) {
    int piv = col;
    while (piv < m && S(piv, col) == 0) ++piv;
    if (piv == m) throw std::logic_error("degenerate black Cartan block");
    if (piv != col)
      for (int c = 0; c <= m; ++c) std::swap(S(piv, c), S(col, c));
    Rat inv = 1 / S(col, col);
    for (int c = 0; c <= m; ++c) S(col, c) *= inv;
    for (int r = 0; r < m; ++r) {
      if (r == col || S(r, col) == 0) continue;
      Rat f = S(r, col);
      for (int c = 0; c <= m; ++c) S(r, c) -= f * S(col, c);
    }
  }
  Rat out;
  for (int r = 0; r < m; ++r) out += S(r, m) * datum.cartan(black[r], i);
  return out;
}

AdmissiblePair admissible_pair(PairKind kind, int n) {
  AdmissiblePair p;
  p.kind = kind;
  auto id_tau = [&](int rank) {
    p.tau.resize(rank);
    std::iota(p.tau.begin(), p.tau.end(), 0);
  };
  auto range = [](int lo, int hi) {  // inclusive bounds, 0-based
    std::vector<int> v;
    for (int i = lo; i <= hi; ++i) v.push_back(i);
    return v;
  };
  std::ostringstream nm;
  nm << pair_kind_name(kind);
  switch (kind) {
    case PairKind::AI:
      p.datum = RootDatum::build(Series::A, 1);
      id_tau(1);
      p.varsigma[0] = RatFn::q_power(-1);
      p.varpi = {2};
      break;
    case PairKind::AII:
      p.datum = RootDatum::build(Series::A, 3);
      p.black = {0, 2};
      id_tau(3);
      p.varsigma[1] = RatFn::q_power(1);
      p.varpi = {0, 1, 0};
      break;
    case PairKind::AIII:
      p.datum = RootDatum::build(Series::A1xA1, 2);
      p.tau = {1, 0};
      p.varsigma[0] = RatFn::one();
      p.varsigma[1] = RatFn::one();
      p.varpi = {1, 1};
      break;
    case PairKind::AIV: {
      if (n < 2) throw UnsupportedType("AIV needs n >= 2");
      p.datum = RootDatum::build(Series::A, n);
      p.black = range(1, n - 2);
      p.tau.resize(n);
      for (int i = 0; i < n; ++i) p.tau[i] = n - 1 - i;
      p.varsigma[0] = RatFn::one();
      RatFn sn = RatFn::q_power(n - 1);
      if (n % 2 == 1) sn = -sn;
      p.varsigma[n - 1] = sn;
      p.varpi = p.datum.zero_weight();
      p.varpi[0] = p.varpi[n - 1] = 1;
      nm << ":n=" << n;
      break;
    }
    case PairKind::BII:
      if (n < 2) throw UnsupportedType("BII needs n >= 2");
      p.datum = RootDatum::build(Series::B, n);
      p.black = range(1, n - 1);
      id_tau(n);
      p.varsigma[0] = RatFn::q_power(2 * n - 3);
      p.varpi = p.datum.fundamental(0);
      nm << ":n=" << n;
      break;
    case PairKind::CII: {
      if (n < 3) throw UnsupportedType("CII needs n >= 3");
      p.datum = RootDatum::build(Series::C, n);
      p.black = range(2, n - 1);
      p.black.insert(p.black.begin(), 0);
      id_tau(n);
      p.varsigma[1] = RatFn::q_power(n - 1);
      p.varpi = p.datum.fundamental(1);
      nm << ":n=" << n;
      break;
    }
    case PairKind::DII:
      if (n < 4) throw UnsupportedType("DII needs n >= 4");
      p.datum = RootDatum::build(Series::D, n);
      p.black = range(1, n - 1);
      id_tau(n);
      if (n % 2 == 0) std::swap(p.tau[n - 2], p.tau[n - 1]);
      p.varsigma[0] = RatFn::q_power(n - 2);
      p.varpi = p.datum.fundamental(0);
      nm << ":n=" << n;
      break;
    case PairKind::FII:
      p.datum = RootDatum::build(Series::F4, 4);
      p.black = {0, 1, 2};
      id_tau(4);
      p.varsigma[3] = RatFn::q_power(5);
      p.varpi = p.datum.fundamental(3);
      break;
  }
  for (int i : p.white()) p.kappa[i] = RatFn();
  p.w_black = longest_word(p.datum, p.black);
  p.name = nm.str();
  return p;
}

}  // namespace qgrp
