// Crystal extraction, bar involutions, global bases, and the based-module
// machinery: triangular bar-fixing, highest-weight vectors, canonical lifts,
// based-homomorphism checks, submodules, and filtrations.

#include "qgrp/gcb.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

#include "qgrp/braid.hpp"

namespace qgrp {

namespace {

// Valuation at q = infinity; nonnegative exactly on A_oo, +oo for zero.
long val_at_inf(const RatFn& f) {
  if (f.is_zero()) return std::numeric_limits<long>::max();
  return static_cast<long>(f.den().high_exp()) -
         static_cast<long>(f.num().high_exp());
}

Weight add_w(const Weight& a, const Weight& b) {
  Weight r(a.size());
  for (size_t k = 0; k < a.size(); ++k) r[k] = a[k] + b[k];
  return r;
}

SMat bar_entrywise(const SMat& m) {
  SMat out(m.rows(), m.cols());
  for (int j = 0; j < m.cols(); ++j) out.set_column(j, m.column(j).bar());
  return out;
}

// Unique solution of a consistent rectangular linear system (dense), via
// row reduction of the augmented matrix.  Throws std::logic_error when the
// system is inconsistent or underdetermined.
std::vector<RatFn> solve_unique(Dense a, const std::vector<RatFn>& rhs,
                                const char* where) {
  const int rows = a.rows, cols = a.cols;
  Dense aug(rows, cols + 1);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) aug.at(r, c) = a.at(r, c);
    aug.at(r, cols) = rhs[r];
  }
  std::vector<int> pivots = rref(aug);
  std::vector<RatFn> x(cols);
  int seen = 0;
  for (size_t p = 0; p < pivots.size(); ++p) {
    if (pivots[p] == cols)
      throw std::logic_error(std::string(where) + ": inconsistent system");
    x[pivots[p]] = aug.at(static_cast<int>(p), cols);
    ++seen;
  }
  if (seen != cols)
    throw std::logic_error(std::string(where) + ": underdetermined system");
  return x;
}

}  // namespace

SVec kashiwara(const Module& m, int i, KashDir dir, const SVec& v) {
  SVec out;
  for (const auto& part : istring_decompose(m, i, v)) {
    int k = part.k + (dir == KashDir::lower ? 1 : -1);
    if (k < 0) continue;
    out = out + m.divided_f(i, k, part.top);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Crystal extraction by lattice saturation.

namespace {

struct Cand {
  SVec vec;
  int parent = -1;  // element whose lowering image this is
  int gen = -1;
  int seed = -1;
};

struct Saturation {
  Crystal crystal;
  std::vector<SVec> reps;
  std::vector<int> seed_elem;
};

Saturation saturate(const Module& m, const std::vector<Seed>& seeds) {
  const RootDatum& dt = m.datum();
  const int r = dt.rank();

  std::map<Weight, std::vector<Cand>> pending;
  for (size_t s = 0; s < seeds.size(); ++s) {
    auto w = m.weight_of_vec(seeds[s].vec);
    if (!w)
      throw std::invalid_argument(
          "kashiwara_crystal: seed is not a nonzero weight vector");
    Cand c;
    c.vec = seeds[s].vec;
    c.seed = static_cast<int>(s);
    pending[*w].push_back(std::move(c));
  }

  struct Elem {
    Weight wt;
    std::string label;
    SVec rep;
  };
  std::vector<Elem> elems;
  std::vector<std::vector<int>> arr;  // arr[elem][i] lowering arrow
  std::vector<int> seed_elem(seeds.size(), -1);
  std::set<Weight> done;

  while (!pending.empty()) {
    auto best = pending.begin();
    Rat best_h = dt.height(best->first);
    for (auto it = std::next(pending.begin()); it != pending.end(); ++it) {
      Rat h = dt.height(it->first);
      if (h > best_h) {
        best = it;
        best_h = h;
      }
    }
    const Weight w = best->first;
    std::vector<Cand> cands = std::move(best->second);
    pending.erase(best);
    if (!done.insert(w).second)
      throw std::logic_error("kashiwara_crystal: weight processed twice");

    // Local-ring elimination: find an A_oo-basis of the span of the
    // candidate columns.  Columns may only be combined with multipliers
    // regular at infinity, so pivots are chosen at minimal valuation.
    std::vector<SVec> work;
    work.reserve(cands.size());
    for (const auto& c : cands) work.push_back(c.vec);
    std::vector<int> alive;
    for (size_t j = 0; j < work.size(); ++j)
      if (!work[j].is_zero()) alive.push_back(static_cast<int>(j));

    std::vector<SVec> basis;
    std::vector<int> pivot_row;
    std::vector<RatFn> pivot_val;
    while (!alive.empty()) {
      long best_v = std::numeric_limits<long>::max();
      int bj = -1, br = -1;
      for (int j : alive) {
        for (const auto& [row, c] : work[j].entries()) {
          long v = val_at_inf(c);
          if (v < best_v) {
            best_v = v;
            bj = j;
            br = row;
          }
        }
      }
      if (bj == -1) break;
      RatFn p = work[bj].at(br);
      std::vector<int> next;
      for (int j : alive) {
        if (j == bj) continue;
        RatFn c = work[j].at(br);
        if (!c.is_zero()) work[j].add_scaled(-(c / p), work[bj]);
        if (!work[j].is_zero()) next.push_back(j);
      }
      basis.push_back(work[bj]);
      pivot_row.push_back(br);
      pivot_val.push_back(p);
      alive = std::move(next);
    }
    const int rank_w = static_cast<int>(basis.size());

    // Classes of the original candidates at q = infinity, by forward
    // substitution in pivot order.
    std::vector<std::vector<Rat>> cls(cands.size(),
                                      std::vector<Rat>(rank_w, Rat(0)));
    for (size_t j = 0; j < cands.size(); ++j) {
      SVec rem = cands[j].vec;
      for (int t = 0; t < rank_w; ++t) {
        RatFn x = rem.at(pivot_row[t]) / pivot_val[t];
        if (x.is_zero()) continue;
        if (!x.regular_at_inf())
          throw std::logic_error(
              "kashiwara_crystal: candidate leaves the local-ring lattice");
        rem.add_scaled(-x, basis[t]);
        cls[j][t] = x.ev_inf();
      }
      if (!rem.is_zero())
        throw std::logic_error(
            "kashiwara_crystal: candidate outside the lattice span");
    }

    // Distinct nonzero classes become crystal elements (first occurrence
    // order); candidates in the same class share one element.
    std::map<std::vector<Rat>, int> class_elem;
    const std::vector<Rat> zero_cls(rank_w, Rat(0));
    std::vector<int> new_elems;
    for (size_t j = 0; j < cands.size(); ++j) {
      int elem = -1;
      if (cls[j] != zero_cls) {
        auto it = class_elem.find(cls[j]);
        if (it != class_elem.end()) {
          elem = it->second;
        } else {
          elem = static_cast<int>(elems.size());
          std::string label =
              cands[j].seed >= 0 ? seeds[cands[j].seed].label : std::string();
          elems.push_back({w, std::move(label), cands[j].vec});
          arr.emplace_back(r, -1);
          class_elem.emplace(cls[j], elem);
          new_elems.push_back(elem);
        }
      }
      if (cands[j].parent >= 0) arr[cands[j].parent][cands[j].gen] = elem;
      if (cands[j].seed >= 0) seed_elem[cands[j].seed] = elem;
    }
    if (static_cast<int>(class_elem.size()) != rank_w)
      throw std::logic_error(
          "kashiwara_crystal: classes do not form a basis of the lattice "
          "quotient");

    // Spawn the lowering images of the new elements.
    for (int e : new_elems) {
      for (int i = 0; i < r; ++i) {
        SVec img = kashiwara(m, i, KashDir::lower, elems[e].rep);
        if (img.is_zero()) continue;
        Cand c;
        c.vec = std::move(img);
        c.parent = e;
        c.gen = i;
        Weight dwn = elems[e].wt;
        Weight al = dt.simple_root(i);
        for (int k = 0; k < r; ++k) dwn[k] -= al[k];
        pending[dwn].push_back(std::move(c));
      }
    }
  }

  std::vector<Crystal::Element> celems;
  std::vector<SVec> reps;
  celems.reserve(elems.size());
  for (auto& e : elems) {
    celems.push_back({e.wt, e.label});
    reps.push_back(std::move(e.rep));
  }
  std::vector<std::vector<int>> f(r, std::vector<int>(elems.size(), -1));
  for (size_t e = 0; e < elems.size(); ++e)
    for (int i = 0; i < r; ++i) f[i][e] = arr[e][i];
  return {Crystal(dt, std::move(celems), std::move(f)), std::move(reps),
          std::move(seed_elem)};
}

// ---------------------------------------------------------------------------
// Triangular bar-fixing.

// Corrects each lattice representative to the unique bar-fixed vector
// congruent to it modulo q^{-1} corrections by representatives of the same
// weight.  Order-free: dependencies are followed recursively; cycles or
// ill-shaped residues raise TriangularityFailure.
std::vector<SVec> bar_fix(const Module& m, const SMat& bar, const Crystal& cry,
                          const std::vector<SVec>& reps) {
  const int n = static_cast<int>(reps.size());
  std::vector<SVec> global(n);
  std::vector<int> state(n, 0);  // 0 new, 1 in progress, 2 done

  std::map<Weight, std::vector<int>> by_weight;
  for (int k = 0; k < n; ++k) by_weight[cry.wt(k)].push_back(k);

  // Coefficients of a weight vector over the representatives of its block.
  auto express_in_reps = [&](const Weight& w, const SVec& v) {
    const auto& blk_rows = m.block(w);
    const auto& blk_elems = by_weight.at(w);
    const int bs = static_cast<int>(blk_rows.size());
    if (static_cast<int>(blk_elems.size()) != bs)
      throw std::logic_error("bar fixing: block size mismatch");
    std::map<int, int> rowpos;
    for (int p = 0; p < bs; ++p) rowpos[blk_rows[p]] = p;
    Dense a(bs, bs);
    for (int c = 0; c < bs; ++c)
      for (const auto& [row, val] : reps[blk_elems[c]].entries())
        a.at(rowpos.at(row), c) = val;
    std::vector<RatFn> rhs(bs);
    for (const auto& [row, val] : v.entries()) rhs[rowpos.at(row)] = val;
    return std::pair<std::vector<RatFn>, std::vector<int>>(
        solve_square(std::move(a), {std::move(rhs)})[0], blk_elems);
  };

  std::function<void(int)> fix = [&](int j) {
    if (state[j] == 2) return;
    if (state[j] == 1)
      throw TriangularityFailure("bar fixing: cyclic residue dependencies");
    state[j] = 1;
    SVec r = bar.apply(reps[j].bar()) - reps[j];
    if (r.is_zero()) {
      global[j] = reps[j];
      state[j] = 2;
      return;
    }
    const Weight w = cry.wt(j);
    auto [x, blk_elems] = express_in_reps(w, r);
    std::vector<int> support;
    for (size_t c = 0; c < x.size(); ++c) {
      if (x[c].is_zero()) continue;
      if (blk_elems[c] == j)
        throw TriangularityFailure("bar fixing: residue touches the diagonal");
      support.push_back(blk_elems[c]);
    }
    for (int k : support) fix(k);

    // Re-express the residue over the corrected vectors and read off the
    // q^{-1}-corrections from the antisymmetric coefficients.
    SpanBuilder sb(m.dim());
    for (int k : support)
      if (!sb.add(global[k]))
        throw std::logic_error("bar fixing: dependent corrected vectors");
    auto rho = sb.express(r);
    if (!rho)
      throw TriangularityFailure(
          "bar fixing: residue escapes its dependency span");
    SVec g = reps[j];
    for (size_t c = 0; c < support.size(); ++c) {
      const RatFn& p = (*rho)[c];
      if (p.is_zero()) continue;
      if (!p.in_laurent_ring())
        throw TriangularityFailure("bar fixing: residue coefficient not a "
                                   "Laurent polynomial");
      Laurent lp = p.to_laurent();
      if (lp.coeff(0) != 0)
        throw TriangularityFailure(
            "bar fixing: residue coefficient has a constant term");
      if (lp.bar() != -lp)
        throw TriangularityFailure(
            "bar fixing: residue coefficient not bar-antisymmetric");
      Laurent corr;
      for (const auto& [e, a] : lp.terms())
        if (e > 0) corr = corr + Laurent::monomial(-a, -e);
      g.add_scaled(RatFn(corr), global[support[c]]);
    }
    if (bar.apply(g.bar()) != g)
      throw TriangularityFailure("bar fixing: corrected vector not bar-fixed");
    global[j] = g;
    state[j] = 2;
  };

  for (int j = 0; j < n; ++j) fix(j);
  return global;
}

}  // namespace

Crystal kashiwara_crystal(const Module& m, const std::vector<Seed>& seeds) {
  return saturate(m, seeds).crystal;
}

BasedStructure global_basis(const Module& m, const SMat& bar,
                            const std::vector<Seed>& seeds) {
  Saturation sat = saturate(m, seeds);
  if (sat.crystal.size() != m.dim())
    throw std::logic_error("global_basis: seeds do not generate the module");
  std::vector<SVec> globals = bar_fix(m, bar, sat.crystal, sat.reps);
  return {m, std::move(sat.crystal), std::move(sat.reps), std::move(globals),
          bar};
}

SMat bar_irreducible(const Module& m) {
  if (!m.is_irreducible())
    throw std::invalid_argument(
        "bar_irreducible: module is not an irreducible construction");
  return SMat::identity(m.dim());
}

SMat bar_tensor(const Module& t) {
  if (t.factor_count() == 1) return bar_irreducible(t);
  const Module& a = t.factor(0);
  const Module& b = t.factor(1);
  if (!b.is_irreducible())
    throw std::invalid_argument("bar_tensor: last factor must be irreducible");
  SMat pa = bar_tensor(a);
  const RootDatum& dt = t.datum();
  const int da = a.dim(), db = b.dim();

  // F-word provenance of the last factor's basis: for y > 0 find (i, y')
  // with F_i(basis y') = basis y exactly; the construction guarantees one.
  std::vector<std::pair<int, int>> prov(db, {-1, -1});
  for (int y = 1; y < db; ++y) {
    for (int i = 0; i < dt.rank() && prov[y].first == -1; ++i) {
      for (int yp = 0; yp < y && prov[y].first == -1; ++yp) {
        const SVec& col = b.f_mat(i).column(yp);
        if (col.nnz() == 1 && col.entries()[0].first == y &&
            col.entries()[0].second == RatFn::one())
          prov[y] = {i, yp};
      }
    }
    if (prov[y].first == -1)
      throw std::logic_error("bar_tensor: missing F-word provenance");
  }

  // psi(x (x) y) column by column: the top level is psi_a (x) id, and
  //   x (x) F_i y' = F_i(x (x) y') - q^{d_i <h_i, wt y'>}^{-1}... derived from
  // the coproduct F_i(u (x) v) = u (x) F_i v + q_i^{-<h_i,wt v>} F_i u (x) v,
  // giving psi(x (x) y) = F_i psi(x (x) y')
  //                       - q^{+d_i <h_i, wt y'>} psi(F_i x (x) y').
  std::vector<SVec> cols(static_cast<size_t>(da) * db);
  for (int x = 0; x < da; ++x) {
    std::vector<std::pair<int, RatFn>> e;
    for (const auto& [row, v] : pa.column(x).entries())
      e.emplace_back(row * db, v);
    cols[static_cast<size_t>(x) * db] = SVec::from_entries(std::move(e));
  }
  for (int y = 1; y < db; ++y) {
    const auto [i, yp] = prov[y];
    const RatFn shift = RatFn::q_power(dt.d(i) * b.weight_of(yp)[i]);
    for (int x = 0; x < da; ++x) {
      SVec res = t.f_mat(i).apply(cols[static_cast<size_t>(x) * db + yp]);
      for (const auto& [x2, coef] : a.f_mat(i).column(x).entries())
        res.add_scaled(-(shift * coef.bar()),
                       cols[static_cast<size_t>(x2) * db + yp]);
      cols[static_cast<size_t>(x) * db + y] = std::move(res);
    }
  }
  SMat p(t.dim(), t.dim());
  for (int j = 0; j < t.dim(); ++j) p.set_column(j, std::move(cols[j]));
  return p;
}

BasedStructure based_irreducible(const RootDatum& datum, const Weight& la) {
  Module m = irreducible(datum, la);
  return global_basis(m, bar_irreducible(m), {{m.highest_vector(), ""}});
}

SVec pure_tensor(const Module& t, const SVec& u, const SVec& v) {
  std::vector<std::pair<int, RatFn>> e;
  for (const auto& [iu, cu] : u.entries())
    for (const auto& [iv, cv] : v.entries())
      e.emplace_back(t.pair_index(iu, iv), cu * cv);
  return SVec::from_entries(std::move(e));
}

BasedStructure based_tensor(const BasedStructure& a, const BasedStructure& b) {
  Module t = tensor(a.mod, b.mod);
  Crystal tc = tensor_crystal(a.crystal, b.crystal);
  SMat p = bar_tensor(t);
  std::vector<SVec> reps(t.dim());
  for (int ia = 0; ia < a.crystal.size(); ++ia)
    for (int ib = 0; ib < b.crystal.size(); ++ib)
      reps[t.pair_index(ia, ib)] = pure_tensor(t, a.global[ia], b.global[ib]);
  std::vector<SVec> globals = bar_fix(t, p, tc, reps);
  return {std::move(t), std::move(tc), std::move(reps), std::move(globals),
          std::move(p)};
}

std::vector<std::pair<int, RatFn>> BasedStructure::in_global(
    const SVec& v) const {
  std::map<Weight, std::vector<std::pair<int, RatFn>>> parts;
  for (const auto& [row, c] : v.entries())
    parts[mod.weight_of(row)].emplace_back(row, c);
  std::map<Weight, std::vector<int>> by_weight;
  for (int k = 0; k < crystal.size(); ++k)
    by_weight[crystal.wt(k)].push_back(k);

  std::vector<std::pair<int, RatFn>> out;
  for (auto& [w, rows] : parts) {
    const auto& blk_rows = mod.block(w);
    auto bit = by_weight.find(w);
    if (bit == by_weight.end())
      throw std::logic_error("in_global: weight outside the crystal");
    const auto& blk_elems = bit->second;
    const int bs = static_cast<int>(blk_rows.size());
    if (static_cast<int>(blk_elems.size()) != bs)
      throw std::logic_error("in_global: basis does not fill the block");
    std::map<int, int> rowpos;
    for (int pos = 0; pos < bs; ++pos) rowpos[blk_rows[pos]] = pos;
    Dense ma(bs, bs);
    for (int c = 0; c < bs; ++c)
      for (const auto& [row, val] : global[blk_elems[c]].entries())
        ma.at(rowpos.at(row), c) = val;
    std::vector<RatFn> rhs(bs);
    for (const auto& [row, val] : rows) rhs[rowpos.at(row)] = val;
    auto x = solve_square(std::move(ma), {std::move(rhs)})[0];
    for (int c = 0; c < bs; ++c)
      if (!x[c].is_zero()) out.emplace_back(blk_elems[c], x[c]);
  }
  std::sort(out.begin(), out.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  return out;
}

// ---------------------------------------------------------------------------
// Highest-weight vectors and canonical lifts.

namespace {

struct HwCol {
  SVec v;
  Weight wt;
  int parent;  // index into the same column list, -1 for the root
  int gen;
};

struct HwData {
  std::vector<int> order;                // hw elements, D(b) ascending
  std::map<int, SVec> vec;               // hw element -> v_b
  std::map<int, std::vector<HwCol>> cols;  // F-closure with provenance
};

HwData hw_data(const BasedStructure& m) {
  const RootDatum& dt = m.mod.datum();
  const int rank = dt.rank();
  auto hws = hw_elements(m.crystal);

  auto dcount = [&](int hb) {
    int d = 0;
    for (int other : hws)
      if (other != hb && dt.leq(m.crystal.wt(hb), m.crystal.wt(other)) &&
          m.crystal.wt(other) != m.crystal.wt(hb))
        ++d;
    return d;
  };
  std::stable_sort(hws.begin(), hws.end(),
                   [&](int l, int r) { return dcount(l) < dcount(r); });

  HwData out;
  out.order = hws;
  for (int hb : hws) {
    const Weight zeta = m.crystal.wt(hb);
    // Columns of strictly-higher components at weight zeta.
    std::vector<const SVec*> higher;
    for (int done : out.order) {
      if (done == hb) break;
      if (!(dt.leq(zeta, m.crystal.wt(done)) && m.crystal.wt(done) != zeta))
        continue;
      for (const auto& col : out.cols.at(done))
        if (col.wt == zeta) higher.push_back(&col.v);
    }
    SVec vb = m.global[hb];
    if (!higher.empty()) {
      // Solve E_i(G(b) - sum x_c col_c) = 0 for all i at once.
      std::vector<int> rows;  // stacked module coordinates
      std::map<std::pair<int, int>, int> rowpos;
      for (int i = 0; i < rank; ++i) {
        Weight up = add_w(zeta, dt.simple_root(i));
        for (int idx : m.mod.block(up)) {
          rowpos[{i, idx}] = static_cast<int>(rows.size());
          rows.push_back(idx);
        }
      }
      Dense a(static_cast<int>(rows.size()), static_cast<int>(higher.size()));
      std::vector<RatFn> rhs(rows.size());
      for (int i = 0; i < rank; ++i) {
        for (size_t c = 0; c < higher.size(); ++c) {
          SVec img = m.mod.apply_e(i, *higher[c]);
          for (const auto& [row, val] : img.entries())
            a.at(rowpos.at({i, row}), static_cast<int>(c)) = val;
        }
        SVec img = m.mod.apply_e(i, m.global[hb]);
        for (const auto& [row, val] : img.entries())
          rhs[rowpos.at({i, row})] = val;
      }
      auto x = solve_unique(std::move(a), rhs, "hw_vectors");
      for (size_t c = 0; c < higher.size(); ++c)
        vb.add_scaled(-x[c], *higher[c]);
    }
    for (int i = 0; i < rank; ++i)
      if (!m.mod.apply_e(i, vb).is_zero())
        throw std::logic_error("hw_vectors: projection is not highest weight");
    if (m.apply_bar(vb) != vb)
      throw std::logic_error("hw_vectors: projection is not bar-fixed");
    out.vec[hb] = vb;

    // F-closure of v_b with provenance for later replay.
    std::vector<HwCol>& cols = out.cols[hb];
    SpanBuilder sb(m.mod.dim());
    sb.add(vb);
    cols.push_back({vb, zeta, -1, -1});
    for (size_t head = 0; head < cols.size(); ++head) {
      for (int i = 0; i < rank; ++i) {
        SVec img = m.mod.apply_f(i, cols[head].v);
        if (img.is_zero() || !sb.add(img)) continue;
        Weight wdown = cols[head].wt;
        Weight al = dt.simple_root(i);
        for (int k = 0; k < rank; ++k) wdown[k] -= al[k];
        cols.push_back({std::move(img), std::move(wdown),
                        static_cast<int>(head), i});
      }
    }
  }
  return out;
}

}  // namespace

std::vector<std::pair<int, SVec>> hw_vectors(const BasedStructure& m) {
  HwData hd = hw_data(m);
  std::vector<std::pair<int, SVec>> out(hd.vec.begin(), hd.vec.end());
  return out;  // map iteration: ascending element index
}

ModuleMap canonical_lift(const BasedStructure& src, const BasedStructure& dst,
                         const CrystalMorphism& phi) {
  if (phi.src.size() != src.crystal.size() ||
      phi.dst.size() != dst.crystal.size())
    throw std::invalid_argument("canonical_lift: morphism/crystal mismatch");
  HwData hs = hw_data(src);
  HwData hdst = hw_data(dst);

  // Replay the F-closure provenance of every source component on the image
  // highest-weight vector.
  std::map<Weight, std::vector<std::pair<const SVec*, SVec>>> cols_by_weight;
  for (int hb : hs.order) {
    const auto& cols = hs.cols.at(hb);
    int ib = phi.image[hb];
    std::vector<SVec> tcols(cols.size());
    if (ib != -1) {
      auto it = hdst.vec.find(ib);
      if (it == hdst.vec.end())
        throw std::invalid_argument(
            "canonical_lift: image of a highest-weight element is not "
            "highest weight");
      tcols[0] = it->second;
      for (size_t k = 1; k < cols.size(); ++k)
        tcols[k] = dst.mod.apply_f(cols[k].gen, tcols[cols[k].parent]);
    }
    for (size_t k = 0; k < cols.size(); ++k)
      cols_by_weight[cols[k].wt].emplace_back(&cols[k].v, std::move(tcols[k]));
  }

  // Express the source basis per weight block over the closure columns and
  // push the expressions to the replayed images.
  SMat f(dst.mod.dim(), src.mod.dim());
  for (const auto& [w, blk] : src.mod.blocks()) {
    auto cit = cols_by_weight.find(w);
    const int bs = static_cast<int>(blk.size());
    if (cit == cols_by_weight.end() ||
        static_cast<int>(cit->second.size()) != bs)
      throw std::logic_error(
          "canonical_lift: isotypic columns do not fill a weight block");
    std::map<int, int> rowpos;
    for (int p = 0; p < bs; ++p) rowpos[blk[p]] = p;
    Dense a(bs, bs);
    std::vector<std::vector<RatFn>> rhs(bs, std::vector<RatFn>(bs));
    for (int c = 0; c < bs; ++c)
      for (const auto& [row, val] : cit->second[c].first->entries())
        a.at(rowpos.at(row), c) = val;
    for (int u = 0; u < bs; ++u) rhs[u][rowpos.at(blk[u])] = RatFn::one();
    std::vector<std::vector<RatFn>> rhs_cols(bs, std::vector<RatFn>(bs));
    for (int u = 0; u < bs; ++u)
      for (int p = 0; p < bs; ++p) rhs_cols[u][p] = rhs[u][p];
    auto sols = solve_square(std::move(a), rhs_cols);
    for (int u = 0; u < bs; ++u) {
      SVec img;
      for (int c = 0; c < bs; ++c)
        if (!sols[u][c].is_zero())
          img.add_scaled(sols[u][c], cit->second[c].second);
      f.set_column(blk[u], std::move(img));
    }
  }
  ModuleMap out{src.mod, dst.mod, std::move(f)};
  if (!out.intertwines())
    throw std::logic_error("canonical_lift: lifted map fails to intertwine");
  for (int hb : hs.order) {
    int ib = phi.image[hb];
    SVec want = ib == -1 ? SVec() : hdst.vec.at(ib);
    if (out.apply(hs.vec.at(hb)) != want)
      throw std::logic_error(
          "canonical_lift: highest-weight vectors not matched");
  }
  return out;
}

BasedHomReport is_based_hom(const ModuleMap& f, const BasedStructure& src,
                            const BasedStructure& dst) {
  BasedHomReport rep;
  rep.lattice_ok = rep.integral_ok = rep.fibers_ok = true;
  rep.exact_on_globals = true;
  rep.induced.assign(src.crystal.size(), -1);
  auto note = [&](const std::string& s) {
    if (rep.witness.empty()) rep.witness = s;
  };

  for (int b = 0; b < src.crystal.size(); ++b) {
    SVec img = f.apply(src.global[b]);
    if (img.is_zero()) continue;
    auto coeffs = dst.in_global(img);
    int cls = -1;
    bool unit_ok = true;
    for (const auto& [elem, c] : coeffs) {
      if (!c.in_laurent_ring()) {
        rep.integral_ok = false;
        note("image of " + src.crystal.label(b) +
             " has a non-Laurent coefficient at " + dst.crystal.label(elem));
      }
      if (!c.regular_at_inf()) {
        rep.lattice_ok = false;
        unit_ok = false;
        note("image of " + src.crystal.label(b) +
             " leaves the lattice at " + dst.crystal.label(elem));
        continue;
      }
      Rat e = c.ev_inf();
      if (e == 0) continue;
      if (cls != -1 || e != 1) {
        rep.lattice_ok = false;
        unit_ok = false;
        note("image of " + src.crystal.label(b) +
             " has a non-unit class at q = infinity");
      } else {
        cls = elem;
      }
    }
    if (unit_ok) rep.induced[b] = cls;
    SVec want = (rep.induced[b] == -1) ? SVec() : dst.global[rep.induced[b]];
    if (img != want) rep.exact_on_globals = false;
  }

  SMat lhs = compose(f.mat, src.bar_mat);
  SMat rhs = compose(dst.bar_mat, bar_entrywise(f.mat));
  rep.bar_ok = (lhs == rhs);
  if (!rep.bar_ok) note("map does not commute with the bar involutions");

  std::set<int> seen;
  for (int b = 0; b < src.crystal.size(); ++b) {
    if (rep.induced[b] == -1) continue;
    if (!seen.insert(rep.induced[b]).second) {
      rep.fibers_ok = false;
      note("induced crystal map collides at " +
           dst.crystal.label(rep.induced[b]));
      break;
    }
  }
  return rep;
}

ModuleMap suff_cond_lift(const BasedStructure& src, const BasedStructure& dst,
                         const CrystalMorphism& phi) {
  ModuleMap f = canonical_lift(src, dst, phi);
  HwData hs = hw_data(src);
  for (int hb : hs.order) {
    for (int i = 0; i < src.mod.datum().rank(); ++i) {
      SVec lhs = f.apply(src.mod.apply_e(i, src.global[hb]));
      SVec rhs = phi.image[hb] == -1
                     ? SVec()
                     : dst.mod.apply_e(i, dst.global[phi.image[hb]]);
      if (lhs != rhs) throw HypothesisFailed(i, src.crystal.label(hb));
    }
  }
  for (int b = 0; b < src.crystal.size(); ++b) {
    SVec want = phi.image[b] == -1 ? SVec() : dst.global[phi.image[b]];
    if (f.apply(src.global[b]) != want)
      throw std::logic_error(
          "suff_cond_lift: conclusion failed despite the hypothesis");
  }
  BasedHomReport rep = is_based_hom(f, src, dst);
  if (!rep.ok())
    throw std::logic_error("suff_cond_lift: lifted map is not based: " +
                           rep.witness);
  return f;
}

ModuleMap product_embedding(const BasedStructure& sum,
                            const BasedStructure& prod) {
  auto tops = hw_elements(sum.crystal);
  if (tops.size() != 1)
    throw std::invalid_argument("product_embedding: source not irreducible");
  int target = -1;
  for (int h : hw_elements(prod.crystal)) {
    if (prod.crystal.wt(h) == sum.crystal.wt(tops[0])) {
      if (target != -1)
        throw std::invalid_argument(
            "product_embedding: ambiguous top component");
      target = h;
    }
  }
  if (target == -1)
    throw std::invalid_argument("product_embedding: no top component");
  CrystalMorphism phi =
      strict_extension(sum.crystal, prod.crystal, {{tops[0], target}});
  return suff_cond_lift(sum, prod, phi);
}

SVec invariant_functional(const Module& t, const SVec& normalize_at) {
  const int n = t.dim();
  const int r = t.datum().rank();
  Dense a(2 * r * n, n);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < n; ++j) {
      for (const auto& [row, val] : t.e_mat(i).column(j).entries())
        a.at(2 * i * n + j, row) = val;
      for (const auto& [row, val] : t.f_mat(i).column(j).entries())
        a.at((2 * i + 1) * n + j, row) = val;
    }
  }
  auto ker = nullspace(std::move(a));
  if (ker.size() != 1)
    throw std::logic_error(
        "invariant_functional: invariant space is not one-dimensional");
  std::vector<std::pair<int, RatFn>> e;
  for (int k = 0; k < n; ++k)
    if (!ker[0][k].is_zero()) e.emplace_back(k, ker[0][k]);
  SVec d = SVec::from_entries(std::move(e));
  RatFn v = dot(d, normalize_at);
  if (v.is_zero())
    throw std::logic_error(
        "invariant_functional: vanishing at the normalization vector");
  return d.scaled(v.inverse());
}

// ---------------------------------------------------------------------------
// Based submodules.

namespace {

SubBased sub_from_elements(const BasedStructure& parent,
                           const std::vector<int>& elements) {
  const RootDatum& dt = parent.mod.datum();
  const int rank = dt.rank();
  const int n = static_cast<int>(elements.size());
  std::vector<int> sub_idx(parent.crystal.size(), -1);
  for (int k = 0; k < n; ++k) sub_idx[elements[k]] = k;

  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < rank; ++i) {
      for (int tgt : {parent.crystal.f(i, elements[k]),
                      parent.crystal.e(i, elements[k])}) {
        if (tgt != -1 && sub_idx[tgt] == -1)
          throw NotBasedSpan(
              "submodule: element set is not closed under crystal arrows");
      }
    }
  }

  // Generator action in the basis of retained global vectors.
  std::vector<Weight> wts(n);
  for (int k = 0; k < n; ++k) wts[k] = parent.crystal.wt(elements[k]);
  std::vector<SMat> emats(rank, SMat(n, n)), fmats(rank, SMat(n, n));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < rank; ++i) {
      for (int dir = 0; dir < 2; ++dir) {
        SVec img = dir == 0
                       ? parent.mod.apply_e(i, parent.global[elements[k]])
                       : parent.mod.apply_f(i, parent.global[elements[k]]);
        if (img.is_zero()) continue;
        std::vector<std::pair<int, RatFn>> e;
        for (const auto& [elem, c] : parent.in_global(img)) {
          if (sub_idx[elem] == -1)
            throw NotBasedSpan(
                "submodule: generator action leaves the global span");
          e.emplace_back(sub_idx[elem], c);
        }
        (dir == 0 ? emats[i] : fmats[i])
            .set_column(k, SVec::from_entries(std::move(e)));
      }
    }
  }
  Module carrier =
      module_from_action(dt, std::move(wts), std::move(emats),
                         std::move(fmats));

  std::vector<Crystal::Element> celems(n);
  std::vector<std::vector<int>> farr(rank, std::vector<int>(n, -1));
  for (int k = 0; k < n; ++k) {
    celems[k] = {parent.crystal.wt(elements[k]),
                 parent.crystal.label(elements[k])};
    for (int i = 0; i < rank; ++i) {
      int tgt = parent.crystal.f(i, elements[k]);
      farr[i][k] = tgt == -1 ? -1 : sub_idx[tgt];
    }
  }
  Crystal sub_crystal(dt, std::move(celems), std::move(farr));

  std::vector<SVec> units(n);
  for (int k = 0; k < n; ++k) units[k] = SVec::unit(k);
  BasedStructure sub{std::move(carrier), std::move(sub_crystal), units, units,
                     SMat::identity(n)};

  SMat emb(parent.mod.dim(), n);
  for (int k = 0; k < n; ++k) emb.set_column(k, parent.global[elements[k]]);
  ModuleMap embed{sub.mod, parent.mod, std::move(emb)};
  if (!embed.intertwines())
    throw std::logic_error("submodule: embedding fails to intertwine");
  return {std::move(sub), std::move(embed), elements};
}

}  // namespace

SubBased submodule_generated(const BasedStructure& parent,
                             const std::vector<SVec>& gens) {
  SpanBuilder sb(parent.mod.dim());
  std::deque<SVec> work;
  for (const auto& g : gens)
    if (!g.is_zero() && sb.add(g)) work.push_back(g);
  const int rank = parent.mod.datum().rank();
  while (!work.empty()) {
    SVec v = std::move(work.front());
    work.pop_front();
    for (int i = 0; i < rank; ++i) {
      for (int dir = 0; dir < 2; ++dir) {
        SVec img = dir == 0 ? parent.mod.apply_e(i, v)
                            : parent.mod.apply_f(i, v);
        if (!img.is_zero() && sb.add(img)) work.push_back(img);
      }
    }
  }
  std::vector<int> elements;
  for (int b = 0; b < parent.crystal.size(); ++b)
    if (sb.contains(parent.global[b])) elements.push_back(b);
  // The span must be exactly the coordinate span of the retained globals.
  SpanBuilder check(parent.mod.dim());
  for (int b : elements) check.add(parent.global[b]);
  if (check.rank() != sb.rank())
    throw NotBasedSpan("submodule: span is not spanned by global vectors");
  return sub_from_elements(parent, elements);
}

SubBased isotypic_above(const BasedStructure& parent, const Weight& la,
                        bool strict) {
  const RootDatum& dt = parent.mod.datum();
  std::set<int> keep;
  for (int h : hw_elements(parent.crystal)) {
    const Weight w = parent.crystal.wt(h);
    if (!dt.leq(la, w)) continue;
    if (strict && w == la) continue;
    for (int x : component(parent.crystal, h)) keep.insert(x);
  }
  return sub_from_elements(parent,
                           std::vector<int>(keep.begin(), keep.end()));
}

SubBased isotypic_at_least(const BasedStructure& parent, int hw_element) {
  if (!parent.crystal.is_hw(hw_element))
    throw std::invalid_argument("isotypic_at_least: not a highest-weight "
                                "element");
  const RootDatum& dt = parent.mod.datum();
  const Weight base = parent.crystal.wt(hw_element);
  std::set<int> keep;
  for (int x : component(parent.crystal, hw_element)) keep.insert(x);
  for (int h : hw_elements(parent.crystal)) {
    const Weight w = parent.crystal.wt(h);
    if (dt.leq(base, w) && w != base)
      for (int x : component(parent.crystal, h)) keep.insert(x);
  }
  return sub_from_elements(parent,
                           std::vector<int>(keep.begin(), keep.end()));
}

// ---------------------------------------------------------------------------
// Cache of irreducible based structures.

const BasedStructure& BasedCache::at(const Weight& la) {
  auto it = cache_.find(la);
  if (it == cache_.end())
    it = cache_.emplace(la, based_irreducible(datum_, la)).first;
  return it->second;
}

const BasedStructure& BasedCache::at_tensor(const Weight& a, const Weight& b) {
  auto key = std::make_pair(a, b);
  auto it = tensor_cache_.find(key);
  if (it == tensor_cache_.end())
    it = tensor_cache_.emplace(key, based_tensor(at(a), at(b))).first;
  return it->second;
}

CrystalProvider BasedCache::provider() {
  return [this](const Weight& la) -> Crystal { return at(la).crystal; };
}

}  // namespace qgrp
