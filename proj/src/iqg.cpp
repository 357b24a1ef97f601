#include "qgrp/iqg.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>

namespace qgrp {

namespace {

SMat k_matrix(const Module& m, const Coweight& h) {
  SMat k(m.dim(), m.dim());
  for (int r = 0; r < m.dim(); ++r)
    k.set_column(r, m.apply_k(h, SVec::unit(r)));
  return k;
}

Coweight negated(Coweight h) {
  for (auto& x : h) x = -x;
  return h;
}

// Generators the involution must intertwine, as pairs (action, bar-image
// action): E_j and F_j at black nodes and the white B_i are fixed by the
// bar operation, while K_h maps to K_{-h}.
struct GenPair {
  SMat act;
  SMat bar_act;
  std::string name;
};

std::vector<GenPair> generator_pairs(const AdmissiblePair& pair,
                                     const Module& m,
                                     const std::vector<SMat>& b_mat) {
  std::vector<GenPair> gens;
  for (int i = 0; i < pair.datum.rank(); ++i) {
    if (pair.is_black(i)) {
      gens.push_back({m.e_mat(i), m.e_mat(i), "E_" + std::to_string(i)});
      gens.push_back({b_mat[i], b_mat[i], "F_" + std::to_string(i)});
    } else {
      gens.push_back({b_mat[i], b_mat[i], "B_" + std::to_string(i)});
    }
  }
  int t = 0;
  for (const Coweight& h : pair.y_imath_basis()) {
    gens.push_back(
        {k_matrix(m, h), k_matrix(m, negated(h)), "K_" + std::to_string(t++)});
  }
  return gens;
}

// Propagate the involution from the cyclic vector: each kept pair (u, p)
// records that the involution matrix sends u to p, and generator action
// produces new pairs.  Succeeds only when the translates span the module.
std::optional<SMat> ibar_cyclic(const std::vector<GenPair>& gens,
                                const SVec& cyclic, int dim) {
  std::vector<SMat> barred;
  barred.reserve(gens.size());
  for (const GenPair& g : gens) barred.push_back(g.act.bar());

  SpanBuilder span(dim);
  std::vector<SVec> us, ps;
  std::deque<int> queue;
  SVec u0 = cyclic.bar();
  if (!span.add(u0)) return std::nullopt;
  us.push_back(std::move(u0));
  ps.push_back(cyclic);
  queue.push_back(0);
  while (!queue.empty() && span.rank() < dim) {
    int k = queue.front();
    queue.pop_front();
    for (size_t t = 0; t < gens.size(); ++t) {
      SVec u2 = barred[t].apply(us[k]);
      if (u2.is_zero() || !span.add(u2)) continue;
      us.push_back(std::move(u2));
      ps.push_back(gens[t].bar_act.apply(ps[k]));
      queue.push_back(static_cast<int>(us.size()) - 1);
      if (span.rank() == dim) break;
    }
  }
  if (span.rank() < dim) return std::nullopt;
  SMat p(dim, dim);
  for (int r = 0; r < dim; ++r) {
    auto c = span.express(SVec::unit(r));
    if (!c) return std::nullopt;
    SVec col;
    for (size_t k = 0; k < c->size(); ++k)
      if (!(*c)[k].is_zero()) col.add_scaled((*c)[k], ps[k]);
    p.set_column(r, std::move(col));
  }
  return p;
}

// Pairings of each basis weight against the fixed-coweight lattice; the
// involution preserves this class, so its triangular correction is blocked
// by it.
std::vector<std::vector<Rat>> class_keys(const AdmissiblePair& pair,
                                         const Module& m) {
  auto ys = pair.y_imath_basis();
  std::vector<std::vector<Rat>> cls(m.dim());
  for (int r = 0; r < m.dim(); ++r) {
    cls[r].reserve(ys.size());
    for (const Coweight& h : ys)
      cls[r].push_back(pair.datum.pairing(h, m.weight_of(r)));
  }
  return cls;
}

// Fallback: solve for the involution in the form (1 + N) * psi with psi the
// plain bar of the based module and N supported on strictly dominance-raising
// positions within a class.  The intertwining constraints and the fixed-
// vector normalization give an affine linear system in the entries of N;
// success requires a unique solution.
std::optional<SMat> ibar_quasik(const AdmissiblePair& pair,
                                const BasedStructure& based,
                                const std::vector<GenPair>& gens,
                                const SVec& cyclic) {
  const Module& m = based.mod;
  const RootDatum& dt = m.datum();
  int dim = m.dim();
  auto cls = class_keys(pair, m);

  // Support: N[r][c] may be nonzero only when wt_c < wt_r strictly in the
  // dominance order and the two indices share a class.
  std::vector<std::pair<int, int>> support;
  std::map<std::pair<int, int>, int> index_of;
  std::vector<std::vector<int>> rows_with_col(dim);  // c -> rows r, (r,c) in S
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      if (r == c || cls[r] != cls[c]) continue;
      if (!dt.leq(m.weight_of(c), m.weight_of(r)) ||
          m.weight_of(c) == m.weight_of(r))
        continue;
      index_of[{r, c}] = static_cast<int>(support.size());
      rows_with_col[c].push_back(r);
      support.emplace_back(r, c);
    }
  int unknowns = static_cast<int>(support.size());

  std::vector<std::vector<RatFn>> eq_rows;
  std::vector<RatFn> eq_rhs;
  auto add_equation = [&](std::vector<RatFn> row, RatFn rhs) {
    bool empty = true;
    for (const RatFn& x : row)
      if (!x.is_zero()) {
        empty = false;
        break;
      }
    if (empty && rhs.is_zero()) return true;
    if (empty) return false;  // inconsistent on its face
    eq_rows.push_back(std::move(row));
    eq_rhs.push_back(std::move(rhs));
    return true;
  };

  const SMat& d = based.bar_mat;
  for (const GenPair& g : gens) {
    // N*a - gb*N*d = r0, with a = d * bar(act), r0 = gb*d - a.
    SMat a = compose(d, g.act.bar());
    const SMat& gb = g.bar_act;
    SMat r0 = compose(gb, d) - a;
    for (int j = 0; j < dim; ++j) {
      // Candidate equation rows i for this column j.
      std::vector<char> seen(dim, 0);
      std::vector<int> is;
      auto mark = [&](int i) {
        if (!seen[i]) {
          seen[i] = 1;
          is.push_back(i);
        }
      };
      for (const auto& [c, av] : a.column(j).entries()) {
        (void)av;
        for (int i : rows_with_col[c]) mark(i);
      }
      for (const auto& [c, dv] : d.column(j).entries()) {
        (void)dv;
        for (int r : rows_with_col[c])
          for (const auto& [i, gv] : gb.column(r).entries()) {
            (void)gv;
            mark(i);
          }
      }
      for (const auto& [i, rv] : r0.column(j).entries()) {
        (void)rv;
        mark(i);
      }
      for (int i : is) {
        std::vector<RatFn> row(unknowns);
        for (const auto& [c, av] : a.column(j).entries()) {
          auto it = index_of.find({i, c});
          if (it != index_of.end()) row[it->second] += av;
        }
        for (const auto& [c, dv] : d.column(j).entries())
          for (int r : rows_with_col[c]) {
            RatFn gv = gb.at(i, r);
            if (!gv.is_zero()) row[index_of[{r, c}]] -= gv * dv;
          }
        if (!add_equation(std::move(row), r0.at(i, j))) return std::nullopt;
      }
    }
  }
  // Normalization: N * psi(cyclic) = cyclic - psi(cyclic).
  SVec s = based.apply_bar(cyclic);
  SVec resid = cyclic - s;
  for (int i = 0; i < dim; ++i) {
    std::vector<RatFn> row(unknowns);
    for (const auto& [c, sv] : s.entries()) {
      auto it = index_of.find({i, c});
      if (it != index_of.end()) row[it->second] += sv;
    }
    if (!add_equation(std::move(row), resid.at(i))) return std::nullopt;
  }

  Dense sys(static_cast<int>(eq_rows.size()), unknowns + 1);
  for (int r = 0; r < sys.rows; ++r) {
    for (int c = 0; c < unknowns; ++c) sys.at(r, c) = eq_rows[r][c];
    sys.at(r, unknowns) = eq_rhs[r];
  }
  std::vector<int> pivots = rref(sys);
  if (!pivots.empty() && pivots.back() == unknowns) return std::nullopt;
  if (static_cast<int>(pivots.size()) < unknowns) return std::nullopt;

  SMat n(dim, dim);
  for (int k = 0; k < unknowns; ++k) {
    const RatFn& v = sys.at(k, unknowns);
    if (!v.is_zero()) n.set(support[pivots[k]].first, support[pivots[k]].second, v);
  }
  return compose(SMat::identity(dim) + n, d);
}

std::string verify_ibar(const std::vector<GenPair>& gens, const SVec& cyclic,
                        const SMat& p) {
  if (p.apply(cyclic.bar()) != cyclic) return "cyclic vector not fixed";
  for (const GenPair& g : gens)
    if (compose(p, g.act.bar()) != compose(g.bar_act, p))
      return "generator " + g.name + " not intertwined";
  if (compose(p, p.bar()) != SMat::identity(p.rows()))
    return "involution does not square to the identity";
  return {};
}

}  // namespace

SMat b_matrix(const AdmissiblePair& pair, const Module& m,
              const BraidOperator& t_black, int i) {
  if (pair.is_black(i)) return m.f_mat(i);
  int dim = m.dim();
  SMat kinv(dim, dim);
  for (int r = 0; r < dim; ++r)
    kinv.set_column(r, m.apply_ki(i, -1, SVec::unit(r)));
  SMat twist = compose(
      t_black.matrix(),
      compose(m.e_mat(pair.tau[i]), t_black.inverse_matrix()));
  SMat b = m.f_mat(i) + compose(twist, kinv).scaled(pair.varsigma.at(i));
  auto kap = pair.kappa.find(i);
  if (kap != pair.kappa.end() && !kap->second.is_zero())
    b = b + kinv.scaled(kap->second);
  return b;
}

std::vector<std::pair<int, RatFn>> IModuleContext::in_iglobal(
    const SVec& v) const {
  SVec g;
  for (const auto& [idx, c] : based.in_global(v))
    g.add_scaled(c, SVec::unit(idx));
  return icoeff_inv.apply(g).entries();
}

IModuleContext make_icontext(const AdmissiblePair& pair, BasedStructure based,
                             SVec cyclic) {
  IModuleContext ctx;
  ctx.pair = pair;
  ctx.based = std::move(based);
  ctx.cyclic = std::move(cyclic);
  const Module& m = ctx.based.mod;
  const RootDatum& dt = m.datum();
  int dim = m.dim();

  ctx.t_black = braid_T_w(m, pair.w_black);
  ctx.b_mat.reserve(dt.rank());
  for (int i = 0; i < dt.rank(); ++i)
    ctx.b_mat.push_back(b_matrix(pair, m, ctx.t_black, i));

  auto gens = generator_pairs(pair, m, ctx.b_mat);
  std::string err;
  if (auto p = ibar_cyclic(gens, ctx.cyclic, dim)) {
    err = verify_ibar(gens, ctx.cyclic, *p);
    if (err.empty()) {
      ctx.ibar_mat = std::move(*p);
      ctx.ibar_path = "cyclic";
    }
  } else {
    err = "translates of the cyclic vector do not span";
  }
  if (ctx.ibar_path.empty()) {
    auto p = ibar_quasik(pair, ctx.based, gens, ctx.cyclic);
    if (!p)
      throw NonUniqueIbar(
          "triangular correction is not uniquely solvable (cyclic route: " +
          err + ")");
    err = verify_ibar(gens, ctx.cyclic, *p);
    if (!err.empty()) throw NonUniqueIbar("fallback solution invalid: " + err);
    ctx.ibar_mat = std::move(*p);
    ctx.ibar_path = "quasi-k";
  }

  // The involution in global-basis coordinates.
  SMat mpsi(dim, dim);
  for (int b = 0; b < dim; ++b) {
    SVec img = ctx.apply_ibar(ctx.based.global[b]);
    SVec col;
    for (const auto& [idx, c] : ctx.based.in_global(img))
      col.add_scaled(c, SVec::unit(idx));
    mpsi.set_column(b, std::move(col));
  }
  const Crystal& crys = ctx.based.crystal;
  for (int b = 0; b < dim; ++b) {
    if (mpsi.at(b, b) != RatFn::one())
      throw TriangularityFailure("involution is not unitriangular at element " +
                                 std::to_string(b));
    for (const auto& [e, c] : mpsi.column(b).entries()) {
      (void)c;
      if (e == b) continue;
      if (!dt.leq(crys.wt(b), crys.wt(e)) || crys.wt(e) == crys.wt(b))
        throw TriangularityFailure(
            "involution correction at element " + std::to_string(b) +
            " is not dominance-raising (hits " + std::to_string(e) + ")");
    }
  }

  // Distinguished basis: per column, close up the support, then solve
  // z - bar(z) = s by height, keeping only negative exponents.
  ctx.icoeff = SMat::identity(dim);
  ctx.iglobal.resize(dim);
  for (int b = 0; b < dim; ++b) {
    std::vector<int> closure;
    std::vector<char> in_closure(dim, 0);
    std::deque<int> todo;
    auto push = [&](int e) {
      if (e != b && !in_closure[e]) {
        in_closure[e] = 1;
        closure.push_back(e);
        todo.push_back(e);
      }
    };
    for (const auto& [e, c] : mpsi.column(b).entries()) {
      (void)c;
      push(e);
    }
    while (!todo.empty()) {
      int a = todo.front();
      todo.pop_front();
      for (const auto& [e, c] : mpsi.column(a).entries()) {
        (void)c;
        push(e);
      }
    }
    std::sort(closure.begin(), closure.end(), [&](int x, int y) {
      return dt.height(crys.wt(x)) < dt.height(crys.wt(y));
    });
    std::map<int, RatFn> z;
    z[b] = RatFn::one();
    for (int e : closure) {
      RatFn s;
      for (const auto& [a, za] : z) {
        if (a == e) continue;
        RatFn me = mpsi.at(e, a);
        if (!me.is_zero()) s += me * za.bar();
      }
      if (s.is_zero()) continue;
      if (!s.in_laurent_ring())
        throw TriangularityFailure("correction series is not Laurent at " +
                                   std::to_string(e));
      Laurent sl = s.to_laurent();
      if (sl.bar() != -sl)
        throw TriangularityFailure(
            "correction series is not bar-antisymmetric at " +
            std::to_string(e));
      Laurent zneg;
      for (const auto& [k, c] : sl.terms())
        if (k < 0) zneg += Laurent::monomial(c, k);
      RatFn ze(zneg);
      if (!ze.in_qinv_int_polys())
        throw TriangularityFailure("correction at " + std::to_string(e) +
                                   " is not in q^{-1}Z[q^{-1}]");
      if (!ze.is_zero()) z[e] = ze;
    }
    SVec col, vec;
    for (const auto& [a, za] : z) {
      col.add_scaled(za, SVec::unit(a));
      vec.add_scaled(za, ctx.based.global[a]);
    }
    if (ctx.apply_ibar(vec) != vec)
      throw TriangularityFailure("corrected basis element " +
                                 std::to_string(b) + " is not fixed");
    ctx.icoeff.set_column(b, std::move(col));
    ctx.iglobal[b] = std::move(vec);
  }

  // Unipotent inverse via the terminating Neumann series.
  SMat strict = ctx.icoeff - SMat::identity(dim);
  SMat acc = SMat::identity(dim);
  SMat term = SMat::identity(dim);
  while (true) {
    term = compose(strict, term).scaled(RatFn(-1L));
    if (term.is_zero()) break;
    acc = acc + term;
  }
  ctx.icoeff_inv = std::move(acc);
  return ctx;
}

SVec invariant_vector(const IModuleContext& ctx) {
  const Module& m = ctx.based.mod;
  int dim = m.dim();
  std::vector<SMat> constraints;
  for (int i = 0; i < m.datum().rank(); ++i) {
    if (ctx.pair.is_black(i)) {
      constraints.push_back(m.e_mat(i));
      constraints.push_back(m.f_mat(i));
    } else {
      constraints.push_back(ctx.b_mat[i]);
    }
  }
  for (const Coweight& h : ctx.pair.y_imath_basis())
    constraints.push_back(k_matrix(m, h) - SMat::identity(dim));

  Dense sys(static_cast<int>(constraints.size()) * dim, dim);
  int row0 = 0;
  for (const SMat& a : constraints) {
    for (int c = 0; c < dim; ++c)
      for (const auto& [r, v] : a.column(c).entries()) sys.at(row0 + r, c) = v;
    row0 += dim;
  }
  auto sols = nullspace(std::move(sys));
  if (sols.size() != 1) throw WrongDimension(static_cast<int>(sols.size()));
  SVec w;
  for (int r = 0; r < dim; ++r)
    if (!sols[0][r].is_zero()) w.add_scaled(sols[0][r], SVec::unit(r));

  auto hws = hw_elements(ctx.based.crystal);
  if (hws.size() != 1)
    throw std::logic_error("invariant vector needs an irreducible module");
  RatFn lead;
  for (const auto& [idx, c] : ctx.based.in_global(w))
    if (idx == hws[0]) lead = c;
  if (lead.is_zero())
    throw std::logic_error("invariant vector misses the highest-weight line");
  return w.scaled(lead.inverse());
}

ModuleMap functional_tensor_id(const ModuleMap& g, const Module& tensor,
                               const Module& rest) {
  int da = g.src.dim(), dr = rest.dim();
  if (g.dst.dim() != 1 || tensor.dim() != da * dr)
    throw std::logic_error("functional_tensor_id: shape mismatch");
  SMat mat(dr, tensor.dim());
  for (int a = 0; a < da; ++a) {
    RatFn ga = g.mat.at(0, a);
    if (ga.is_zero()) continue;
    for (int r = 0; r < dr; ++r) mat.set(r, a * dr + r, ga);
  }
  return ModuleMap{tensor, rest, std::move(mat)};
}

ModuleMap g_functional(BasedCache& cache, const AdmissiblePair& pair, int m) {
  const RootDatum& dt = pair.datum;
  Weight zero(dt.rank(), 0);
  const Module& triv = cache.at(zero).mod;
  if (m == 0) return identity_map(triv);

  Weight varpi = pair.varpi;
  if (m == 1) {
    BasedStructure v = cache.at(varpi);
    int hw = hw_elements(v.crystal).at(0);
    IModuleContext ctx = make_icontext(pair, v, v.global[hw]);
    SVec w0 = invariant_vector(ctx);
    RatFn norm = v.mod.form(v.global[hw], w0);
    SMat row(1, v.mod.dim());
    for (int c = 0; c < v.mod.dim(); ++c) {
      RatFn fc = v.mod.form(SVec::unit(c), w0);
      if (!fc.is_zero()) row.set(0, c, fc / norm);
    }
    return ModuleMap{v.mod, triv, std::move(row)};
  }

  Weight prev = varpi;
  for (auto& x : prev) x *= m - 1;
  Weight full = varpi;
  for (auto& x : full) x *= m;
  ModuleMap gm1 = g_functional(cache, pair, m - 1);
  const BasedStructure& tens = cache.at_tensor(prev, varpi);
  ModuleMap chi = product_embedding(cache.at(full), tens);
  ModuleMap collapse =
      functional_tensor_id(gm1, tens.mod, cache.at(varpi).mod);
  return compose_maps(g_functional(cache, pair, 1),
                      compose_maps(collapse, chi));
}

BasedIHomReport is_based_ihom(const ModuleMap& f, const IModuleContext& src,
                              const IModuleContext& dst) {
  BasedIHomReport rep;
  const AdmissiblePair& pair = src.pair;
  const RootDatum& dt = pair.datum;

  rep.intertwines_ok = true;
  for (int i = 0; i < dt.rank() && rep.intertwines_ok; ++i) {
    if (compose(f.mat, src.b_mat[i]) != compose(dst.b_mat[i], f.mat)) {
      rep.intertwines_ok = false;
      rep.witness = "generator B_" + std::to_string(i) + " not intertwined";
    } else if (pair.is_black(i) &&
               compose(f.mat, src.based.mod.e_mat(i)) !=
                   compose(dst.based.mod.e_mat(i), f.mat)) {
      rep.intertwines_ok = false;
      rep.witness = "generator E_" + std::to_string(i) + " not intertwined";
    }
  }
  if (rep.intertwines_ok)
    for (const Coweight& h : pair.y_imath_basis())
      if (compose(f.mat, k_matrix(src.based.mod, h)) !=
          compose(k_matrix(dst.based.mod, h), f.mat)) {
        rep.intertwines_ok = false;
        rep.witness = "a Cartan element is not intertwined";
        break;
      }

  rep.ibar_ok =
      compose(f.mat, src.ibar_mat) == compose(dst.ibar_mat, f.mat.bar());
  if (!rep.ibar_ok && rep.witness.empty())
    rep.witness = "involutions are not intertwined";

  int n = static_cast<int>(src.iglobal.size());
  rep.induced.assign(n, -1);
  rep.lattice_ok = true;
  rep.integral_ok = true;
  rep.exact_on_iglobals = true;
  for (int b = 0; b < n; ++b) {
    SVec img = f.apply(src.iglobal[b]);
    auto coeffs = dst.in_iglobal(img);
    int at_inf = -1;
    for (const auto& [idx, c] : coeffs) {
      if (!c.in_laurent_ring() && rep.integral_ok) {
        rep.integral_ok = false;
        if (rep.witness.empty())
          rep.witness = "image of element " + std::to_string(b) +
                        " has a non-Laurent coefficient";
      }
      if (!c.regular_at_inf()) {
        rep.lattice_ok = false;
        if (rep.witness.empty())
          rep.witness = "image of element " + std::to_string(b) +
                        " has a pole at q = infinity";
        continue;
      }
      Rat v = c.ev_inf();
      if (v == 0) continue;
      if (v != 1 || at_inf != -1) {
        rep.lattice_ok = false;
        if (rep.witness.empty())
          rep.witness = "image of element " + std::to_string(b) +
                        " is not a unit class at q = infinity";
      } else {
        at_inf = idx;
      }
    }
    if (!rep.lattice_ok) break;
    rep.induced[b] = at_inf;
    if (at_inf == -1 ? !img.is_zero() : img != dst.iglobal[at_inf])
      rep.exact_on_iglobals = false;
  }

  rep.fibers_ok = rep.lattice_ok;
  if (rep.lattice_ok) {
    std::map<int, int> hit;
    for (int b = 0; b < n; ++b) {
      if (rep.induced[b] == -1) continue;
      auto [it, fresh] = hit.emplace(rep.induced[b], b);
      if (!fresh) {
        rep.fibers_ok = false;
        if (rep.witness.empty())
          rep.witness = "elements " + std::to_string(it->second) + " and " +
                        std::to_string(b) + " share a nonzero image";
        break;
      }
    }
  }
  return rep;
}

}  // namespace qgrp
