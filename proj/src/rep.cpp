#include "qgrp/rep.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <tuple>

namespace qgrp {

int& size_bound() {
  static int bound = 20000;
  return bound;
}

struct Module::Data {
  RootDatum datum;
  int dim = 0;
  std::vector<Weight> wt;
  std::map<Weight, std::vector<int>> blocks;
  std::vector<int> pos_in_block;
  std::vector<SMat> emat, fmat;

  bool irr = false;
  Weight hw;
  std::map<Weight, std::vector<RatFn>> gram;  // dense per block, row-major

  std::vector<Module> factors;

  mutable std::map<std::string, int> alias_to_idx;
  mutable std::map<int, std::string> idx_to_alias;
  mutable std::mutex alias_mu;

  mutable std::map<std::tuple<char, int, int>, SMat> dp;
  mutable std::mutex dp_mu;
};

namespace {

std::string default_label(const Weight& wt, int ordinal) {
  std::ostringstream os;
  os << "wt=(";
  for (size_t k = 0; k < wt.size(); ++k) os << (k ? "," : "") << wt[k];
  os << ")#" << ordinal;
  return os.str();
}

SVec apply_columns(const std::vector<SVec>& cols, const SVec& v) {
  SVec out;
  for (const auto& [idx, c] : v.entries()) out.add_scaled(c, cols[idx]);
  return out;
}

std::vector<RatFn> solve_dense(const std::vector<RatFn>& g, int n,
                               const std::vector<RatFn>& rhs) {
  Dense a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a.at(r, c) = g[static_cast<size_t>(r) * n + c];
  return solve_square(a, {rhs})[0];
}

}  // namespace

const RootDatum& Module::datum() const { return d_->datum; }
int Module::dim() const { return d_->dim; }
const Weight& Module::weight_of(int idx) const { return d_->wt[idx]; }

const std::vector<int>& Module::block(const Weight& nu) const {
  static const std::vector<int> empty;
  auto it = d_->blocks.find(nu);
  return it == d_->blocks.end() ? empty : it->second;
}

const std::map<Weight, std::vector<int>>& Module::blocks() const {
  return d_->blocks;
}

const SMat& Module::e_mat(int i) const { return d_->emat[i]; }
const SMat& Module::f_mat(int i) const { return d_->fmat[i]; }
SVec Module::apply_e(int i, const SVec& v) const { return d_->emat[i].apply(v); }
SVec Module::apply_f(int i, const SVec& v) const { return d_->fmat[i].apply(v); }

SVec Module::apply_k(const Coweight& h, const SVec& v) const {
  std::vector<std::pair<int, RatFn>> out;
  for (const auto& [idx, c] : v.entries())
    out.emplace_back(idx, c * RatFn::q_power(RootDatum::pairing(h, d_->wt[idx])));
  return SVec::from_entries(std::move(out));
}

SVec Module::apply_ki(int i, int power, const SVec& v) const {
  int di = d_->datum.d(i);
  std::vector<std::pair<int, RatFn>> out;
  for (const auto& [idx, c] : v.entries())
    out.emplace_back(idx, c * RatFn::q_power(power * di * d_->wt[idx][i]));
  return SVec::from_entries(std::move(out));
}

namespace {

// X^{(a)} = X^a / [a]_i!, built up one factor at a time and memoized.
const SMat& cached_divided(std::map<std::tuple<char, int, int>, SMat>& dp,
                           std::mutex& mu, int dim, int di, const SMat& base,
                           char gen, int i, int a) {
  std::lock_guard<std::mutex> lk(mu);
  auto it = dp.find(std::make_tuple(gen, i, a));
  if (it != dp.end()) return it->second;
  SMat cur = SMat::identity(dim);
  int start = 0;
  for (int k = a - 1; k >= 1; --k) {
    auto pit = dp.find(std::make_tuple(gen, i, k));
    if (pit != dp.end()) {
      cur = pit->second;
      start = k;
      break;
    }
  }
  for (int k = start + 1; k <= a; ++k) {
    cur = compose(base, cur).scaled(RatFn(Laurent::one(), qint(k, di)));
    dp.emplace(std::make_tuple(gen, i, k), cur);
  }
  return dp.emplace(std::make_tuple(gen, i, a), std::move(cur)).first->second;
}

}  // namespace

const SMat& Module::divided_e_mat(int i, int a) const {
  return cached_divided(d_->dp, d_->dp_mu, d_->dim, d_->datum.d(i),
                        d_->emat[i], 'E', i, a);
}

const SMat& Module::divided_f_mat(int i, int a) const {
  return cached_divided(d_->dp, d_->dp_mu, d_->dim, d_->datum.d(i),
                        d_->fmat[i], 'F', i, a);
}

SVec Module::divided_e(int i, int a, const SVec& v) const {
  return divided_e_mat(i, a).apply(v);
}
SVec Module::divided_f(int i, int a, const SVec& v) const {
  return divided_f_mat(i, a).apply(v);
}

bool Module::is_irreducible() const { return d_->irr; }
const Weight& Module::highest_weight() const { return d_->hw; }
SVec Module::highest_vector() const { return SVec::unit(0); }

RatFn Module::form(const SVec& u, const SVec& v) const {
  if (!d_->irr)
    throw std::logic_error("contravariant form requires an irreducible module");
  RatFn out;
  for (const auto& [iu, cu] : u.entries()) {
    const Weight& nu = d_->wt[iu];
    auto git = d_->gram.find(nu);
    const auto& g = git->second;
    int bs = static_cast<int>(d_->blocks.at(nu).size());
    int pu = d_->pos_in_block[iu];
    for (const auto& [iv, cv] : v.entries()) {
      if (d_->wt[iv] != nu) continue;
      out += cu * cv * g[static_cast<size_t>(pu) * bs + d_->pos_in_block[iv]];
    }
  }
  return out;
}

int Module::factor_count() const {
  return d_->factors.empty() ? 1 : static_cast<int>(d_->factors.size());
}

const Module& Module::factor(int k) const {
  return d_->factors.empty() ? *this : d_->factors[k];
}

int Module::pair_index(int a, int b) const {
  return a * d_->factors[1].dim() + b;
}

std::pair<int, int> Module::unpair_index(int idx) const {
  int d2 = d_->factors[1].dim();
  return {idx / d2, idx % d2};
}

std::string Module::label(int idx) const {
  {
    std::lock_guard<std::mutex> lk(d_->alias_mu);
    auto it = d_->idx_to_alias.find(idx);
    if (it != d_->idx_to_alias.end()) return it->second;
  }
  return default_label(d_->wt[idx], d_->pos_in_block[idx]);
}

void Module::set_alias(const std::string& name, int idx) const {
  std::lock_guard<std::mutex> lk(d_->alias_mu);
  d_->alias_to_idx[name] = idx;
  d_->idx_to_alias[idx] = name;
}

std::optional<int> Module::index_of(const std::string& name) const {
  std::lock_guard<std::mutex> lk(d_->alias_mu);
  auto it = d_->alias_to_idx.find(name);
  if (it == d_->alias_to_idx.end()) return std::nullopt;
  return it->second;
}

std::optional<Weight> Module::weight_of_vec(const SVec& v) const {
  if (v.is_zero()) return std::nullopt;
  const Weight& w = d_->wt[v.entries().front().first];
  for (const auto& [idx, c] : v.entries())
    if (d_->wt[idx] != w) return std::nullopt;
  return w;
}

Module irreducible(const RootDatum& dt, const Weight& la) {
  if (!dt.dominant(la)) throw NotDominant("irreducible needs a dominant weight");
  int n = dt.rank();
  auto data = std::make_shared<Module::Data>();
  data->datum = dt;
  data->irr = true;
  data->hw = la;

  std::vector<Weight> wts = {la};
  std::map<Weight, std::vector<int>> blocks = {{la, {0}}};
  std::map<Weight, std::vector<RatFn>> gram = {{la, {RatFn::one()}}};
  // Per-generator columns; entry [i][idx] is E_i / F_i applied to vector idx.
  std::vector<std::vector<SVec>> ecols(n), fcols(n);
  for (int i = 0; i < n; ++i) ecols[i].push_back(SVec());

  // Contravariant pairing of a basis vector against a same-weight vector.
  auto form_with = [&](int b, const SVec& v) {
    RatFn out;
    const Weight& nu = wts[b];
    const auto& idxs = blocks.at(nu);
    const auto& g = gram.at(nu);
    int bs = static_cast<int>(idxs.size());
    int pb = static_cast<int>(std::lower_bound(idxs.begin(), idxs.end(), b) -
                              idxs.begin());
    for (const auto& [iv, cv] : v.entries()) {
      int pv = static_cast<int>(std::lower_bound(idxs.begin(), idxs.end(), iv) -
                                idxs.begin());
      out += cv * g[static_cast<size_t>(pb) * bs + pv];
    }
    return out;
  };

  std::vector<int> frontier = {0};
  while (!frontier.empty()) {
    for (int i = 0; i < n; ++i) fcols[i].resize(wts.size());
    std::map<Weight, std::vector<std::pair<int, int>>> cands;  // nu -> (b, i)
    for (int b : frontier)
      for (int i = 0; i < n; ++i) {
        Weight nu = wts[b];
        for (int k = 0; k < n; ++k) nu[k] -= dt.cartan(k, i);
        cands[nu].push_back({b, i});
      }
    std::vector<int> next;
    for (auto& [nu, list] : cands) {
      int m = static_cast<int>(list.size());
      // E_j of each candidate F_i b, via the commutator recursion.
      std::vector<std::vector<SVec>> ecand(m, std::vector<SVec>(n));
      for (int t = 0; t < m; ++t) {
        auto [b, i] = list[t];
        for (int j = 0; j < n; ++j) {
          // E_j F_i = F_i E_j + delta_{ij} [<h_i, wt>]_i on the weight space.
          SVec w = apply_columns(fcols[i], ecols[j][b]);
          if (j == i)
            w.add_scaled(RatFn(qint(wts[b][i], dt.d(i))), SVec::unit(b));
          ecand[t][j] = std::move(w);
        }
      }
      // Full candidate Gram matrix: (F_i b, c) = q_i^{-1-<h_i,nu>} (b, E_i c).
      std::vector<RatFn> gfull(static_cast<size_t>(m) * m);
      for (int s = 0; s < m; ++s) {
        auto [bs_, is_] = list[s];
        RatFn scale = RatFn::q_power(dt.d(is_) * (-1 - nu[is_]));
        for (int t = 0; t < m; ++t)
          gfull[static_cast<size_t>(s) * m + t] =
              scale * form_with(bs_, ecand[t][is_]);
      }
      // Select a subset with invertible principal Gram: greedy singles with a
      // pairwise fallback (the symmetric form may have isotropic directions).
      std::vector<int> kept_pos;
      std::vector<RatFn> gs;  // dense |kept|^2
      std::vector<char> used(m, 0);
      auto cross = [&](int t) {
        std::vector<RatFn> g(kept_pos.size());
        for (size_t k = 0; k < kept_pos.size(); ++k)
          g[k] = gfull[static_cast<size_t>(kept_pos[k]) * m + t];
        return g;
      };
      auto schur_vec = [&](const std::vector<RatFn>& g) {
        if (kept_pos.empty()) return std::vector<RatFn>{};
        return solve_dense(gs, static_cast<int>(kept_pos.size()), g);
      };
      auto push_kept = [&](int t) {
        auto g = cross(t);
        int k = static_cast<int>(kept_pos.size());
        std::vector<RatFn> g2(static_cast<size_t>(k + 1) * (k + 1));
        for (int r = 0; r < k; ++r)
          for (int c = 0; c < k; ++c)
            g2[static_cast<size_t>(r) * (k + 1) + c] =
                gs[static_cast<size_t>(r) * k + c];
        for (int r = 0; r < k; ++r) {
          g2[static_cast<size_t>(r) * (k + 1) + k] = g[r];
          g2[static_cast<size_t>(k) * (k + 1) + r] = g[r];
        }
        g2[static_cast<size_t>(k) * (k + 1) + k] =
            gfull[static_cast<size_t>(t) * m + t];
        gs = std::move(g2);
        kept_pos.push_back(t);
        used[t] = 1;
      };
      for (;;) {
        bool progressed = false;
        for (int t = 0; t < m; ++t) {
          if (used[t]) continue;
          auto g = cross(t);
          auto x = schur_vec(g);
          RatFn schur = gfull[static_cast<size_t>(t) * m + t];
          for (size_t k = 0; k < x.size(); ++k) schur -= g[k] * x[k];
          if (!schur.is_zero()) {
            push_kept(t);
            progressed = true;
          }
        }
        if (progressed) continue;
        // Pair fallback: a hyperbolic 2x2 block.
        for (int t = 0; t < m && !progressed; ++t) {
          if (used[t]) continue;
          auto gt = cross(t);
          auto xt = schur_vec(gt);
          for (int u = t + 1; u < m && !progressed; ++u) {
            if (used[u]) continue;
            auto gu = cross(u);
            auto xu = schur_vec(gu);
            RatFn stt = gfull[static_cast<size_t>(t) * m + t];
            RatFn stu = gfull[static_cast<size_t>(t) * m + u];
            RatFn suu = gfull[static_cast<size_t>(u) * m + u];
            for (size_t k = 0; k < xt.size(); ++k) {
              stt -= gt[k] * xt[k];
              stu -= gt[k] * xu[k];
              suu -= gu[k] * xu[k];
            }
            if ((stt * suu - stu * stu).is_zero()) continue;
            push_kept(t);
            push_kept(u);
            progressed = true;
          }
        }
        if (!progressed) break;
      }
      // Register the kept candidates as new basis vectors.
      std::vector<int> kept_idx;
      for (int pos : kept_pos) {
        auto [b, i] = list[pos];
        int idx = static_cast<int>(wts.size());
        if (idx + 1 > size_bound())
          throw SizeBoundExceeded("module basis exceeds the size bound");
        wts.push_back(nu);
        blocks[nu].push_back(idx);
        for (int j = 0; j < n; ++j) ecols[j].push_back(ecand[pos][j]);
        fcols[i][b] = SVec::unit(idx);
        kept_idx.push_back(idx);
        next.push_back(idx);
      }
      gram[nu] = gs;
      // Express the dropped candidates over the kept ones.
      for (int t = 0; t < m; ++t) {
        if (used[t]) continue;
        auto [b, i] = list[t];
        SVec expr;
        if (!kept_pos.empty()) {
          auto x = solve_dense(gs, static_cast<int>(kept_pos.size()), cross(t));
          for (size_t k = 0; k < kept_idx.size(); ++k)
            expr.add_scaled(x[k], SVec::unit(kept_idx[k]));
        }
        fcols[i][b] = std::move(expr);
      }
      if (kept_pos.empty()) gram.erase(nu);
    }
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
  }

  int dim = static_cast<int>(wts.size());
  data->dim = dim;
  data->wt = std::move(wts);
  data->blocks = std::move(blocks);
  data->gram = std::move(gram);
  data->pos_in_block.resize(dim);
  for (const auto& [nu, idxs] : data->blocks)
    for (size_t k = 0; k < idxs.size(); ++k)
      data->pos_in_block[idxs[k]] = static_cast<int>(k);
  data->emat.assign(n, SMat(dim, dim));
  data->fmat.assign(n, SMat(dim, dim));
  for (int i = 0; i < n; ++i) {
    fcols[i].resize(dim);
    for (int c = 0; c < dim; ++c) {
      data->emat[i].set_column(c, ecols[i][c]);
      data->fmat[i].set_column(c, fcols[i][c]);
    }
  }
  Module mod;
  mod.d_ = std::move(data);
  return mod;
}

Module tensor(const Module& m, const Module& n) {
  int dm = m.dim(), dn = n.dim();
  if (static_cast<long long>(dm) * dn > size_bound())
    throw SizeBoundExceeded("tensor dimension exceeds the size bound");
  const RootDatum& dt = m.datum();
  int rank = dt.rank();
  auto data = std::make_shared<Module::Data>();
  data->datum = dt;
  data->dim = dm * dn;
  data->factors = {m, n};
  data->wt.resize(static_cast<size_t>(dm) * dn);
  for (int a = 0; a < dm; ++a)
    for (int b = 0; b < dn; ++b) {
      Weight w = m.weight_of(a);
      const Weight& w2 = n.weight_of(b);
      for (int k = 0; k < rank; ++k) w[k] += w2[k];
      int idx = a * dn + b;
      data->wt[idx] = w;
      data->blocks[w].push_back(idx);
    }
  data->pos_in_block.resize(data->dim);
  for (const auto& [nu, idxs] : data->blocks)
    for (size_t k = 0; k < idxs.size(); ++k)
      data->pos_in_block[idxs[k]] = static_cast<int>(k);
  data->emat.assign(rank, SMat(data->dim, data->dim));
  data->fmat.assign(rank, SMat(data->dim, data->dim));
  for (int i = 0; i < rank; ++i) {
    int di = dt.d(i);
    for (int a = 0; a < dm; ++a)
      for (int b = 0; b < dn; ++b) {
        std::vector<std::pair<int, RatFn>> ecol, fcol;
        // E_i (u o v) = E_i u o v + q_i^{<h_i, wt u>} u o E_i v.
        for (const auto& [r, c] : m.e_mat(i).column(a).entries())
          ecol.emplace_back(r * dn + b, c);
        RatFn ku = RatFn::q_power(di * m.weight_of(a)[i]);
        for (const auto& [r, c] : n.e_mat(i).column(b).entries())
          ecol.emplace_back(a * dn + r, ku * c);
        // F_i (u o v) = u o F_i v + q_i^{-<h_i, wt v>} F_i u o v.
        for (const auto& [r, c] : n.f_mat(i).column(b).entries())
          fcol.emplace_back(a * dn + r, c);
        RatFn kvinv = RatFn::q_power(-di * n.weight_of(b)[i]);
        for (const auto& [r, c] : m.f_mat(i).column(a).entries())
          fcol.emplace_back(r * dn + b, kvinv * c);
        data->emat[i].set_column(a * dn + b, SVec::from_entries(std::move(ecol)));
        data->fmat[i].set_column(a * dn + b, SVec::from_entries(std::move(fcol)));
      }
  }
  Module out;
  out.d_ = std::move(data);
  return out;
}

Module module_from_action(const RootDatum& dt, std::vector<Weight> wts,
                          std::vector<SMat> emats, std::vector<SMat> fmats) {
  int rank = dt.rank();
  if (static_cast<int>(emats.size()) != rank ||
      static_cast<int>(fmats.size()) != rank)
    throw std::invalid_argument("module_from_action: one matrix per node");
  auto data = std::make_shared<Module::Data>();
  data->datum = dt;
  data->dim = static_cast<int>(wts.size());
  data->wt = std::move(wts);
  for (int k = 0; k < data->dim; ++k) data->blocks[data->wt[k]].push_back(k);
  data->pos_in_block.resize(data->dim);
  for (const auto& [nu, idxs] : data->blocks)
    for (size_t k = 0; k < idxs.size(); ++k)
      data->pos_in_block[idxs[k]] = static_cast<int>(k);
  for (int i = 0; i < rank; ++i) {
    const Weight al = dt.simple_root(i);
    for (int c = 0; c < data->dim; ++c) {
      for (const auto& [r, v] : emats[i].column(c).entries()) {
        (void)v;
        for (int k = 0; k < rank; ++k)
          if (data->wt[r][k] != data->wt[c][k] + al[k])
            throw std::invalid_argument(
                "module_from_action: E matrix breaks the weight grading");
      }
      for (const auto& [r, v] : fmats[i].column(c).entries()) {
        (void)v;
        for (int k = 0; k < rank; ++k)
          if (data->wt[r][k] != data->wt[c][k] - al[k])
            throw std::invalid_argument(
                "module_from_action: F matrix breaks the weight grading");
      }
    }
  }
  data->emat = std::move(emats);
  data->fmat = std::move(fmats);
  Module out;
  out.d_ = std::move(data);
  return out;
}

SVec extremal_vector(const Module& m, const WeylWord& w) {
  SVec v = m.highest_vector();
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    auto wt = m.weight_of_vec(v);
    int c = (*wt)[*it];
    v = c >= 0 ? m.divided_f(*it, c, v) : m.divided_e(*it, -c, v);
  }
  return v;
}

LowestRealization lowest_weight_module(const RootDatum& dt, const Weight& la) {
  if (!dt.dominant(la)) throw NotDominant("lowest_weight_module needs a dominant weight");
  WeylWord w0 = longest_word(dt);
  Weight mu = dt.act(w0, la);
  for (auto& c : mu) c = -c;  // -w0(la), dominant
  Module mod = irreducible(dt, mu);
  SVec low = extremal_vector(mod, w0);
  return {std::move(mod), std::move(low)};
}

bool ModuleMap::intertwines() const {
  for (int c = 0; c < mat.cols(); ++c) {
    const SVec& col = mat.column(c);
    if (col.is_zero()) continue;
    auto wt = dst.weight_of_vec(col);
    if (!wt || *wt != src.weight_of(c)) return false;
  }
  for (int i = 0; i < src.datum().rank(); ++i) {
    if (compose(dst.e_mat(i), mat) != compose(mat, src.e_mat(i))) return false;
    if (compose(dst.f_mat(i), mat) != compose(mat, src.f_mat(i))) return false;
  }
  return true;
}

ModuleMap identity_map(const Module& m) {
  return {m, m, SMat::identity(m.dim())};
}

ModuleMap compose_maps(const ModuleMap& outer, const ModuleMap& inner) {
  return {inner.src, outer.dst, compose(outer.mat, inner.mat)};
}

void dump_module(const Module& m, std::ostream& os) {
  os << "dim=" << m.dim() << "\n";
  for (int idx = 0; idx < m.dim(); ++idx) {
    os << "basis idx=" << idx << " wt=(";
    const Weight& w = m.weight_of(idx);
    for (size_t k = 0; k < w.size(); ++k) os << (k ? "," : "") << w[k];
    os << ") label=" << m.label(idx) << "\n";
  }
  for (int i = 0; i < m.datum().rank(); ++i) {
    for (int c = 0; c < m.dim(); ++c)
      for (const auto& [r, val] : m.e_mat(i).column(c).entries())
        os << "gen=E_" << i + 1 << " row=" << r << " col=" << c
           << " val=" << val.str() << "\n";
    for (int c = 0; c < m.dim(); ++c)
      for (const auto& [r, val] : m.f_mat(i).column(c).entries())
        os << "gen=F_" << i + 1 << " row=" << r << " col=" << c
           << " val=" << val.str() << "\n";
  }
}

}  // namespace qgrp
