// Crystal graph combinatorics: construction/validation, the tensor rule,
// components, parabolic components, transports, and the stability morphism
// on crystals.

#include "qgrp/crystal.hpp"

#include <algorithm>
#include <deque>
#include <ostream>
#include <set>
#include <sstream>

namespace qgrp {

namespace {

std::string weight_str(const Weight& w) {
  std::ostringstream os;
  os << '(';
  for (size_t k = 0; k < w.size(); ++k) {
    if (k) os << ',';
    os << w[k];
  }
  os << ')';
  return os.str();
}

Weight add_weights(const Weight& a, const Weight& b) {
  Weight r(a.size());
  for (size_t k = 0; k < a.size(); ++k) r[k] = a[k] + b[k];
  return r;
}

Weight sub_root(const RootDatum& d, Weight w, int i) {
  Weight al = d.simple_root(i);
  for (size_t k = 0; k < w.size(); ++k) w[k] -= al[k];
  return w;
}

void require_same_datum(const RootDatum& a, const RootDatum& b,
                        const char* where) {
  if (a.series_name() != b.series_name() || a.rank() != b.rank())
    throw std::invalid_argument(std::string(where) +
                                ": crystals over different root data");
}

int unique_hw(const Crystal& c, const char* where) {
  auto h = hw_elements(c);
  if (h.size() != 1)
    throw std::invalid_argument(
        std::string(where) +
        ": expected a connected crystal with one highest weight element");
  return h[0];
}

// The unique element of `comp` with the given weight.
int unique_in_set(const Crystal& c, const std::vector<int>& comp,
                  const Weight& w, const char* where) {
  int found = -1;
  for (int x : comp) {
    if (c.wt(x) == w) {
      if (found != -1)
        throw std::logic_error(std::string(where) +
                               ": extremal weight not multiplicity free");
      found = x;
    }
  }
  if (found == -1)
    throw std::logic_error(std::string(where) +
                           ": extremal weight element missing");
  return found;
}

}  // namespace

Crystal::Crystal(RootDatum datum, std::vector<Element> elements,
                 std::vector<std::vector<int>> f_arrows)
    : datum_(std::move(datum)),
      elems_(std::move(elements)),
      f_(std::move(f_arrows)) {
  const int n = size();
  const int r = rank();
  if (static_cast<int>(f_.size()) != r)
    throw std::invalid_argument("Crystal: f_arrows must have one row per node");
  for (auto& row : f_)
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("Crystal: arrow row size mismatch");
  for (int x = 0; x < n; ++x) {
    if (static_cast<int>(elems_[x].wt.size()) != r)
      throw std::invalid_argument("Crystal: weight size mismatch");
    if (elems_[x].label.empty())
      elems_[x].label = "wt=" + weight_str(elems_[x].wt) + "#" + std::to_string(x);
  }

  e_.assign(r, std::vector<int>(n, -1));
  for (int i = 0; i < r; ++i) {
    for (int x = 0; x < n; ++x) {
      int y = f_[i][x];
      if (y == -1) continue;
      if (y < 0 || y >= n)
        throw std::invalid_argument("Crystal: arrow target out of range");
      if (e_[i][y] != -1)
        throw std::invalid_argument("Crystal: lowering arrow not injective");
      e_[i][y] = x;
      if (elems_[y].wt != sub_root(datum_, elems_[x].wt, i))
        throw std::invalid_argument(
            "Crystal: arrow does not shift the weight by -alpha_i");
    }
  }

  eps_.assign(r, std::vector<int>(n, 0));
  phi_.assign(r, std::vector<int>(n, 0));
  for (int i = 0; i < r; ++i) {
    for (int x = 0; x < n; ++x) {
      int k = 0;
      for (int cur = x; e_[i][cur] != -1; cur = e_[i][cur]) ++k;
      eps_[i][x] = k;
      k = 0;
      for (int cur = x; f_[i][cur] != -1; cur = f_[i][cur]) ++k;
      phi_[i][x] = k;
      if (phi_[i][x] - eps_[i][x] != elems_[x].wt[i])
        throw std::invalid_argument(
            "Crystal: phi - eps does not match the weight pairing");
    }
  }
}

bool Crystal::is_hw(int x) const {
  for (int i = 0; i < rank(); ++i)
    if (e_[i][x] != -1) return false;
  return true;
}

std::optional<int> Crystal::index_of(const std::string& label) const {
  for (int x = 0; x < size(); ++x)
    if (elems_[x].label == label) return x;
  return std::nullopt;
}

std::optional<int> Crystal::unique_element_of_weight(const Weight& w) const {
  int found = -1;
  for (int x = 0; x < size(); ++x) {
    if (elems_[x].wt == w) {
      if (found != -1) return std::nullopt;
      found = x;
    }
  }
  if (found == -1) return std::nullopt;
  return found;
}

Crystal tensor_crystal(const Crystal& a, const Crystal& b) {
  require_same_datum(a.datum(), b.datum(), "tensor_crystal");
  const RootDatum& d = a.datum();
  const int na = a.size(), nb = b.size(), r = d.rank();
  std::vector<Crystal::Element> elems;
  elems.reserve(static_cast<size_t>(na) * nb);
  for (int ia = 0; ia < na; ++ia)
    for (int ib = 0; ib < nb; ++ib)
      elems.push_back({add_weights(a.wt(ia), b.wt(ib)),
                       a.label(ia) + "(x)" + b.label(ib)});

  std::vector<std::vector<int>> f(r, std::vector<int>(na * nb, -1));
  for (int i = 0; i < r; ++i) {
    for (int ia = 0; ia < na; ++ia) {
      for (int ib = 0; ib < nb; ++ib) {
        int idx = ia * nb + ib;
        if (a.eps(i, ia) < b.phi(i, ib)) {
          int jb = b.f(i, ib);
          f[i][idx] = (jb == -1) ? -1 : ia * nb + jb;
        } else {
          int ja = a.f(i, ia);
          f[i][idx] = (ja == -1) ? -1 : ja * nb + ib;
        }
      }
    }
  }

  Crystal t(d, std::move(elems), std::move(f));

  // The displayed statistics and the raising rule must agree with the string
  // walks / derived inverses; this is exactly seminormality of the product.
  for (int i = 0; i < r; ++i) {
    for (int ia = 0; ia < na; ++ia) {
      for (int ib = 0; ib < nb; ++ib) {
        int idx = ia * nb + ib;
        int eps_rule = std::max(a.eps(i, ia) - b.wt(ib)[i], b.eps(i, ib));
        int phi_rule = std::max(a.phi(i, ia), b.phi(i, ib) + a.wt(ia)[i]);
        if (t.eps(i, idx) != eps_rule || t.phi(i, idx) != phi_rule)
          throw std::logic_error(
              "tensor_crystal: statistics rule disagrees with string walks");
        int e_rule;
        if (a.eps(i, ia) > b.phi(i, ib)) {
          int ja = a.e(i, ia);
          e_rule = (ja == -1) ? -1 : ja * nb + ib;
        } else {
          int jb = b.e(i, ib);
          e_rule = (jb == -1) ? -1 : ia * nb + jb;
        }
        if (t.e(i, idx) != e_rule)
          throw std::logic_error(
              "tensor_crystal: raising rule disagrees with the arrow inverse");
      }
    }
  }
  return t;
}

std::vector<int> hw_elements(const Crystal& c) {
  std::vector<int> out;
  for (int x = 0; x < c.size(); ++x)
    if (c.is_hw(x)) out.push_back(x);
  return out;
}

std::vector<int> component(const Crystal& c, int x,
                           const std::vector<int>& nodes) {
  std::set<int> seen{x};
  std::deque<int> q{x};
  while (!q.empty()) {
    int cur = q.front();
    q.pop_front();
    for (int i : nodes) {
      for (int next : {c.f(i, cur), c.e(i, cur)}) {
        if (next != -1 && seen.insert(next).second) q.push_back(next);
      }
    }
  }
  return std::vector<int>(seen.begin(), seen.end());
}

std::vector<int> component(const Crystal& c, int x) {
  std::vector<int> nodes(c.rank());
  for (int i = 0; i < c.rank(); ++i) nodes[i] = i;
  return component(c, x, nodes);
}

SubCrystal restrict_components(const Crystal& c,
                               const std::vector<int>& starts) {
  std::set<int> keep;
  for (int s : starts) {
    auto comp = component(c, s);
    keep.insert(comp.begin(), comp.end());
  }
  std::vector<int> parent_idx(keep.begin(), keep.end());
  std::vector<int> from_parent(c.size(), -1);
  for (size_t k = 0; k < parent_idx.size(); ++k)
    from_parent[parent_idx[k]] = static_cast<int>(k);

  std::vector<Crystal::Element> elems;
  elems.reserve(parent_idx.size());
  for (int p : parent_idx) elems.push_back({c.wt(p), c.label(p)});
  std::vector<std::vector<int>> f(c.rank(),
                                  std::vector<int>(parent_idx.size(), -1));
  for (int i = 0; i < c.rank(); ++i) {
    for (size_t k = 0; k < parent_idx.size(); ++k) {
      int y = c.f(i, parent_idx[k]);
      f[i][k] = (y == -1) ? -1 : from_parent[y];
    }
  }
  return {Crystal(c.datum(), std::move(elems), std::move(f)),
          std::move(parent_idx), std::move(from_parent)};
}

std::vector<int> parabolic_component(const Crystal& bla,
                                     const std::vector<int>& black) {
  int top = unique_hw(bla, "parabolic_component");
  std::set<int> seen{top};
  std::deque<int> q{top};
  while (!q.empty()) {
    int cur = q.front();
    q.pop_front();
    for (int j : black) {
      int y = bla.f(j, cur);
      if (y != -1 && seen.insert(y).second) q.push_back(y);
    }
  }
  // Cross-check against the weight characterization: the component is
  // exactly { b | wt(b) >= w_black(top weight) }.
  Weight low =
      bla.datum().act(longest_word(bla.datum(), black), bla.wt(top));
  for (int x = 0; x < bla.size(); ++x) {
    bool in_set = seen.count(x) != 0;
    bool in_char = bla.datum().leq(low, bla.wt(x));
    if (in_set != in_char)
      throw std::logic_error(
          "parabolic_component: reachable set disagrees with the weight "
          "characterization");
  }
  return std::vector<int>(seen.begin(), seen.end());
}

std::vector<int> epsilon_filter(const Crystal& bla,
                                const std::vector<int>& comp,
                                const Weight& mu) {
  if (static_cast<int>(mu.size()) != bla.rank())
    throw std::invalid_argument("epsilon_filter: weight size mismatch");
  std::vector<int> out;
  for (int x : comp) {
    bool ok = true;
    for (int i = 0; i < bla.rank() && ok; ++i)
      if (bla.eps(i, x) > mu[i]) ok = false;
    if (ok) out.push_back(x);
  }
  return out;
}

namespace {

// Shared transport walk: propagate images from lowest anchors upward along
// raising arrows with black node indices.  `allow_zero` distinguishes pi
// (images may die) from iota (they may not).
std::map<int, int> transport_walk(const Crystal& src, const Crystal& dst,
                                  const std::vector<int>& black,
                                  bool allow_zero, const char* where) {
  require_same_datum(src.datum(), dst.datum(), where);
  auto comp_s = parabolic_component(src, black);
  auto comp_d = parabolic_component(dst, black);
  std::set<int> in_comp_s(comp_s.begin(), comp_s.end());
  std::set<int> in_comp_d(comp_d.begin(), comp_d.end());

  WeylWord wblk = longest_word(src.datum(), black);
  int top_s = unique_hw(src, where);
  int top_d = unique_hw(dst, where);
  int anchor_s =
      unique_in_set(src, comp_s, src.datum().act(wblk, src.wt(top_s)), where);
  int anchor_d =
      unique_in_set(dst, comp_d, dst.datum().act(wblk, dst.wt(top_d)), where);

  std::map<int, int> img;
  img[anchor_s] = anchor_d;
  std::deque<int> q{anchor_s};
  while (!q.empty()) {
    int x = q.front();
    q.pop_front();
    for (int j : black) {
      int xs = src.e(j, x);
      if (xs == -1) continue;
      if (!in_comp_s.count(xs))
        throw std::logic_error(std::string(where) +
                               ": raising step left the component");
      int y;
      if (img[x] == -1) {
        y = -1;
      } else {
        y = dst.e(j, img[x]);
        if (y == -1 && !allow_zero)
          throw IllDefinedTransport(std::string(where) +
                                    ": raising step dies in the target");
        if (y != -1 && !in_comp_d.count(y))
          throw std::logic_error(std::string(where) +
                                 ": image left the target component");
      }
      auto it = img.find(xs);
      if (it == img.end()) {
        img[xs] = y;
        q.push_back(xs);
      } else if (it->second != y) {
        throw IllDefinedTransport(std::string(where) +
                                  ": images disagree between raising paths");
      }
    }
  }
  if (img.size() != comp_s.size())
    throw IllDefinedTransport(std::string(where) +
                              ": component not reached from its lowest element");
  // Injectivity on nonzero images.
  std::set<int> vals;
  for (auto& [k, v] : img) {
    (void)k;
    if (v != -1 && !vals.insert(v).second)
      throw IllDefinedTransport(std::string(where) +
                                ": nonzero images collide");
  }
  return img;
}

}  // namespace

std::map<int, int> transport_iota(const Crystal& b_small,
                                  const Crystal& b_large,
                                  const std::vector<int>& black) {
  return transport_walk(b_small, b_large, black, /*allow_zero=*/false,
                        "transport_iota");
}

std::map<int, int> transport_pi(const Crystal& b_large,
                                const Crystal& b_small,
                                const std::vector<int>& black) {
  return transport_walk(b_large, b_small, black, /*allow_zero=*/true,
                        "transport_pi");
}

bool CrystalMorphism::is_strict() const {
  const int n = src.size();
  const int r = src.rank();
  if (static_cast<int>(image.size()) != n) return false;
  for (int x = 0; x < n; ++x) {
    int y = image[x];
    if (y < -1 || y >= dst.size()) return false;
    if (y != -1) {
      if (src.wt(x) != dst.wt(y)) return false;
      for (int i = 0; i < r; ++i)
        if (src.eps(i, x) != dst.eps(i, y) || src.phi(i, x) != dst.phi(i, y))
          return false;
    }
    for (int i = 0; i < r; ++i) {
      int xf = src.f(i, x), xe = src.e(i, x);
      int want_f = (y == -1) ? -1 : dst.f(i, y);
      int want_e = (y == -1) ? -1 : dst.e(i, y);
      int got_f = (xf == -1) ? -1 : image[xf];
      int got_e = (xe == -1) ? -1 : image[xe];
      if (got_f != want_f || got_e != want_e) return false;
    }
  }
  return true;
}

CrystalMorphism strict_extension(const Crystal& src, const Crystal& dst,
                                 const std::map<int, int>& hw_images) {
  const int n = src.size();
  std::vector<int> img(n, -2);
  std::deque<int> q;
  for (auto& [h, y] : hw_images) {
    if (h < 0 || h >= n || !src.is_hw(h))
      throw std::invalid_argument(
          "strict_extension: key is not a highest weight element");
    if (y < -1 || y >= dst.size())
      throw std::invalid_argument("strict_extension: image out of range");
    img[h] = y;
    q.push_back(h);
  }
  while (!q.empty()) {
    int x = q.front();
    q.pop_front();
    for (int i = 0; i < src.rank(); ++i) {
      int x2 = src.f(i, x);
      if (x2 == -1) continue;
      int y2 = (img[x] == -1) ? -1 : dst.f(i, img[x]);
      if (img[x2] == -2) {
        img[x2] = y2;
        q.push_back(x2);
      } else if (img[x2] != y2) {
        throw std::logic_error("strict_extension: conflicting images");
      }
    }
  }
  for (int x = 0; x < n; ++x)
    if (img[x] == -2)
      throw std::logic_error(
          "strict_extension: element not reachable from a highest weight "
          "element");
  CrystalMorphism m{src, dst, std::move(img)};
  if (!m.is_strict())
    throw std::logic_error("strict_extension: extension is not strict");
  return m;
}

StabilityMorphism stability_morphism(const AdmissiblePair& pair,
                                     const Weight& la, const Weight& mu,
                                     const Weight& nu,
                                     const CrystalProvider& provider) {
  const RootDatum& d = pair.datum;
  for (const Weight* w : {&la, &mu, &nu})
    if (!d.dominant(*w))
      throw NotDominant("stability_morphism: weights must be dominant");

  Weight la_big = add_weights(la, pair.tau_weight(nu));
  Weight mu_big = add_weights(mu, nu);
  Weight th = pair.theta(nu);

  Crystal bla_big = provider(la_big);
  Crystal bmu_big = provider(mu_big);
  Crystal bla = provider(la);
  Crystal bmu = provider(mu);
  Crystal bth = provider(th);

  // Source: components of { c (x) top | c in the filtered parabolic part }
  // inside B(la + tau nu) (x) B(mu + nu).
  auto comp_big = parabolic_component(bla_big, pair.black);
  auto filt_big = epsilon_filter(bla_big, comp_big, mu_big);
  Crystal tsrc = tensor_crystal(bla_big, bmu_big);
  int top_mu_big = unique_hw(bmu_big, "stability_morphism");
  std::vector<int> starts_src;
  for (int c : filt_big) starts_src.push_back(c * bmu_big.size() + top_mu_big);
  SubCrystal source = restrict_components(tsrc, starts_src);

  // Target inner part: B(w_black la, mu) inside B(la) (x) B(mu).
  auto comp_la = parabolic_component(bla, pair.black);
  auto filt_la = epsilon_filter(bla, comp_la, mu);
  Crystal tinner = tensor_crystal(bla, bmu);
  int top_mu_small = unique_hw(bmu, "stability_morphism");
  std::vector<int> starts_inner;
  for (int c : filt_la) starts_inner.push_back(c * bmu.size() + top_mu_small);
  SubCrystal target_inner = restrict_components(tinner, starts_inner);

  // The restricted pieces must have exactly the expected highest weight
  // elements.
  for (const auto* piece : {&source, &target_inner}) {
    const auto& starts = (piece == &source) ? starts_src : starts_inner;
    std::set<int> expect;
    for (int s : starts) expect.insert(piece->from_parent[s]);
    auto hws = hw_elements(piece->graph);
    if (std::set<int>(hws.begin(), hws.end()) != expect)
      throw std::logic_error(
          "stability_morphism: unexpected highest weight elements in a "
          "restricted tensor piece");
  }

  Crystal target = tensor_crystal(bth, target_inner.graph);
  int top_th = unique_hw(bth, "stability_morphism");

  auto pi = transport_pi(bla_big, bla, pair.black);

  std::map<int, int> hw_img;
  for (int c : filt_big) {
    int s = source.from_parent[c * bmu_big.size() + top_mu_big];
    int p = pi.at(c);
    int t;
    if (p == -1) {
      t = -1;
    } else {
      int inner = target_inner.from_parent[p * bmu.size() + top_mu_small];
      if (inner == -1)
        throw std::logic_error(
            "stability_morphism: transported element missing from the target "
            "piece");
      t = top_th * target_inner.graph.size() + inner;
    }
    hw_img[s] = t;
  }

  CrystalMorphism phi = strict_extension(source.graph, target, hw_img);

  // Injectivity on highest weight elements with nonzero image.
  std::set<int> seen;
  for (auto& [s, t] : hw_img) {
    (void)s;
    if (t != -1 && !seen.insert(t).second)
      throw std::logic_error(
          "stability_morphism: highest weight fibers not injective");
  }

  return {std::move(source), std::move(target_inner), std::move(target),
          std::move(phi)};
}

bool isomorphic_as_labeled(const Crystal& a, const Crystal& b) {
  if (a.size() != b.size() || a.rank() != b.rank()) return false;
  if (a.datum().series_name() != b.datum().series_name()) return false;
  auto key = [](const Crystal& c, int x) {
    return weight_str(c.wt(x)) + "|" + c.label(x);
  };
  std::map<std::string, int> bidx;
  for (int y = 0; y < b.size(); ++y)
    if (!bidx.emplace(key(b, y), y).second) return false;  // ambiguous label
  std::vector<int> m(a.size(), -1);
  std::set<std::string> akeys;
  for (int x = 0; x < a.size(); ++x) {
    if (!akeys.insert(key(a, x)).second) return false;
    auto it = bidx.find(key(a, x));
    if (it == bidx.end()) return false;
    m[x] = it->second;
  }
  for (int i = 0; i < a.rank(); ++i) {
    for (int x = 0; x < a.size(); ++x) {
      int xa = a.f(i, x);
      int xb = b.f(i, m[x]);
      if ((xa == -1) != (xb == -1)) return false;
      if (xa != -1 && m[xa] != xb) return false;
    }
  }
  return true;
}

void dump_dot(const Crystal& c, std::ostream& os) {
  os << "digraph crystal {\n";
  for (int x = 0; x < c.size(); ++x)
    os << "  n" << x << " [label=\"" << weight_str(c.wt(x)) << "#" << x
       << "\"];\n";
  for (int i = 0; i < c.rank(); ++i)
    for (int x = 0; x < c.size(); ++x)
      if (c.f(i, x) != -1)
        os << "  n" << x << " -> n" << c.f(i, x) << " [label=\"" << (i + 1)
           << "\"];\n";
  os << "}\n";
}

}  // namespace qgrp
