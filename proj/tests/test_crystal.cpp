// Crystal combinatorics: the tensor rule against hand-computed rank-one
// graphs, highest-weight characterization in tensor squares, associativity,
// parabolic components, epsilon filters, the transport maps and their shift
// laws, and the combinatorial stability morphism.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>
#include <vector>

#include "qgrp/crystal.hpp"
#include "qgrp/gcb.hpp"
#include "qgrp/rep.hpp"

using namespace qgrp;

namespace {

Weight wt_of(const RootDatum& dt, std::vector<int> v) {
  (void)dt;
  return Weight(v.begin(), v.end());
}

Weight fund(const RootDatum& dt, int j, int mult = 1) {
  Weight w(dt.rank(), 0);
  w[j] = mult;
  return w;
}

Crystal irr_crystal(const RootDatum& dt, const Weight& la) {
  Module m = irreducible(dt, la);
  return kashiwara_crystal(m, {{m.highest_vector(), ""}});
}

// The rank-one two-element vector crystal, built by hand.
Crystal a1_vector() {
  RootDatum a1 = RootDatum::build(Series::A, 1);
  std::vector<Crystal::Element> elems = {{Weight{1}, "plus"},
                                         {Weight{-1}, "minus"}};
  std::vector<std::vector<int>> f = {{1, -1}};
  return Crystal(a1, std::move(elems), std::move(f));
}

}  // namespace

TEST_CASE("the tensor rule reproduces the hand graph of the rank one square") {
  Crystal b = a1_vector();
  Crystal t = tensor_crystal(b, b);
  REQUIRE(t.size() == 4);
  // Pair index a * 2 + b.
  const int pp = 0, pm = 1, mp = 2, mm = 3;
  CHECK(t.wt(pp) == Weight{2});
  CHECK(t.wt(pm) == Weight{0});
  CHECK(t.wt(mp) == Weight{0});
  CHECK(t.wt(mm) == Weight{-2});
  // eps(plus) = 0 < phi(plus) = 1: the second factor moves first.
  CHECK(t.f(0, pp) == pm);
  CHECK(t.f(0, pm) == mm);
  CHECK(t.f(0, mp) == -1);
  CHECK(t.f(0, mm) == -1);
  CHECK(t.e(0, pm) == pp);
  CHECK(t.e(0, mp) == -1);  // a singleton component of weight 0
  CHECK(t.is_hw(pp));
  CHECK(t.is_hw(mp));
  CHECK(hw_elements(t) == std::vector<int>{pp, mp});
  CHECK(component(t, pp).size() == 3);
  CHECK(component(t, mp).size() == 1);
}

TEST_CASE("tensor statistics obey the max rules on the rank two vector square") {
  RootDatum b2 = RootDatum::build(Series::B, 2);
  Crystal v = irr_crystal(b2, fund(b2, 0));
  REQUIRE(v.size() == 5);
  Crystal t = tensor_crystal(v, v);
  for (int x = 0; x < v.size(); ++x) {
    for (int y = 0; y < v.size(); ++y) {
      int p = x * v.size() + y;
      CHECK(t.wt(p) == wt_of(b2, {v.wt(x)[0] + v.wt(y)[0],
                                  v.wt(x)[1] + v.wt(y)[1]}));
      for (int i = 0; i < 2; ++i) {
        CHECK(t.eps(i, p) ==
              std::max(v.eps(i, x) - v.wt(y)[i], v.eps(i, y)));
        CHECK(t.phi(i, p) ==
              std::max(v.phi(i, x), v.phi(i, y) + v.wt(x)[i]));
      }
    }
  }
}

TEST_CASE("tensoring with the trivial crystal changes nothing") {
  RootDatum a2 = RootDatum::build(Series::A, 2);
  Crystal v = irr_crystal(a2, fund(a2, 0));
  Crystal triv = irr_crystal(a2, Weight{0, 0});
  REQUIRE(triv.size() == 1);
  for (const Crystal& t : {tensor_crystal(triv, v), tensor_crystal(v, triv)}) {
    REQUIRE(t.size() == v.size());
    for (int x = 0; x < v.size(); ++x) {
      CHECK(t.wt(x) == v.wt(x));
      for (int i = 0; i < 2; ++i) {
        CHECK(t.f(i, x) == v.f(i, x));
        CHECK(t.eps(i, x) == v.eps(i, x));
        CHECK(t.phi(i, x) == v.phi(i, x));
      }
    }
  }
}

TEST_CASE("irreducible crystals have a unique highest weight element") {
  RootDatum a2 = RootDatum::build(Series::A, 2);
  for (const Weight& la :
       {Weight{1, 0}, Weight{0, 1}, Weight{1, 1}, Weight{2, 0}}) {
    Crystal c = irr_crystal(a2, la);
    CHECK(hw_elements(c) == std::vector<int>{0});
    CHECK(c.wt(0) == la);
    CHECK(component(c, 0).size() == static_cast<size_t>(c.size()));
  }
}

TEST_CASE("highest weight pairs are the filtered pairs in tensor squares") {
  for (auto [series, n] : {std::pair{Series::A, 2}, {Series::B, 2}}) {
    RootDatum dt = RootDatum::build(series, n);
    Crystal v = irr_crystal(dt, fund(dt, 0));
    Crystal t = tensor_crystal(v, v);
    for (int x = 0; x < v.size(); ++x) {
      for (int y = 0; y < v.size(); ++y) {
        bool rule = v.is_hw(y);
        for (int i = 0; i < dt.rank() && rule; ++i)
          if (v.eps(i, x) > v.wt(y)[i]) rule = false;
        CHECK(t.is_hw(x * v.size() + y) == rule);
      }
    }
  }
}

TEST_CASE("the tensor rule is strictly associative on flat indices") {
  RootDatum b2 = RootDatum::build(Series::B, 2);
  Crystal u = irr_crystal(b2, fund(b2, 0));
  Crystal w = irr_crystal(b2, fund(b2, 1));
  Crystal left = tensor_crystal(tensor_crystal(u, w), u);
  Crystal right = tensor_crystal(u, tensor_crystal(w, u));
  REQUIRE(left.size() == right.size());
  for (int x = 0; x < left.size(); ++x) {
    CHECK(left.wt(x) == right.wt(x));
    for (int i = 0; i < 2; ++i) {
      CHECK(left.f(i, x) == right.f(i, x));
      CHECK(left.eps(i, x) == right.eps(i, x));
      CHECK(left.phi(i, x) == right.phi(i, x));
    }
  }
}

TEST_CASE("parabolic components match the weight filter") {
  // The component is cross-checked internally; here the expected element
  // sets are recomputed from the characterization in the test itself.
  auto expected = [](const Crystal& c, const std::vector<int>& black) {
    WeylWord w = longest_word(c.datum(), black);
    Weight bottom = c.datum().act(w, c.wt(0));
    std::vector<int> out;
    for (int x = 0; x < c.size(); ++x)
      if (c.datum().leq(bottom, c.wt(x))) out.push_back(x);
    return out;
  };

  for (auto [kind, n] :
       {std::pair{PairKind::AI, 0}, {PairKind::AII, 0}, {PairKind::AIII, 0},
        {PairKind::AIV, 3}, {PairKind::BII, 2}, {PairKind::CII, 3},
        {PairKind::DII, 4}, {PairKind::FII, 0}}) {
    AdmissiblePair p = admissible_pair(kind, n);
    Crystal c = irr_crystal(p.datum, p.varpi);
    auto comp = parabolic_component(c, p.black);
    CHECK(comp == expected(c, p.black));
    // The distinguished weight pairs to zero with every black node, so the
    // component of its crystal collapses to the top element.
    CHECK(comp == std::vector<int>{0});
  }

  // A genuinely non-collapsed component: spinor weight against a black
  // short node in rank two.
  RootDatum b2 = RootDatum::build(Series::B, 2);
  std::vector<int> black = {1};
  Crystal c = irr_crystal(b2, fund(b2, 1));
  auto comp = parabolic_component(c, black);
  CHECK(comp == expected(c, black));
  CHECK(comp.size() == 2);

  // Empty black set: always the top element alone.
  CHECK(parabolic_component(c, {}) == std::vector<int>{0});
}

TEST_CASE("epsilon filters cut parabolic components as displayed") {
  RootDatum b2 = RootDatum::build(Series::B, 2);
  Crystal c = irr_crystal(b2, fund(b2, 1));
  std::vector<int> black = {1};
  auto comp = parabolic_component(c, black);
  REQUIRE(comp.size() == 2);

  // A huge bound keeps everything.
  CHECK(epsilon_filter(c, comp, Weight{9, 9}) == comp);
  // The zero bound keeps only the top.
  CHECK(epsilon_filter(c, comp, Weight{0, 0}) == std::vector<int>{0});
  // The displayed inequality, re-derived per element.
  for (const Weight& mu : {Weight{0, 1}, Weight{1, 0}, Weight{2, 2}}) {
    std::vector<int> manual;
    for (int b : comp) {
      bool keep = true;
      for (int i = 0; i < 2; ++i)
        if (c.eps(i, b) > mu[i]) keep = false;
      if (keep) manual.push_back(b);
    }
    CHECK(epsilon_filter(c, comp, mu) == manual);
  }
}

TEST_CASE("transport preserves phi and shifts eps by the added weight") {
  // Rank two, black node 2 (index 1), highest weights varpi_2 and
  // 2 varpi_2: the parabolic components are strings of lengths 2 and 3.
  RootDatum b2 = RootDatum::build(Series::B, 2);
  std::vector<int> black = {1};
  Weight nu = fund(b2, 1);
  Crystal small = irr_crystal(b2, fund(b2, 1));
  Crystal large = irr_crystal(b2, fund(b2, 1, 2));

  auto iota = transport_iota(small, large, black);
  auto comp_s = parabolic_component(small, black);
  REQUIRE(iota.size() == comp_s.size());
  REQUIRE(comp_s.size() == 2);

  WeylWord wblk = longest_word(b2, black);
  Weight shift = b2.act(wblk, nu);  // w_black acting on the added weight
  for (int b : comp_s) {
    int ib = iota.at(b);
    REQUIRE(ib != -1);
    for (size_t k = 0; k < shift.size(); ++k)
      CHECK(large.wt(ib)[k] == small.wt(b)[k] + shift[k]);
    for (int j : black) {
      CHECK(large.phi(j, ib) == small.phi(j, b));
      CHECK(large.eps(j, ib) == small.eps(j, b) + nu[j]);
    }
  }
  // The lowest element goes to the lowest element.
  Weight bot_s = b2.act(wblk, small.wt(0));
  Weight bot_l = b2.act(wblk, large.wt(0));
  for (int b : comp_s)
    if (small.wt(b) == bot_s) CHECK(large.wt(iota.at(b)) == bot_l);

  // pi inverts iota and kills everything outside the image.
  auto pi = transport_pi(large, small, black);
  std::set<int> image;
  for (auto& [b, ib] : iota) {
    CHECK(pi.at(ib) == b);
    image.insert(ib);
  }
  int zeros = 0;
  for (auto& [bl, b] : pi) {
    if (b == -1) {
      ++zeros;
      CHECK(!image.count(bl));
    }
  }
  CHECK(zeros == static_cast<int>(pi.size() - iota.size()));
}

TEST_CASE("transport between equal weights is the identity") {
  RootDatum c3 = RootDatum::build(Series::C, 3);
  AdmissiblePair p = admissible_pair(PairKind::CII, 3);
  Crystal c = irr_crystal(c3, p.varpi);
  auto iota = transport_iota(c, c, p.black);
  for (auto& [b, ib] : iota) CHECK(b == ib);
}

TEST_CASE("transport refuses structurally incompatible components") {
  RootDatum a2 = RootDatum::build(Series::A, 2);
  Crystal v = irr_crystal(a2, fund(a2, 0));
  Crystal w = irr_crystal(a2, fund(a2, 1));
  CHECK_THROWS_AS(transport_iota(v, w, {0, 1}), IllDefinedTransport);
}

TEST_CASE("stability morphism sends the top to the triple top") {
  for (auto [kind, n] : {std::pair{PairKind::AII, 0}, {PairKind::BII, 2},
                         {PairKind::CII, 3}, {PairKind::AI, 0}}) {
    AdmissiblePair p = admissible_pair(kind, n);
    BasedCache cache(p.datum);
    const Weight zero(p.datum.rank(), 0);
    const Weight nu = p.varpi;
    for (auto [la, mu] : {std::pair{zero, zero}, {nu, zero}, {zero, nu}}) {
      StabilityMorphism sm =
          stability_morphism(p, la, mu, nu, cache.provider());
      // Source and target tops.
      auto shw = hw_elements(sm.source.graph);
      Weight la_big = la, mu_big = mu;
      for (int k = 0; k < p.datum.rank(); ++k) {
        la_big[k] += p.tau_weight(nu)[k];
        mu_big[k] += nu[k];
      }
      int top = -1;
      for (int h : shw) {
        Weight want = la_big;
        for (int k = 0; k < p.datum.rank(); ++k) want[k] += mu_big[k];
        if (sm.source.graph.wt(h) == want) top = h;
      }
      REQUIRE(top != -1);
      int img = sm.phi.image[top];
      REQUIRE(img != -1);
      Weight th = p.theta(nu);
      Weight want = th;
      for (int k = 0; k < p.datum.rank(); ++k) want[k] += la[k] + mu[k];
      CHECK(sm.target.wt(img) == want);
      CHECK(sm.target.is_hw(img));
      CHECK(sm.phi.is_strict());

      // Nonzero highest-weight fibers match the epsilon filter count.
      Crystal bla = cache.provider()(la);
      auto filt = epsilon_filter(bla, parabolic_component(bla, p.black), mu);
      int nonzero = 0;
      for (int h : shw)
        if (sm.phi.image[h] != -1) ++nonzero;
      CHECK(nonzero == static_cast<int>(filt.size()));
    }
  }
}

TEST_CASE("stability morphism kills the deep highest weight fiber") {
  // lambda = 0, mu = nu = the spinor weight in rank two: the source has two
  // highest weight elements and exactly one survives.
  AdmissiblePair p = admissible_pair(PairKind::BII, 2);
  RootDatum b2 = p.datum;
  BasedCache cache(b2);
  Weight zero{0, 0}, nu = fund(b2, 1);
  StabilityMorphism sm = stability_morphism(p, zero, nu, nu, cache.provider());
  auto shw = hw_elements(sm.source.graph);
  REQUIRE(shw.size() == 2);
  int zeroed = 0;
  for (int h : shw)
    if (sm.phi.image[h] == -1) ++zeroed;
  CHECK(zeroed == 1);
  CHECK(sm.phi.is_strict());
  // Zero fibers absorb entire components.
  for (int h : shw) {
    for (int x : component(sm.source.graph, h))
      CHECK((sm.phi.image[x] == -1) == (sm.phi.image[h] == -1));
  }
}

TEST_CASE("stability morphism with no added weight is an isomorphism") {
  AdmissiblePair p = admissible_pair(PairKind::AI);
  BasedCache cache(p.datum);
  Weight zero{0};
  StabilityMorphism sm =
      stability_morphism(p, p.varpi, zero, zero, cache.provider());
  std::set<int> hit;
  for (int x = 0; x < sm.source.graph.size(); ++x) {
    int img = sm.phi.image[x];
    REQUIRE(img != -1);
    CHECK(sm.source.graph.wt(x) == sm.target.wt(img));
    CHECK(hit.insert(img).second);
  }
  CHECK(static_cast<int>(hit.size()) == sm.target.size());
}

TEST_CASE("crystal construction rejects malformed arrow tables") {
  RootDatum a1 = RootDatum::build(Series::A, 1);
  // Wrong weight shift.
  CHECK_THROWS_AS(
      Crystal(a1, {{Weight{1}, ""}, {Weight{1}, ""}}, {{1, -1}}),
      std::invalid_argument);
  // Non-injective lowering arrow.
  CHECK_THROWS_AS(Crystal(a1,
                          {{Weight{1}, ""},
                           {Weight{1}, ""},
                           {Weight{-1}, ""}},
                          {{2, 2, -1}}),
                  std::invalid_argument);
  // phi - eps must match the pairing: an isolated nonzero weight fails.
  CHECK_THROWS_AS(Crystal(a1, {{Weight{1}, ""}}, {{-1}}),
                  std::invalid_argument);
}

TEST_CASE("labeled isomorphism distinguishes relabeled graphs") {
  Crystal v = a1_vector();
  CHECK(isomorphic_as_labeled(v, v));
  RootDatum a1 = RootDatum::build(Series::A, 1);
  Crystal w(a1, {{Weight{1}, "plus"}, {Weight{-1}, "other"}}, {{1, -1}});
  CHECK(!isomorphic_as_labeled(v, w));
}
