// Labeled crystal graphs: the tensor-product rule, highest-weight elements,
// connected components, parabolic components with their epsilon filters, and
// the transport maps between parabolic components of different highest
// weights.  Everything here is pure combinatorics on finite graphs; the
// graphs themselves are produced from modules (see gcb) or by the tensor
// rule.

#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgrp/rootdata.hpp"

namespace qgrp {

// Raised when transported images disagree between two raising paths or a
// required lift is missing.  Well-definedness is a theorem for the crystals
// built here, so this firing signals corrupted input.
struct IllDefinedTransport : std::runtime_error {
  explicit IllDefinedTransport(const std::string& what)
      : std::runtime_error(what) {}
};

// A finite seminormal crystal: elements carry a weight and a label; arrows
// are mutually inverse partial maps; eps_i/phi_i are the string walk
// lengths.  Immutable after construction.
class Crystal {
 public:
  struct Element {
    Weight wt;
    std::string label;  // empty = default "wt=(...)#k"
  };

  Crystal() = default;
  // Build from lowering arrows alone: f_arrows[i][x] is the target of the
  // F_i-arrow at x, or -1.  Validates that each f_i is injective, that
  // arrows shift weights by -alpha_i, and that phi - eps matches the Cartan
  // pairing; throws std::invalid_argument otherwise.
  Crystal(RootDatum datum, std::vector<Element> elements,
          std::vector<std::vector<int>> f_arrows);

  int size() const { return static_cast<int>(elems_.size()); }
  int rank() const { return datum_.rank(); }
  const RootDatum& datum() const { return datum_; }

  const Weight& wt(int x) const { return elems_[x].wt; }
  const std::string& label(int x) const { return elems_[x].label; }
  int f(int i, int x) const { return f_[i][x]; }  // -1 when undefined
  int e(int i, int x) const { return e_[i][x]; }
  int eps(int i, int x) const { return eps_[i][x]; }
  int phi(int i, int x) const { return phi_[i][x]; }

  bool is_hw(int x) const;  // every raising arrow absent

  std::optional<int> index_of(const std::string& label) const;
  // The unique element of the given weight; nullopt when absent or
  // ambiguous.
  std::optional<int> unique_element_of_weight(const Weight& w) const;

 private:
  RootDatum datum_;
  std::vector<Element> elems_;
  std::vector<std::vector<int>> f_, e_;      // [node][element]
  std::vector<std::vector<int>> eps_, phi_;  // string walk lengths
};

// The tensor product crystal on pair indices a * b.size() + b, with
//   wt(b1 (x) b2)    = wt(b1) + wt(b2),
//   eps_i(b1 (x) b2) = max(eps_i(b1) - <h_i, wt(b2)>, eps_i(b2)),
//   phi_i(b1 (x) b2) = max(phi_i(b1), phi_i(b2) + <h_i, wt(b1)>),
//   E_i moves the first factor when eps_i(b1) >  phi_i(b2), else the second,
//   F_i moves the second factor when eps_i(b1) <  phi_i(b2), else the first;
// the displayed statistics are cross-checked against the string walks.
Crystal tensor_crystal(const Crystal& a, const Crystal& b);

// All elements killed by every raising arrow, ascending.
std::vector<int> hw_elements(const Crystal& c);

// Connected component of x using only arrows with node index in `nodes`
// (both directions), ascending.
std::vector<int> component(const Crystal& c, int x,
                           const std::vector<int>& nodes);
std::vector<int> component(const Crystal& c, int x);  // all nodes

// Induced subcrystal on the union of the full connected components of the
// given start elements (such a subset is closed under all arrows).
struct SubCrystal {
  Crystal graph;
  std::vector<int> parent_idx;   // graph element -> parent element
  std::vector<int> from_parent;  // parent element -> graph element or -1
};
SubCrystal restrict_components(const Crystal& c, const std::vector<int>& starts);

// The black-parabolic component of the highest weight element of an
// irreducible crystal: all elements reachable from the top by lowering
// arrows with black node indices.  Cross-checked in place against the
// weight characterization { b | wt(b) >= w_black(top weight) }.
std::vector<int> parabolic_component(const Crystal& bla,
                                     const std::vector<int>& black);

// Subset of a parabolic component with eps_i(b) <= <h_i, mu> for all i.
std::vector<int> epsilon_filter(const Crystal& bla,
                                const std::vector<int>& comp,
                                const Weight& mu);

// Transport between the black-parabolic components of two irreducible
// crystals, anchored at their lowest elements and propagated along raising
// arrows (smallest node first).  iota is total into the larger component;
// pi may send elements to 0 (encoded -1).  Both check consistency across
// every raising edge and throw IllDefinedTransport on disagreement.
std::map<int, int> transport_iota(const Crystal& b_small,
                                  const Crystal& b_large,
                                  const std::vector<int>& black);
std::map<int, int> transport_pi(const Crystal& b_large,
                                const Crystal& b_small,
                                const std::vector<int>& black);

// A morphism of crystals with zeros allowed (image -1).
struct CrystalMorphism {
  Crystal src;
  Crystal dst;
  std::vector<int> image;  // src element -> dst element or -1

  // Nonzero images preserve weight and all string statistics, and the map
  // commutes with every arrow (zeros absorb).
  bool is_strict() const;
};

// Extend a map given on the highest weight elements of src along lowering
// arrows.  hw_images maps hw element -> dst element or -1; every element of
// src must be reachable from some hw element.  The result is verified
// strict; throws std::logic_error otherwise.
CrystalMorphism strict_extension(const Crystal& src, const Crystal& dst,
                                 const std::map<int, int>& hw_images);

// Supplies the irreducible crystal of a given dominant highest weight.
using CrystalProvider = std::function<Crystal(const Weight&)>;

// The stability morphism
//   phi: B(w.(la+tau nu), mu+nu) -> B(nu+w.tau nu) (x) B(w.la, mu) u {0},
// defined on highest weight elements b (x) b_{mu+nu} by
//   phi(b (x) b_{mu+nu}) = b_{nu+w.tau nu} (x) pi(b) (x) b_mu
// and extended along lowering arrows.  Source and target are materialized
// as component restrictions of tensor crystals; `provider` supplies the
// irreducible crystals.
struct StabilityMorphism {
  SubCrystal source;        // inside tensor(B(la+tau nu), B(mu+nu))
  SubCrystal target_inner;  // B(w.la, mu) inside tensor(B(la), B(mu))
  Crystal target;           // tensor(B(nu+w.tau nu), target_inner.graph)
  CrystalMorphism phi;      // source.graph -> target
};
StabilityMorphism stability_morphism(const AdmissiblePair& pair,
                                     const Weight& la, const Weight& mu,
                                     const Weight& nu,
                                     const CrystalProvider& provider);

// Label-and-weight matching isomorphism test: the bijection pairs elements
// with equal (weight, label) and must carry every arrow to an arrow.
bool isomorphic_as_labeled(const Crystal& a, const Crystal& b);

// Graph text dump: one node line per element (label = weight + ordinal
// label), one edge line per lowering arrow, edge label = 1-based node index.
void dump_dot(const Crystal& c, std::ostream& os);

}  // namespace qgrp
