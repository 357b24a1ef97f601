// Crystal and global bases of modules: Kashiwara operators, crystal
// extraction by lattice saturation, bar involutions of irreducibles and
// tensor products, the triangular bar-fixing that produces global bases,
// highest-weight vectors, canonical lifts of crystal morphisms, the
// based-homomorphism criteria, and based submodules/filtrations.

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qgrp/crystal.hpp"
#include "qgrp/rep.hpp"

namespace qgrp {

// The bar-fixing system failed to be triangular (diagonal or cyclic residue,
// a residue with a constant term, or one that is not bar-antisymmetric).
// Signals a convention bug, never expected data.
struct TriangularityFailure : std::runtime_error {
  explicit TriangularityFailure(const std::string& what)
      : std::runtime_error(what) {}
};

// A subspace claimed to be spanned by global basis vectors is not.
struct NotBasedSpan : std::runtime_error {
  explicit NotBasedSpan(const std::string& what) : std::runtime_error(what) {}
};

// The lifting hypothesis f(E_i G(b)) = E_i G(phi(b)) failed at (node, element).
struct HypothesisFailed : std::runtime_error {
  int node;
  std::string element;
  HypothesisFailed(int i, std::string b)
      : std::runtime_error("lifting hypothesis failed at node " +
                           std::to_string(i + 1) + ", element " + b),
        node(i),
        element(std::move(b)) {}
};

enum class KashDir { raise, lower };

// Kashiwara operator on an exact vector: decompose into i-strings
// v = sum F_i^(k) u_k and shift every string part one step.
SVec kashiwara(const Module& m, int i, KashDir dir, const SVec& v);

// A module with its crystal, lattice representatives, global basis, and bar
// involution.  Crystal element k corresponds to lattice[k] and global[k];
// the bar involution is psi(v) = bar_mat * (coefficientwise bar of v).
struct BasedStructure {
  Module mod;
  Crystal crystal;
  std::vector<SVec> lattice;  // class representative of element k
  std::vector<SVec> global;   // G(k)
  SMat bar_mat;

  SVec apply_bar(const SVec& v) const { return bar_mat.apply(v.bar()); }
  // Coefficients of v over the global basis (exact; solved per weight block).
  std::vector<std::pair<int, RatFn>> in_global(const SVec& v) const;
};

// A seed for crystal extraction: a weight vector with its crystal label.
struct Seed {
  SVec vec;
  std::string label;
};

// Crystal of the module extracted by saturating the seeds under lowering
// Kashiwara operators: candidates are collected weight by weight
// (descending), a local-ring elimination finds a lattice basis, and the
// classes of the candidates at q = infinity become the crystal elements
// (in discovery order) with arrows given by candidate provenance.
Crystal kashiwara_crystal(const Module& m, const std::vector<Seed>& seeds);

// Full pipeline: saturation as above, then the unique bar-fixed global
// basis G(b) = rep(b) + sum of q^{-1}Q[q^{-1}] corrections by lattice
// representatives.  Throws TriangularityFailure when the residues are not
// strictly triangular.
BasedStructure global_basis(const Module& m, const SMat& bar,
                            const std::vector<Seed>& seeds);

// Bar involution of an irreducible: every construction basis vector is an
// F-word image of the highest vector, hence fixed; the matrix is the
// identity.
SMat bar_irreducible(const Module& m);

// Bar involution of a (possibly nested) tensor product of irreducibles,
// computed by recursion over the F-word provenance of the last factor; the
// result intertwines the U-action with the bar of scalars and squares to
// the identity (verified by tests, not here).
SMat bar_tensor(const Module& t);

// Based structure of an irreducible highest-weight module (bar = identity,
// seed = highest vector).
BasedStructure based_irreducible(const RootDatum& datum, const Weight& la);

// Based structure of a tensor product: combinatorial tensor crystal on pair
// indices, lattice representatives = pure tensors of the factor globals,
// global basis by bar-fixing those pure tensors.
BasedStructure based_tensor(const BasedStructure& a, const BasedStructure& b);

// u (x) v as a vector of the tensor module t = tensor(a, b).
SVec pure_tensor(const Module& t, const SVec& u, const SVec& v);

// For each highest-weight crystal element b, the isotypic projection
// v_b of G(b): a genuine highest-weight vector (E_i v_b = 0), bar-fixed,
// congruent to G(b) modulo components of strictly higher highest weight.
std::vector<std::pair<int, SVec>> hw_vectors(const BasedStructure& m);

// Lift a strict crystal morphism phi between the crystals of two based
// structures to the unique module map with f(v_b) = v_{phi(b)} on all
// highest-weight vectors (0 when phi kills b).
ModuleMap canonical_lift(const BasedStructure& src, const BasedStructure& dst,
                         const CrystalMorphism& phi);

// The four based-homomorphism criteria, reported separately.
struct BasedHomReport {
  bool lattice_ok = false;   // images of globals have A_oo coefficients and
                             // unit (or zero) classes at q = infinity
  bool integral_ok = false;  // coefficients lie in Z[q, q^{-1}]-span (A-form)
  bool bar_ok = false;       // f psi_M = psi_N f as matrices
  bool fibers_ok = false;    // induced crystal map injective on nonzero fibers
  std::vector<int> induced;  // induced crystal image (-1 = 0) when lattice_ok
  bool exact_on_globals = false;  // f(G(b)) is literally G(phi(b)) or 0
  std::string witness;            // first failure detail

  bool ok() const { return lattice_ok && integral_ok && bar_ok && fibers_ok; }
};
BasedHomReport is_based_hom(const ModuleMap& f, const BasedStructure& src,
                            const BasedStructure& dst);

// canonical_lift plus verification: checks f(E_i G(b)) = E_i G(phi(b)) for
// every highest-weight element (ascending by the count of strictly-higher
// highest weights), throwing HypothesisFailed on a violation; then asserts
// f(G(b)) = G(phi(b)) for every b and that the map passes is_based_hom.
ModuleMap suff_cond_lift(const BasedStructure& src, const BasedStructure& dst,
                         const CrystalMorphism& phi);

// The unique map V(la+mu) -> V(la) (x) V(mu) sending the highest vector to
// the pure tensor of highest vectors; verified based.
ModuleMap product_embedding(const BasedStructure& sum,
                            const BasedStructure& prod);

// The invariant functional on a tensor module (one-dimensional space of
// solutions of d E_i = d F_i = 0), normalized to take value 1 on
// normalize_at; returned as its coefficient row in the module basis.
SVec invariant_functional(const Module& t, const SVec& normalize_at);

// A based submodule presented on its own carrier module whose basis is the
// selected subset of parent globals (so the carrier's globals are unit
// vectors and its bar is plain coefficient conjugation).
struct SubBased {
  BasedStructure sub;
  ModuleMap embed;            // carrier -> parent, columns = parent globals
  std::vector<int> elements;  // carrier element k -> parent crystal element
};

// U-submodule generated by the given vectors, verified to be spanned by
// global basis vectors (NotBasedSpan otherwise).
SubBased submodule_generated(const BasedStructure& parent,
                             const std::vector<SVec>& gens);

// Isotypic filtration pieces: the span of all crystal components whose
// highest weight is > la (strict) or >= la in dominance order.
SubBased isotypic_above(const BasedStructure& parent, const Weight& la,
                        bool strict);
// The piece generated by a highest-weight element b: everything above
// wt(b) plus the component of b itself.
SubBased isotypic_at_least(const BasedStructure& parent, int hw_element);

// Cache of based irreducibles over one root datum, with a crystal provider
// view for the crystal-level operations.  The cache must outlive the
// provider closure.
class BasedCache {
 public:
  explicit BasedCache(RootDatum datum) : datum_(std::move(datum)) {}
  const BasedStructure& at(const Weight& la);
  const BasedStructure& at_tensor(const Weight& a, const Weight& b);
  CrystalProvider provider();

 private:
  RootDatum datum_;
  std::map<Weight, BasedStructure> cache_;
  std::map<std::pair<Weight, Weight>, BasedStructure> tensor_cache_;
};

}  // namespace qgrp
