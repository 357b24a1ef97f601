#pragma once
// Coideal-subalgebra layer on top of a based module: twisted generators B_i,
// the bar-like involution they intertwine (found from a cyclic vector, with a
// triangular-correction fallback), the distinguished basis fixed by that
// involution, invariant vectors, and the tower of projection functionals.

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qgrp/braid.hpp"
#include "qgrp/gcb.hpp"
#include "qgrp/linalg.hpp"
#include "qgrp/rep.hpp"
#include "qgrp/rootdata.hpp"

namespace qgrp {

// Raised when the intertwiner equation for the involution has no solution or
// more than one solution on the given module.
struct NonUniqueIbar : std::runtime_error {
  explicit NonUniqueIbar(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an invariant subspace expected to be a line has another size.
struct WrongDimension : std::runtime_error {
  int dim;
  explicit WrongDimension(int d)
      : std::runtime_error("invariant subspace has dimension " +
                           std::to_string(d)),
        dim(d) {}
};

// Matrix of the twisted generator at node i: F_i at a black node, and
//   F_i + varsigma_i (T E_{tau(i)} T^{-1}) K_i^{-1} + kappa_i K_i^{-1}
// at a white node, with T the braid operator of the black longest word.
SMat b_matrix(const AdmissiblePair& pair, const Module& m,
              const BraidOperator& t_black, int i);

struct IModuleContext {
  AdmissiblePair pair;
  BasedStructure based;
  std::vector<SMat> b_mat;  // twisted generator at each node
  BraidOperator t_black;
  SVec cyclic;              // distinguished vector fixed by the involution
  SMat ibar_mat;            // involution: v -> ibar_mat * (entrywise bar of v)
  std::string ibar_path;    // "cyclic" or "quasi-k"
  std::vector<SVec> iglobal;  // distinguished basis, one per crystal element
  SMat icoeff;      // column b = coefficients of iglobal[b] over the globals
  SMat icoeff_inv;  // inverse change of basis

  SVec apply_b(int i, const SVec& v) const { return b_mat[i].apply(v); }
  SVec apply_ibar(const SVec& v) const { return ibar_mat.apply(v.bar()); }
  // Coefficients of v over the distinguished basis (exact).
  std::vector<std::pair<int, RatFn>> in_iglobal(const SVec& v) const;
};

// Assemble the full context for a based module with a distinguished cyclic
// vector (the vector the involution must fix).  The involution is first
// propagated from the cyclic vector through the twisted generators; when
// those translates do not span, it is instead solved for in the form
// (1 + N) * bar with N supported on strictly dominance-raising positions
// within a fixed coweight-pairing class.  Either way the result is verified
// to intertwine every generator, fix the cyclic vector, and square to the
// identity; the route taken is recorded in ibar_path.  The distinguished
// basis is then computed by triangular correction of the global basis.
IModuleContext make_icontext(const AdmissiblePair& pair, BasedStructure based,
                             SVec cyclic);

// The unique vector killed by E_j, F_j at black nodes and by every white
// twisted generator, and fixed by K_h for h in the fixed-coweight lattice;
// normalized so its coefficient at the highest-weight global is 1.  Throws
// WrongDimension when the solution space is not a line.
SVec invariant_vector(const IModuleContext& ctx);

// The projection functional g_m : V(m * varpi) -> V(0).  g_0 is the identity
// on the trivial module; g_1 pairs against the invariant line of V(varpi)
// through the contravariant form, normalized with g_1(v_varpi) = 1; higher
// g_m are built recursively as g_1 (g_{m-1} (x) id) chi.
ModuleMap g_functional(BasedCache& cache, const AdmissiblePair& pair, int m);

// (g (x) id) : tensor -> rest, where g is a functional to the trivial module
// on the leading tensor factor and rest carries the remaining factors
// (indexing is row-major with the leading factor slowest).
ModuleMap functional_tensor_id(const ModuleMap& g, const Module& tensor,
                               const Module& rest);

struct BasedIHomReport {
  bool intertwines_ok = false;  // commutes with B_i, black E_j, and the K_h
  bool lattice_ok = false;      // images of the distinguished basis have
                                // A_infinity coefficients and unit (or zero)
                                // classes at q = infinity
  bool integral_ok = false;     // coefficients lie in Z[q, q^{-1}]
  bool ibar_ok = false;         // f intertwines the two involutions
  bool fibers_ok = false;       // induced map injective on nonzero fibers
  std::vector<int> induced;     // induced image per element (-1 = 0)
  bool exact_on_iglobals = false;  // f(G(b)) is literally a G(b') or 0
  std::string witness;             // first failure detail

  bool ok() const {
    return intertwines_ok && lattice_ok && integral_ok && ibar_ok && fibers_ok;
  }
};

// Exact check that f : src -> dst is a morphism of based modules for the
// coideal structures: generator intertwining, involution intertwining, and
// the lattice/integrality/fiber conditions on distinguished basis images.
BasedIHomReport is_based_ihom(const ModuleMap& f, const IModuleContext& src,
                              const IModuleContext& dst);

}  // namespace qgrp
