// Integrable modules: irreducible highest-weight modules built from the
// Cartan data alone, lowest-weight realizations, tensor products under the
// coproduct, divided-power actions, and the contravariant bilinear form.

#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "qgrp/linalg.hpp"
#include "qgrp/rootdata.hpp"

namespace qgrp {

struct SizeBoundExceeded : std::runtime_error {
  explicit SizeBoundExceeded(const std::string& what)
      : std::runtime_error(what) {}
};

// Construction refuses to grow a basis beyond this bound (default 20000).
int& size_bound();

class Module;
Module irreducible(const RootDatum& datum, const Weight& la);
Module tensor(const Module& m, const Module& n);
// Assemble a module directly from a weight list and generator matrices
// (columns = images of basis vectors).  Validates the weight grading of the
// matrices; used to carve submodules and quotients out of larger modules.
Module module_from_action(const RootDatum& datum, std::vector<Weight> wts,
                          std::vector<SMat> emats, std::vector<SMat> fmats);

// A finite-dimensional weight module with exact sparse generator actions.
// Handles are cheap to copy; the underlying data is immutable and shared.
class Module {
 public:
  Module() = default;
  bool valid() const { return static_cast<bool>(d_); }

  const RootDatum& datum() const;
  int dim() const;
  const Weight& weight_of(int idx) const;
  const std::vector<int>& block(const Weight& nu) const;  // empty when absent
  const std::map<Weight, std::vector<int>>& blocks() const;

  const SMat& e_mat(int i) const;
  const SMat& f_mat(int i) const;
  SVec apply_e(int i, const SVec& v) const;
  SVec apply_f(int i, const SVec& v) const;
  SVec apply_k(const Coweight& h, const SVec& v) const;  // K_h
  SVec apply_ki(int i, int power, const SVec& v) const;  // K_i^power
  const SMat& divided_e_mat(int i, int a) const;         // E_i^(a)
  const SMat& divided_f_mat(int i, int a) const;         // F_i^(a)
  SVec divided_e(int i, int a, const SVec& v) const;
  SVec divided_f(int i, int a, const SVec& v) const;

  // Highest-weight structure (irreducible constructions only).
  bool is_irreducible() const;
  const Weight& highest_weight() const;
  SVec highest_vector() const;  // basis index 0
  // Contravariant form with (v_hw, v_hw) = 1; irreducible modules only.
  RatFn form(const SVec& u, const SVec& v) const;

  // Tensor structure: 1 factor for irreducibles, 2 for tensor products.
  int factor_count() const;
  const Module& factor(int k) const;
  int pair_index(int a, int b) const;
  std::pair<int, int> unpair_index(int idx) const;

  // Labels: a default weight/ordinal name, plus optional aliases attached by
  // later layers (presentation metadata only).
  std::string label(int idx) const;
  void set_alias(const std::string& name, int idx) const;
  std::optional<int> index_of(const std::string& name) const;

  // The common weight of all basis vectors v touches; nullopt when v is zero
  // or inhomogeneous.
  std::optional<Weight> weight_of_vec(const SVec& v) const;

  bool same_as(const Module& o) const { return d_ == o.d_; }

 private:
  struct Data;
  std::shared_ptr<const Data> d_;
  friend Module irreducible(const RootDatum&, const Weight&);
  friend Module tensor(const Module&, const Module&);
  friend Module module_from_action(const RootDatum&, std::vector<Weight>,
                                   std::vector<SMat>, std::vector<SMat>);
};

// V(-la) realized as V(-w0 la) together with its extremal vector of weight
// -la (exact, obtained by a divided-power walk along the longest word).
struct LowestRealization {
  Module mod;
  SVec lowest;
};
LowestRealization lowest_weight_module(const RootDatum& datum, const Weight& la);

// Extremal vector v_{w la} of an irreducible module.
SVec extremal_vector(const Module& m, const WeylWord& w);

// A linear map between modules over the same datum, stored as a sparse
// matrix in the source/target bases.
struct ModuleMap {
  Module src;
  Module dst;
  SMat mat;

  SVec apply(const SVec& v) const { return mat.apply(v); }
  // Exact check that the map commutes with every E_i, F_i and preserves
  // weights (hence commutes with every K_h).
  bool intertwines() const;
};

ModuleMap identity_map(const Module& m);
ModuleMap compose_maps(const ModuleMap& outer, const ModuleMap& inner);

// One line per nonzero generator matrix entry: gen=F_i row=r col=c val=...
void dump_module(const Module& m, std::ostream& os);

}  // namespace qgrp
