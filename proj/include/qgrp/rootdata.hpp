// Cartan data for the finite series A/B/C/D/F4 and A1xA1: Cartan matrices
// with symmetrizers, weights in fundamental-weight coordinates, Weyl group
// actions, longest words, and the registry of the eight rank-one symmetric
// pairs together with their parameter settings.
//
// Node indices are 0-based throughout; the classical 1-based labels from the
// Dynkin diagram tables shift down by one.

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgrp/scalar.hpp"

namespace qgrp {

enum class Series { A, B, C, D, F4, A1xA1 };

struct UnsupportedType : std::runtime_error {
  explicit UnsupportedType(const std::string& what) : std::runtime_error(what) {}
};
struct NotDominant : std::runtime_error {
  explicit NotDominant(const std::string& what) : std::runtime_error(what) {}
};
struct NotMultipleOfVarpi : std::runtime_error {
  explicit NotMultipleOfVarpi(const std::string& what)
      : std::runtime_error(what) {}
};

// Weights live in X with the fundamental weights as basis; coweights live in
// Y with the simple coroots h_i as basis.  The natural pairing is then the
// plain dot product.
using Weight = std::vector<int>;
using Coweight = std::vector<int>;
using WeylWord = std::vector<int>;

class RootDatum {
 public:
  RootDatum() = default;  // empty datum; populate via build
  static RootDatum build(Series s, int n);

  Series series() const { return series_; }
  int rank() const { return rank_; }
  int cartan(int i, int j) const { return a_[static_cast<size_t>(i) * rank_ + j]; }
  int d(int i) const { return d_[i]; }

  Weight zero_weight() const { return Weight(rank_, 0); }
  Weight fundamental(int i) const;
  Weight simple_root(int j) const;  // column j of the Cartan matrix

  static int pairing(const Coweight& h, const Weight& la);
  bool dominant(const Weight& la) const;

  Weight reflect(int i, Weight la) const;        // s_i on X
  Coweight reflect_co(int i, Coweight h) const;  // s_i on Y
  Weight act(const WeylWord& w, Weight la) const;
  Coweight act_co(const WeylWord& w, Coweight h) const;

  // Coordinates of la in the simple-root basis (exact, possibly fractional);
  // integer-valued exactly on the root lattice.
  std::vector<Rat> root_coords(const Weight& la) const;
  // Partial order: la <= mu iff mu - la is a nonnegative integer combination
  // of simple roots.
  bool leq(const Weight& la, const Weight& mu) const;
  // Sum of the simple-root coordinates (exact rational value).
  Rat height(const Weight& la) const;

  std::string series_name() const;

 private:
  Series series_ = Series::A;
  int rank_ = 0;
  std::vector<int> a_;    // row-major Cartan matrix
  std::vector<int> d_;    // symmetrizer
  std::vector<Rat> ainv_; // row-major inverse Cartan matrix
};

// Reduced word for the longest element of the parabolic generated by the
// given nodes; greedy descent on a regular dominant weight of the parabolic.
WeylWord longest_word(const RootDatum& datum, const std::vector<int>& subset);
WeylWord longest_word(const RootDatum& datum);  // full Weyl group

enum class PairKind { AI, AII, AIII, AIV, BII, CII, DII, FII };

std::string pair_kind_name(PairKind k);
std::optional<PairKind> pair_kind_from_name(const std::string& s);

// A rank-one symmetric pair: ambient datum, black subdiagram, diagram
// involution tau, the parameters varsigma/kappa on white nodes, and the
// distinguished dominant weight varpi generating the theta-fixed cone.
struct AdmissiblePair {
  PairKind kind;
  std::string name;   // e.g. "CII:n=3"
  RootDatum datum;
  std::vector<int> black;       // sorted 0-based node list
  std::vector<int> tau;         // involution on all nodes
  std::map<int, RatFn> varsigma;  // white node -> parameter
  std::map<int, RatFn> kappa;     // white node -> parameter (always 0 here)
  Weight varpi;
  WeylWord w_black;             // longest word of the black parabolic

  bool is_black(int i) const;
  std::vector<int> white() const;

  Weight tau_weight(const Weight& la) const;
  // nu + w_black(tau(nu)).
  Weight theta(const Weight& nu) const;
  // The m >= 0 with theta(nu) = m * varpi; NotDominant / NotMultipleOfVarpi.
  int theta_multiple(const Weight& nu) const;

  // Z-basis of { h in Y | h + w_black(tau(h)) = 0 }.
  std::vector<Coweight> y_imath_basis() const;

  // Half-sum of positive black coroots, paired against alpha_i (rational).
  Rat rho_co_black_pairing(int i) const;
};

// Registry of the eight types; n is ignored for the fixed-rank kinds
// (AI, AII, AIII, FII) and validated for the families
// (AIV n>=2, BII n>=2, CII n>=3, DII n>=4).
AdmissiblePair admissible_pair(PairKind kind, int n = 0);

}  // namespace qgrp
