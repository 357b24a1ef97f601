// Exact scalar arithmetic over the rational function field Q(q).
//
// Laurent is a Laurent polynomial in q with arbitrary-precision rational
// coefficients, kept as a sorted exponent->coefficient list with no zero
// terms.  RatFn is a quotient of two Laurent polynomials kept in a canonical
// form so that equality of values is equality of representations:
//   * numerator and denominator have integer coefficients with no common
//     integer content and no common polynomial factor,
//   * the denominator's lowest coefficient is positive and its exponent
//     range is centered on zero (so [2] stays q+q^-1, not q^2+1).
// The bar involution q -> q^{-1} and evaluation at q = infinity are the two
// nonstandard field operations everything downstream depends on.

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qgrp {

using Int = mpz_class;
using Rat = mpq_class;

// Raised by ev_inf on input with a pole at q = infinity.
struct NotRegularAtInfinity : std::runtime_error {
  explicit NotRegularAtInfinity(const std::string& what)
      : std::runtime_error(what) {}
};

class Laurent {
 public:
  Laurent() = default;
  explicit Laurent(const Rat& c) {
    if (c != 0) terms_.emplace_back(0, c);
  }
  explicit Laurent(long c) : Laurent(Rat(c)) {}

  static Laurent zero() { return Laurent(); }
  static Laurent one() { return Laurent(Rat(1)); }
  // c * q^k
  static Laurent monomial(const Rat& c, int k) {
    Laurent p;
    if (c != 0) p.terms_.emplace_back(k, c);
    return p;
  }
  static Laurent q_power(int k) { return monomial(Rat(1), k); }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 0);
  }
  bool is_monomial() const { return terms_.size() == 1; }
  int num_terms() const { return static_cast<int>(terms_.size()); }

  // Lowest/highest exponent; only meaningful on nonzero input.
  int low_exp() const { return terms_.front().first; }
  int high_exp() const { return terms_.back().first; }

  Rat coeff(int k) const;
  Rat leading() const { return terms_.back().second; }   // coeff of high_exp
  Rat trailing() const { return terms_.front().second; } // coeff of low_exp

  const std::vector<std::pair<int, Rat>>& terms() const { return terms_; }

  Laurent operator-() const;
  Laurent operator+(const Laurent& o) const;
  Laurent operator-(const Laurent& o) const;
  Laurent operator*(const Laurent& o) const;
  Laurent& operator+=(const Laurent& o) { return *this = *this + o; }
  Laurent& operator-=(const Laurent& o) { return *this = *this - o; }
  Laurent& operator*=(const Laurent& o) { return *this = *this * o; }
  bool operator==(const Laurent& o) const { return terms_ == o.terms_; }
  bool operator!=(const Laurent& o) const { return !(*this == o); }

  Laurent scaled(const Rat& c) const;
  Laurent shifted(int k) const;  // multiply by q^k
  Laurent bar() const;           // substitute q -> q^{-1}
  Laurent substitute_power(int d) const;  // substitute q -> q^d, d >= 1
  Rat eval_one() const;          // evaluate at q = 1

  // Quotient/remainder in Q[q]; both operands must have low_exp >= 0 and
  // divisor must be nonzero.
  static std::pair<Laurent, Laurent> divmod(const Laurent& a, const Laurent& b);
  // Monic gcd in Q[q] of polynomial (low_exp >= 0) arguments.
  static Laurent poly_gcd(Laurent a, Laurent b);
  // Exact division: throws std::logic_error when the remainder is nonzero.
  static Laurent exact_div(const Laurent& a, const Laurent& b);

  // Rendered with exponents strictly decreasing, e.g. "q^2+1+q^-2".
  std::string str() const;

 private:
  // invariant: sorted by exponent ascending, no zero coefficients
  std::vector<std::pair<int, Rat>> terms_;
};

class RatFn {
 public:
  RatFn() : num_(), den_(Laurent::one()) {}
  RatFn(const Laurent& num, const Laurent& den) { assign(num, den); }
  explicit RatFn(const Laurent& num) : num_(num), den_(Laurent::one()) {
    canonicalize();
  }
  explicit RatFn(const Rat& c) : RatFn(Laurent(c)) {}
  explicit RatFn(long c) : RatFn(Laurent(c)) {}

  static RatFn zero() { return RatFn(); }
  static RatFn one() { return RatFn(1L); }
  static RatFn q_power(int k) { return RatFn(Laurent::q_power(k)); }

  const Laurent& num() const { return num_; }
  const Laurent& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool operator==(const RatFn& o) const {
    return num_ == o.num_ && den_ == o.den_;
  }
  bool operator!=(const RatFn& o) const { return !(*this == o); }

  RatFn operator-() const;
  RatFn operator+(const RatFn& o) const;
  RatFn operator-(const RatFn& o) const;
  RatFn operator*(const RatFn& o) const;
  RatFn operator/(const RatFn& o) const;
  RatFn& operator+=(const RatFn& o) { return *this = *this + o; }
  RatFn& operator-=(const RatFn& o) { return *this = *this - o; }
  RatFn& operator*=(const RatFn& o) { return *this = *this * o; }
  RatFn& operator/=(const RatFn& o) { return *this = *this / o; }

  RatFn inverse() const;
  RatFn bar() const;  // q -> q^{-1}

  // Membership tests against the canonical form.
  bool in_laurent_ring() const { return den_.is_constant(); }  // Q[q,q^-1]
  bool regular_at_inf() const;                                 // A_infinity
  // q^{-1} Q[q^{-1}]: a Laurent polynomial with only negative exponents.
  bool in_qinv_polys() const;
  // q^{-1} Z[q^{-1}] (integrality of icanonical corrections).
  bool in_qinv_int_polys() const;

  // Value at q = infinity; throws NotRegularAtInfinity on a pole.
  Rat ev_inf() const;

  // Conversion to Laurent; throws std::logic_error unless in_laurent_ring().
  Laurent to_laurent() const;

  // Rendered "(num)/(den)" with decreasing exponents; the parentheses and
  // denominator are omitted when the denominator is 1.
  std::string str() const;

 private:
  void assign(Laurent num, Laurent den);
  void canonicalize();

  Laurent num_;
  Laurent den_;
};

// Quantum integer [n]_i = (q_i^n - q_i^{-n}) / (q_i - q_i^{-1}) with
// q_i = q^d, as a Laurent polynomial.  [-n] = -[n], [0] = 0.
Laurent qint(int n, int d = 1);
// [n]_i! for n >= 0.
Laurent qfactorial(int n, int d = 1);
// Gaussian binomial [a over b]_i; zero when b < 0 or (a >= 0 and a < b).
Laurent qbinom(int a, int b, int d = 1);

}  // namespace qgrp
