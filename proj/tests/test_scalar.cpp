// Scalar layer: Laurent polynomials, canonical rational functions, the bar
// involution, quantum integers, and evaluation at q = infinity.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qgrp/scalar.hpp"

using namespace qgrp;

namespace {

std::mt19937 rng(20240817);

Laurent random_laurent(int max_terms = 4, int exp_range = 6, int coef_range = 9) {
  std::uniform_int_distribution<int> nt(0, max_terms);
  std::uniform_int_distribution<int> ex(-exp_range, exp_range);
  std::uniform_int_distribution<int> cf(-coef_range, coef_range);
  Laurent p;
  int n = nt(rng);
  for (int i = 0; i < n; ++i)
    p += Laurent::monomial(Rat(cf(rng)), ex(rng));
  return p;
}

RatFn random_ratfn() {
  Laurent den;
  while (den.is_zero()) den = random_laurent();
  return RatFn(random_laurent(), den);
}

}  // namespace

TEST_CASE("quantum integers match their defining expansion") {
  CHECK(qint(0, 1).is_zero());
  CHECK(qint(1, 1) == Laurent::one());
  CHECK(qint(2, 1) == Laurent::q_power(1) + Laurent::q_power(-1));
  CHECK(qint(3, 1) ==
        Laurent::q_power(2) + Laurent::one() + Laurent::q_power(-2));
  CHECK(qint(2, 2) == Laurent::q_power(2) + Laurent::q_power(-2));
  CHECK(qint(-4, 1) == -qint(4, 1));
  // (q_i^n - q_i^{-n}) = [n]_i (q_i - q_i^{-1}) for assorted n, d
  for (int d = 1; d <= 3; ++d)
    for (int n = -6; n <= 6; ++n) {
      Laurent lhs = Laurent::q_power(n * d) - Laurent::q_power(-n * d);
      Laurent rhs = qint(n, d) * (Laurent::q_power(d) - Laurent::q_power(-d));
      CHECK(lhs == rhs);
    }
}

TEST_CASE("[2][m] = [m+1] + [m-1] for 1 <= m <= 20") {
  for (int m = 1; m <= 20; ++m)
    CHECK(qint(2, 1) * qint(m, 1) == qint(m + 1, 1) + qint(m - 1, 1));
}

TEST_CASE("q-factorials and q-binomials satisfy Pascal recurrences") {
  for (int d = 1; d <= 2; ++d) {
    CHECK(qbinom(4, 2, d) ==
          RatFn(qfactorial(4, d), qfactorial(2, d) * qfactorial(2, d))
              .to_laurent());
    for (int a = 1; a <= 8; ++a)
      for (int b = 0; b <= a; ++b) {
        // [a b] = q^b [a-1 b] + q^{b-a} [a-1 b-1]  (one q-Pascal rule)
        Laurent lhs = qbinom(a, b, d);
        Laurent rhs = qbinom(a - 1, b, d).shifted(b * d) +
                      qbinom(a - 1, b - 1, d).shifted((b - a) * d);
        CHECK(lhs == rhs);
      }
  }
  CHECK(qbinom(2, 1, 1) == qint(2, 1));
  CHECK(qbinom(-1, 1, 1) == -Laurent::one());
  CHECK(qbinom(5, 7, 1).is_zero());
}

TEST_CASE("bar involution fixes quantum integers and is a ring involution") {
  for (int n = 1; n <= 20; ++n) {
    CHECK(qint(n, 1).bar() == qint(n, 1));
    CHECK(RatFn(Laurent::one(), qint(n, 1)).bar() ==
          RatFn(Laurent::one(), qint(n, 1)));
  }
  CHECK(RatFn::q_power(1).bar() == RatFn::q_power(-1));
  for (int trial = 0; trial < 200; ++trial) {
    RatFn x = random_ratfn(), y = random_ratfn();
    CHECK(x.bar().bar() == x);
    CHECK((x * y).bar() == x.bar() * y.bar());
    CHECK((x + y).bar() == x.bar() + y.bar());
  }
}

TEST_CASE("field laws hold on random triples and canonical form is unique") {
  for (int trial = 0; trial < 200; ++trial) {
    RatFn x = random_ratfn(), y = random_ratfn(), z = random_ratfn();
    CHECK((x + y) * z == x * z + y * z);
    CHECK(x + y == y + x);
    CHECK((x * y) * z == x * (y * z));
    CHECK((x - x).is_zero());
    CHECK(x - x == RatFn::zero());
    if (!x.is_zero()) {
      CHECK(x * x.inverse() == RatFn::one());
      CHECK(x / x == RatFn::one());
    }
  }
  // same value built two ways collapses to one representation
  RatFn a = RatFn(qint(3, 1) * qint(2, 1), qint(2, 1) * qint(2, 1));
  RatFn b = RatFn(qint(3, 1), qint(2, 1));
  CHECK(a == b);
}

TEST_CASE("ev_inf matches the examples and is a ring hom on A_inf") {
  RatFn one_pq = RatFn::one() + RatFn::q_power(-1);
  CHECK(one_pq.ev_inf() == 1);
  RatFn small = RatFn::q_power(-2) / one_pq;
  CHECK(small.ev_inf() == 0);
  CHECK_THROWS_AS(RatFn::q_power(1).ev_inf(), NotRegularAtInfinity);

  for (int trial = 0; trial < 200; ++trial) {
    RatFn x = random_ratfn(), y = random_ratfn();
    if (!x.regular_at_inf() || !y.regular_at_inf()) continue;
    CHECK((x + y).regular_at_inf());
    CHECK((x * y).regular_at_inf());
    CHECK((x + y).ev_inf() == x.ev_inf() + y.ev_inf());
    CHECK((x * y).ev_inf() == x.ev_inf() * y.ev_inf());
  }
}

TEST_CASE("membership predicates respect the canonical form") {
  CHECK(RatFn(qint(5, 2)).in_laurent_ring());
  CHECK(!RatFn(Laurent::one(), qint(2, 1)).in_laurent_ring());
  CHECK(RatFn::q_power(-3).in_qinv_polys());
  CHECK(RatFn::q_power(-3).in_qinv_int_polys());
  CHECK(!RatFn::one().in_qinv_polys());
  CHECK(!(RatFn::q_power(-1) + RatFn::one()).in_qinv_polys());
  RatFn half_qinv = RatFn(Laurent::monomial(Rat(1, 2), -1));
  CHECK(half_qinv.in_qinv_polys());
  CHECK(!half_qinv.in_qinv_int_polys());
}

TEST_CASE("rendering uses decreasing exponents with centered denominators") {
  RatFn r = RatFn(qint(3, 1), qint(2, 1));
  CHECK(r.str() == "(q^2+1+q^-2)/(q+q^-1)");
  CHECK(RatFn(qint(2, 1)).str() == "q+q^-1");
  CHECK(RatFn(Rat(-5)).str() == "-5");
  CHECK((RatFn::q_power(2) * RatFn(Rat(3))).str() == "3q^2");
  CHECK(RatFn::zero().str() == "0");
  CHECK((-RatFn::q_power(-1)).str() == "-q^-1");
}
