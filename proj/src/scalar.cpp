#include "qgrp/scalar.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace qgrp {

Rat Laurent::coeff(int k) const {
  auto it = std::lower_bound(
      terms_.begin(), terms_.end(), k,
      [](const std::pair<int, Rat>& t, int e) { return t.first < e; });
  if (it != terms_.end() && it->first == k) return it->second;
  return Rat(0);
}

Laurent Laurent::operator-() const {
  Laurent r = *this;
  for (auto& t : r.terms_) t.second = -t.second;
  return r;
}

Laurent Laurent::operator+(const Laurent& o) const {
  Laurent r;
  r.terms_.reserve(terms_.size() + o.terms_.size());
  size_t i = 0, j = 0;
  while (i < terms_.size() || j < o.terms_.size()) {
    if (j == o.terms_.size() ||
        (i < terms_.size() && terms_[i].first < o.terms_[j].first)) {
      r.terms_.push_back(terms_[i++]);
    } else if (i == terms_.size() || o.terms_[j].first < terms_[i].first) {
      r.terms_.push_back(o.terms_[j++]);
    } else {
      Rat c = terms_[i].second + o.terms_[j].second;
      if (c != 0) r.terms_.emplace_back(terms_[i].first, c);
      ++i;
      ++j;
    }
  }
  return r;
}

Laurent Laurent::operator-(const Laurent& o) const { return *this + (-o); }

Laurent Laurent::operator*(const Laurent& o) const {
  if (is_zero() || o.is_zero()) return Laurent();
  std::map<int, Rat> acc;
  for (const auto& a : terms_)
    for (const auto& b : o.terms_) {
      Rat c = a.second * b.second;
      auto [it, inserted] = acc.emplace(a.first + b.first, c);
      if (!inserted) it->second += c;
    }
  Laurent r;
  r.terms_.reserve(acc.size());
  for (auto& [e, c] : acc)
    if (c != 0) r.terms_.emplace_back(e, c);
  return r;
}

Laurent Laurent::scaled(const Rat& c) const {
  if (c == 0) return Laurent();
  Laurent r = *this;
  for (auto& t : r.terms_) t.second *= c;
  return r;
}

Laurent Laurent::shifted(int k) const {
  Laurent r = *this;
  for (auto& t : r.terms_) t.first += k;
  return r;
}

Laurent Laurent::bar() const {
  Laurent r;
  r.terms_.reserve(terms_.size());
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it)
    r.terms_.emplace_back(-it->first, it->second);
  return r;
}

Laurent Laurent::substitute_power(int d) const {
  Laurent r = *this;
  for (auto& t : r.terms_) t.first *= d;
  return r;
}

Rat Laurent::eval_one() const {
  Rat s(0);
  for (const auto& t : terms_) s += t.second;
  return s;
}

std::pair<Laurent, Laurent> Laurent::divmod(const Laurent& a,
                                            const Laurent& b) {
  if (b.is_zero()) throw std::logic_error("Laurent::divmod by zero");
  if ((!a.is_zero() && a.low_exp() < 0) || b.low_exp() < 0)
    throw std::logic_error("Laurent::divmod wants polynomial arguments");
  Laurent q, r = a;
  while (!r.is_zero() && r.high_exp() >= b.high_exp()) {
    Laurent t = Laurent::monomial(r.leading() / b.leading(),
                                  r.high_exp() - b.high_exp());
    q += t;
    r -= t * b;
  }
  return {q, r};
}

Laurent Laurent::poly_gcd(Laurent a, Laurent b) {
  if (!a.is_zero()) a = a.shifted(-a.low_exp());
  if (!b.is_zero()) b = b.shifted(-b.low_exp());
  while (!b.is_zero()) {
    Laurent r = divmod(a, b).second;
    a = b;
    b = r;
  }
  if (a.is_zero()) return a;
  return a.scaled(Rat(1) / a.leading());  // monic
}

Laurent Laurent::exact_div(const Laurent& a, const Laurent& b) {
  auto [q, r] = divmod(a, b);
  if (!r.is_zero()) throw std::logic_error("Laurent::exact_div not exact");
  return q;
}

std::string Laurent::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    Rat c = it->second;
    int e = it->first;
    if (c < 0) {
      os << "-";
      c = -c;
    } else if (!first) {
      os << "+";
    }
    first = false;
    bool unit = (c == 1);
    if (e == 0) {
      if (c.get_den() == 1)
        os << c.get_num().get_str();
      else
        os << c.get_str();
    } else {
      if (!unit) {
        if (c.get_den() == 1)
          os << c.get_num().get_str();
        else
          os << "(" << c.get_str() << ")";
      }
      os << "q";
      if (e != 1) os << "^" << e;
    }
  }
  return os.str();
}

void RatFn::assign(Laurent num, Laurent den) {
  if (den.is_zero()) throw std::logic_error("RatFn with zero denominator");
  num_ = std::move(num);
  den_ = std::move(den);
  canonicalize();
}

void RatFn::canonicalize() {
  if (num_.is_zero()) {
    den_ = Laurent::one();
    return;
  }
  // Split powers of q so that both parts have nonzero constant term.
  int a = num_.low_exp();
  int b = den_.low_exp();
  Laurent n = num_.shifted(-a);
  Laurent d = den_.shifted(-b);
  Laurent g = Laurent::poly_gcd(n, d);
  if (!g.is_constant()) {
    n = Laurent::exact_div(n, g);
    d = Laurent::exact_div(d, g);
  }
  // Clear rational coefficients: common integer content, positive trailing
  // denominator coefficient.
  Int lcm_den(1), gcd_num(0);
  auto scan = [&](const Laurent& p) {
    for (const auto& t : p.terms()) {
      mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(),
              t.second.get_den().get_mpz_t());
    }
  };
  scan(n);
  scan(d);
  auto scan2 = [&](const Laurent& p) {
    for (const auto& t : p.terms()) {
      Int v = t.second.get_num() * (lcm_den / t.second.get_den());
      mpz_gcd(gcd_num.get_mpz_t(), gcd_num.get_mpz_t(), v.get_mpz_t());
    }
  };
  scan2(n);
  scan2(d);
  Rat scale = Rat(lcm_den) / Rat(gcd_num);
  if (d.trailing() * scale < 0) scale = -scale;
  // Center the denominator (shift chosen so its exponents straddle zero,
  // e.g. q+q^-1 rather than q^2+1); this pins the q-power split uniquely.
  int s = -(d.high_exp() / 2);
  num_ = n.scaled(scale).shifted(a - b + s);
  den_ = d.scaled(scale).shifted(s);
}

RatFn RatFn::operator-() const {
  RatFn r = *this;
  r.num_ = -r.num_;
  return r;
}

RatFn RatFn::operator+(const RatFn& o) const {
  return RatFn(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

RatFn RatFn::operator-(const RatFn& o) const {
  return RatFn(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

RatFn RatFn::operator*(const RatFn& o) const {
  return RatFn(num_ * o.num_, den_ * o.den_);
}

RatFn RatFn::operator/(const RatFn& o) const {
  if (o.is_zero()) throw std::logic_error("RatFn division by zero");
  return RatFn(num_ * o.den_, den_ * o.num_);
}

RatFn RatFn::inverse() const {
  if (is_zero()) throw std::logic_error("RatFn inverse of zero");
  return RatFn(den_, num_);
}

RatFn RatFn::bar() const { return RatFn(num_.bar(), den_.bar()); }

bool RatFn::regular_at_inf() const {
  if (num_.is_zero()) return true;
  return num_.high_exp() <= den_.high_exp();
}

bool RatFn::in_qinv_polys() const {
  if (num_.is_zero()) return true;
  return den_.is_constant() && num_.high_exp() <= -1;
}

bool RatFn::in_qinv_int_polys() const {
  if (num_.is_zero()) return true;
  if (!den_.is_constant() || den_ != Laurent::one()) return false;
  if (num_.high_exp() > -1) return false;
  for (const auto& t : num_.terms())
    if (t.second.get_den() != 1) return false;
  return true;
}

Rat RatFn::ev_inf() const {
  if (num_.is_zero()) return Rat(0);
  int dn = num_.high_exp(), dd = den_.high_exp();
  if (dn < dd) return Rat(0);
  if (dn == dd) return num_.leading() / den_.leading();
  throw NotRegularAtInfinity("pole at q=infinity: " + str());
}

Laurent RatFn::to_laurent() const {
  if (!in_laurent_ring())
    throw std::logic_error("RatFn::to_laurent on " + str());
  Rat c = den_.coeff(0);
  return num_.scaled(Rat(1) / c);
}

std::string RatFn::str() const {
  if (den_ == Laurent::one()) return num_.str();
  return "(" + num_.str() + ")/(" + den_.str() + ")";
}

Laurent qint(int n, int d) {
  Laurent r;
  bool neg = n < 0;
  if (neg) n = -n;
  for (int k = n - 1; k >= -(n - 1); k -= 2) r += Laurent::q_power(k * d);
  return neg ? -r : r;
}

Laurent qfactorial(int n, int d) {
  if (n < 0) throw std::logic_error("qfactorial of negative argument");
  Laurent r = Laurent::one();
  for (int k = 2; k <= n; ++k) r *= qint(k, d);
  return r;
}

Laurent qbinom(int a, int b, int d) {
  if (b < 0) return Laurent();
  if (a >= 0 && a < b) return Laurent();
  Laurent num = Laurent::one(), den = Laurent::one();
  for (int k = 1; k <= b; ++k) {
    num *= qint(a - b + k, d);
    den *= qint(k, d);
  }
  return RatFn(num, den).to_laurent();
}

}  // namespace qgrp
