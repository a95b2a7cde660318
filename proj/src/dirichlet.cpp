#include "eskit/dirichlet.hpp"

#include <map>
#include <numeric>

namespace esk {

// ---- rational polynomials ----------------------------------------------------

QPoly qpoly_zero(std::size_t deg_bound) { return QPoly(deg_bound, mpq_class(0)); }

QPoly qpoly_const(const mpq_class& c) { return QPoly{c}; }

QPoly qpoly_monomial(const mpq_class& c, std::size_t k) {
  QPoly p(k + 1, mpq_class(0));
  p[k] = c;
  return p;
}

static void qpoly_trim(QPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

QPoly qpoly_add(const QPoly& a, const QPoly& b) {
  QPoly r(std::max(a.size(), b.size()), mpq_class(0));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  qpoly_trim(r);
  return r;
}

QPoly qpoly_sub(const QPoly& a, const QPoly& b) {
  QPoly r(std::max(a.size(), b.size()), mpq_class(0));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  qpoly_trim(r);
  return r;
}

QPoly qpoly_mul(const QPoly& a, const QPoly& b) {
  if (a.empty() || b.empty()) return {};
  QPoly r(a.size() + b.size() - 1, mpq_class(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  qpoly_trim(r);
  return r;
}

QPoly qpoly_scale(const QPoly& a, const mpq_class& c) {
  QPoly r = a;
  for (auto& x : r) x *= c;
  qpoly_trim(r);
  return r;
}

bool qpoly_is_zero(const QPoly& a) {
  for (const auto& x : a)
    if (x != 0) return false;
  return true;
}

QPoly qpoly_rem(QPoly a, const QPoly& b) {
  qpoly_trim(a);
  QPoly d = b;
  qpoly_trim(d);
  if (d.empty()) throw usage_error("polynomial division by zero");
  while (a.size() >= d.size()) {
    mpq_class q = a.back() / d.back();
    std::size_t shift = a.size() - d.size();
    for (std::size_t i = 0; i < d.size(); ++i) a[shift + i] -= q * d[i];
    qpoly_trim(a);
    if (!a.empty() && a.size() >= d.size() && a.back() == 0) qpoly_trim(a);
    if (a.empty()) break;
  }
  return a;
}

// exact division (throws if the remainder is nonzero)
static QPoly qpoly_div_exact(QPoly a, const QPoly& b) {
  qpoly_trim(a);
  QPoly d = b;
  qpoly_trim(d);
  if (d.empty()) throw usage_error("polynomial division by zero");
  if (a.empty()) return {};
  if (a.size() < d.size()) throw math_error("inexact polynomial division");
  QPoly q(a.size() - d.size() + 1, mpq_class(0));
  while (!a.empty() && a.size() >= d.size()) {
    mpq_class c = a.back() / d.back();
    std::size_t shift = a.size() - d.size();
    q[shift] = c;
    for (std::size_t i = 0; i < d.size(); ++i) a[shift + i] -= c * d[i];
    qpoly_trim(a);
  }
  if (!a.empty()) throw math_error("inexact polynomial division");
  return q;
}

QPoly cyclotomic_poly(u64 d) {
  static std::map<u64, QPoly> cache;
  auto it = cache.find(d);
  if (it != cache.end()) return it->second;
  // x^d - 1 divided by all proper cyclotomic factors
  QPoly num(d + 1, mpq_class(0));
  num[0] = -1;
  num[d] = 1;
  for (u64 e = 1; e < d; ++e)
    if (d % e == 0) num = qpoly_div_exact(num, cyclotomic_poly(e));
  cache[d] = num;
  return num;
}

// ---- cyclotomic elements -------------------------------------------------------

CycElem CycElem::zero(u64 D) { return CycElem{D, QPoly(D, mpq_class(0))}; }

CycElem CycElem::from_rational(u64 D, const mpq_class& r) {
  CycElem e = zero(D);
  e.c[0] = r;
  return e;
}

CycElem CycElem::root_power(u64 D, u64 k) {
  CycElem e = zero(D);
  e.c[k % D] = 1;
  return e;
}

static void check_same(const CycElem& a, const CycElem& b) {
  if (a.D != b.D) throw usage_error("cyclotomic order mismatch");
}

CycElem cyc_add(const CycElem& a, const CycElem& b) {
  check_same(a, b);
  CycElem r = a;
  for (u64 i = 0; i < a.D; ++i) r.c[i] += b.c[i];
  return r;
}

CycElem cyc_sub(const CycElem& a, const CycElem& b) {
  check_same(a, b);
  CycElem r = a;
  for (u64 i = 0; i < a.D; ++i) r.c[i] -= b.c[i];
  return r;
}

CycElem cyc_mul(const CycElem& a, const CycElem& b) {
  check_same(a, b);
  CycElem r = CycElem::zero(a.D);
  for (u64 i = 0; i < a.D; ++i) {
    if (a.c[i] == 0) continue;
    for (u64 j = 0; j < a.D; ++j) {
      if (b.c[j] == 0) continue;
      r.c[(i + j) % a.D] += a.c[i] * b.c[j];
    }
  }
  return r;
}

CycElem cyc_scale(const CycElem& a, const mpq_class& r) {
  CycElem out = a;
  for (auto& x : out.c) x *= r;
  return out;
}

bool cyc_is_zero(const CycElem& a) {
  QPoly rem = qpoly_rem(a.c, cyclotomic_poly(a.D));
  return qpoly_is_zero(rem);
}

bool cyc_equal(const CycElem& a, const CycElem& b) { return cyc_is_zero(cyc_sub(a, b)); }

// ---- unit groups ----------------------------------------------------------------

u64 UnitGroup::index_of(u64 a) const {
  u64 idx = index_table[a % m];
  if (idx == ~u64(0)) throw usage_error("not a unit modulo m");
  return idx;
}

std::vector<u64> UnitGroup::dlog(u64 a) const {
  u64 idx = index_of(a);
  std::vector<u64> digits(factors.size());
  for (std::size_t k = 0; k < factors.size(); ++k) {
    digits[k] = idx % factors[k];
    idx /= factors[k];
  }
  return digits;
}

u64 UnitGroup::inv(u64 a) const { return invmod(a % m, m); }

UnitGroup unit_group(u64 m) {
  if (m == 0) throw usage_error("modulus must be positive");
  UnitGroup G;
  G.m = m;
  // factor m into prime powers and collect cyclic generators via CRT
  u64 rest = m;
  struct PP {
    u64 q, e, qe;
  };
  std::vector<PP> pps;
  for (u64 q = 2; q * q <= rest; ++q) {
    if (rest % q) continue;
    u64 e = 0, qe = 1;
    while (rest % q == 0) {
      rest /= q;
      ++e;
      qe *= q;
    }
    pps.push_back({q, e, qe});
  }
  if (rest > 1) pps.push_back({rest, 1, rest});

  auto crt_lift = [&](u64 val, u64 qe) {
    // unit congruent to val mod qe and 1 mod m/qe
    u64 other = m / qe;
    if (other == 1) return val % m;
    // x = val + qe * t with x = 1 mod other
    u64 t = mulmod(submod(1 % other, val % other, other), invmod(qe % other, other), other);
    return (val % m + mulmod(qe % m, t, m)) % m;
  };

  for (const auto& pp : pps) {
    if (pp.q == 2) {
      if (pp.e == 1) continue;  // trivial
      if (pp.e == 2) {
        G.factors.push_back(2);
        G.gens.push_back(crt_lift(3, 4));
      } else {
        G.factors.push_back(2);
        G.gens.push_back(crt_lift(pp.qe - 1, pp.qe));
        G.factors.push_back(pp.qe / 4);
        G.gens.push_back(crt_lift(3, pp.qe));
      }
    } else {
      u64 phi = pp.qe / pp.q * (pp.q - 1);
      u64 g = smallest_primitive_root(pp.qe);
      G.factors.push_back(phi);
      G.gens.push_back(crt_lift(g, pp.qe));
    }
  }
  G.order = 1;
  G.exponent = 1;
  for (u64 d : G.factors) {
    G.order *= d;
    G.exponent = std::lcm(G.exponent, d);
  }
  // enumerate units in mixed-radix order
  G.unit_list.assign(G.order, 1 % m);
  G.index_table.assign(m, ~u64(0));
  for (u64 idx = 0; idx < G.order; ++idx) {
    u64 v = 1 % m, rem_idx = idx;
    for (std::size_t k = 0; k < G.factors.size(); ++k) {
      u64 digit = rem_idx % G.factors[k];
      rem_idx /= G.factors[k];
      v = mulmod(v, powmod(G.gens[k], digit, m), m);
    }
    G.unit_list[idx] = v;
    G.index_table[v] = idx;
  }
  return G;
}

// ---- characters -------------------------------------------------------------------

u64 DirichletCharacter::exponent_at(u64 a) const {
  const UnitGroup& G = *units;
  auto digits = G.dlog(a);
  u64 e = 0;
  for (std::size_t k = 0; k < digits.size(); ++k) {
    u64 dk = G.factors[k];
    // chi(gen_k) = zeta_{d_k}^{t_k} = zeta_D^{t_k * D / d_k}
    e = (e + (G.exponent / dk) % G.exponent * ((twists[k] * digits[k]) % dk)) % G.exponent;
  }
  return e;
}

CycElem DirichletCharacter::value(u64 a) const {
  return CycElem::root_power(units->exponent, exponent_at(a));
}

bool DirichletCharacter::is_odd() const {
  if (units->m <= 2) return false;
  u64 e = exponent_at(units->m - 1);
  return e != 0;  // chi(-1) is +-1; nonzero exponent means -1
}

bool DirichletCharacter::is_trivial() const {
  for (u64 t : twists)
    if (t) return false;
  return true;
}

DirichletCharacter DirichletCharacter::conjugate() const {
  DirichletCharacter c = *this;
  for (std::size_t k = 0; k < twists.size(); ++k)
    c.twists[k] = twists[k] ? units->factors[k] - twists[k] : 0;
  return c;
}

u64 DirichletCharacter::conductor() const {
  const UnitGroup& G = *units;
  for (u64 f = 1; f <= G.m; ++f) {
    if (G.m % f) continue;
    bool ok = true;
    for (u64 a = 1; a < G.m && ok; ++a) {
      if (!G.is_unit(a) || a % f != 1 % f) continue;
      if (exponent_at(a) != 0) ok = false;
    }
    if (ok) return f;
  }
  return G.m;
}

CycElem DirichletCharacter::primitive_value(u64 b) const {
  const UnitGroup& G = *units;
  u64 f = conductor();
  if (f == 1) return CycElem::from_rational(G.exponent, 1);
  if (std::gcd(b % f, f) != 1) throw usage_error("argument not coprime to the conductor");
  // lift to a unit mod m congruent to b mod f
  u64 b0 = b % f;
  for (u64 x = b0 == 0 ? f : b0; x < b0 + G.m * 2; x += f) {
    u64 v = x % G.m;
    if (v && G.is_unit(v) && v % f == b0 % f) return value(v);
  }
  throw math_error("no unit lift found for primitive character value");
}

std::vector<DirichletCharacter> all_characters(const UnitGroup& units) {
  std::vector<DirichletCharacter> out;
  std::vector<u64> t(units.factors.size(), 0);
  while (true) {
    DirichletCharacter chi;
    chi.units = &units;
    chi.twists = t;
    u64 ord = 1;
    for (std::size_t k = 0; k < t.size(); ++k) {
      u64 dk = units.factors[k];
      u64 o = dk / std::gcd(dk, t[k] == 0 ? dk : t[k]);
      ord = std::lcm(ord, t[k] == 0 ? 1 : o);
    }
    chi.order = ord;
    out.push_back(chi);
    std::size_t k = 0;
    while (k < t.size()) {
      if (++t[k] < units.factors[k]) break;
      t[k] = 0;
      ++k;
    }
    if (k == t.size()) break;
  }
  return out;
}

CycElem bernoulli1(const DirichletCharacter& chi) {
  const UnitGroup& G = *chi.units;
  u64 f = chi.conductor();
  CycElem sum = CycElem::zero(G.exponent);
  for (u64 a = 1; a <= f; ++a) {
    if (std::gcd(a, f) != 1) continue;
    sum = cyc_add(sum, cyc_scale(chi.primitive_value(a), mpq_class(a)));
  }
  return cyc_scale(sum, mpq_class(1, static_cast<unsigned long>(f)));
}

}  // namespace esk
