#pragma once

#include <gmpxx.h>

#include <vector>

#include "eskit/base.hpp"

// Unit groups (Z/m)^* with explicit cyclic decompositions and discrete logs,
// Dirichlet characters with exact cyclotomic values, and first generalized
// Bernoulli numbers.  Cyclotomic values live in Q[x]/(x^D - 1) for the group
// exponent D; exact equality in Q(zeta_D) is decided by reduction modulo the
// D-th cyclotomic polynomial.

namespace esk {

// ---- exact cyclotomic arithmetic -------------------------------------------

// dense rational polynomial, coefficient i = coefficient of x^i
using QPoly = std::vector<mpq_class>;

QPoly qpoly_zero(std::size_t deg_bound);
QPoly qpoly_const(const mpq_class& c);
QPoly qpoly_monomial(const mpq_class& c, std::size_t k);
QPoly qpoly_add(const QPoly& a, const QPoly& b);
QPoly qpoly_sub(const QPoly& a, const QPoly& b);
QPoly qpoly_mul(const QPoly& a, const QPoly& b);
QPoly qpoly_scale(const QPoly& a, const mpq_class& c);
bool qpoly_is_zero(const QPoly& a);
// remainder of a modulo b (b monic up to a leading rational coefficient)
QPoly qpoly_rem(QPoly a, const QPoly& b);
// the d-th cyclotomic polynomial, exact integer coefficients
QPoly cyclotomic_poly(u64 d);

// An element of Q(zeta_D) represented in Q[x]/(x^D - 1); multiplication is
// cyclic convolution.  Equality tests reduce mod Phi_D.
struct CycElem {
  u64 D = 1;
  QPoly c;  // size D

  static CycElem zero(u64 D);
  static CycElem from_rational(u64 D, const mpq_class& r);
  static CycElem root_power(u64 D, u64 k);  // zeta_D^k
};

CycElem cyc_add(const CycElem& a, const CycElem& b);
CycElem cyc_sub(const CycElem& a, const CycElem& b);
CycElem cyc_mul(const CycElem& a, const CycElem& b);
CycElem cyc_scale(const CycElem& a, const mpq_class& r);
bool cyc_equal(const CycElem& a, const CycElem& b);
bool cyc_is_zero(const CycElem& a);

// ---- unit groups -------------------------------------------------------------

struct UnitGroup {
  u64 m = 1;
  std::vector<u64> factors;  // cyclic factor orders d_1, ..., d_k
  std::vector<u64> gens;     // unit generating the corresponding factor
  u64 order = 1;             // phi(m)
  u64 exponent = 1;          // lcm of the factor orders
  std::vector<u64> unit_list;   // units in index order (mixed radix over factors)
  std::vector<u64> index_table; // size m; index of each unit, or ~0 for non-units

  bool is_unit(u64 a) const { return index_table[a % m] != ~u64(0); }
  u64 index_of(u64 a) const;            // throws usage_error on non-units
  u64 unit_of(u64 idx) const { return unit_list.at(idx); }
  std::vector<u64> dlog(u64 a) const;   // mixed-radix digits of index_of(a)
  u64 inv(u64 a) const;                 // inverse unit mod m
};

UnitGroup unit_group(u64 m);

// ---- Dirichlet characters -----------------------------------------------------

// A character of (Z/m)^* with values in mu_D, D = group exponent; the value at
// a unit a is zeta_D^{exponent_at(a)}.
struct DirichletCharacter {
  const UnitGroup* units = nullptr;
  std::vector<u64> twists;  // t_k in Z/d_k: chi(gen_k) = zeta_{d_k}^{t_k}
  u64 order = 1;

  u64 exponent_at(u64 a) const;          // in Z/D
  CycElem value(u64 a) const;            // zeta_D^{exponent_at(a)}
  bool is_odd() const;                   // chi(-1) == -1
  bool is_trivial() const;
  DirichletCharacter conjugate() const;  // chi bar
  u64 conductor() const;
  // value of the primitive character inducing chi, at b coprime to the
  // conductor (b need not be coprime to m)
  CycElem primitive_value(u64 b) const;
};

// all characters of (Z/m)^*
std::vector<DirichletCharacter> all_characters(const UnitGroup& units);

// first generalized Bernoulli number B_{1,chi} = (1/f) sum_{a mod f} a chi0(a),
// chi0 the primitive character inducing chi
CycElem bernoulli1(const DirichletCharacter& chi);

}  // namespace esk
