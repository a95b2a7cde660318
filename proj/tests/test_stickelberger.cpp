#include <numeric>
#include <random>

#include "doctest.h"
#include "eskit/stickelberger.hpp"

using namespace esk;

namespace {

CharacterSpec quadratic_mod5(u64 p, unsigned n) {
  u64 pn = ipow(p, n);
  CharacterSpec chi;
  chi.modulus = 5;
  chi.values = {{1, 1}, {2, pn - 1}, {3, pn - 1}, {4, 1}};
  chi.order = 2;
  chi.odd = false;
  chi.p = p;
  chi.n = n;
  return chi;
}

// e_omega at the given (p,n)-level: average the Teichmueller character over
// the units of prime-to-p multiplicative order
GRElem omega_idempotent(const CyclotomicLevel& lvl, u64 p, unsigned n) {
  auto ring = lvl.ring(p, n);
  u64 phi = lvl.units.order;
  u64 prime_to_p = phi;
  while (prime_to_p % p == 0) prime_to_p /= p;
  std::vector<u64> delta, vals;
  for (u64 g = 0; g < lvl.units.order; ++g) {
    u64 u = lvl.units.unit_of(g);
    if (powmod(u, prime_to_p, lvl.m) != 1 % lvl.m) continue;
    delta.push_back(g);
    vals.push_back(teichmuller(p, n, u % p));
  }
  return idempotent(ring, delta, vals);
}

}  // namespace

TEST_CASE("partial zeta values at zero") {
  CHECK(partial_zeta_zero(5, 1) == mpq_class(3, 10));
  CHECK(partial_zeta_zero(5, 4) == mpq_class(-3, 10));
  for (u64 m : {5, 7, 12, 21}) {
    for (u64 a = 1; a < m; ++a) {
      if (std::gcd(a, m) != 1) continue;
      CHECK(partial_zeta_zero(m, a) + partial_zeta_zero(m, m - a) == 0);
    }
  }
  CHECK_THROWS_AS(partial_zeta_zero(6, 2), usage_error);
  CHECK_THROWS_AS(partial_zeta_zero(1, 1), usage_error);
}

TEST_CASE("Stickelberger element at level five") {
  StickelbergerElement theta = stickelberger_element(5, {});
  CHECK(theta.coeff_key(1) == mpq_class(3, 10));
  CHECK(theta.coeff_key(2) == mpq_class(1, 10));
  CHECK(theta.coeff_key(3) == mpq_class(-1, 10));
  CHECK(theta.coeff_key(4) == mpq_class(-3, 10));
  for (const auto& c : theta.poly) {
    mpq_class scaled = c * 10;
    CHECK(scaled.get_den() == 1);  // denominators divide 2m
  }
  CHECK_THROWS_AS(stickelberger_element(10, {5}), usage_error);
}

TEST_CASE("quadratic character evaluation of theta_7") {
  StickelbergerElement theta = stickelberger_element(7, {});
  UnitGroup U = unit_group(7);
  DirichletCharacter chi;
  chi.units = &U;
  chi.twists = {3};  // order-two character of the cyclic unit group
  chi.order = 2;
  REQUIRE(chi.is_odd());
  CycElem v = evaluate_character(theta, chi);
  CHECK(cyc_equal(v, CycElem::from_rational(U.exponent, 1)));
}

TEST_CASE("theta evaluations match the Bernoulli oracle") {
  for (u64 m : {5, 7, 9, 11, 12, 13, 15, 16, 20, 21, 25, 27, 28, 33, 35, 36, 39, 40}) {
    StickelbergerElement theta = stickelberger_element(m, {});
    UnitGroup U = unit_group(m);
    auto chars = all_characters(U);
    for (const auto& psi : chars) {
      if (!psi.is_odd()) continue;
      DirichletCharacter bar = psi.conjugate();
      CycElem lhs = evaluate_character(theta, psi);
      CycElem rhs = cyc_scale(bernoulli1(bar), mpq_class(-1));
      u64 f = bar.conductor();
      for (u64 q = 2; q <= m; ++q) {
        if (!is_prime(q) || m % q != 0 || f % q == 0) continue;
        CycElem factor = cyc_sub(CycElem::from_rational(U.exponent, 1), bar.primitive_value(q));
        rhs = cyc_mul(rhs, factor);
      }
      CHECK(cyc_equal(lhs, rhs));
    }
  }
}

TEST_CASE("norm relation between Stickelberger levels") {
  for (u64 m = 2; m <= 30; ++m) {
    for (u64 q : {2, 3, 5, 7, 11, 13}) {
      if (m % q == 0) continue;
      StickelbergerElement projected =
          project_stickelberger(stickelberger_element(m * q, {}), m);
      StickelbergerElement direct = stickelberger_element(m, {q});
      REQUIRE(projected.poly.size() == direct.poly.size());
      for (std::size_t g = 0; g < direct.poly.size(); ++g)
        CHECK(projected.poly[g] == direct.poly[g]);
    }
  }
}

TEST_CASE("flat projection kills even elements") {
  auto lvl = make_level(9);
  StickelbergerElement even;
  even.level = lvl;
  even.poly.assign(lvl->units.order, mpq_class(1, 2));  // constant, so c-invariant
  GRElem out = flat_projection(even, 3, 2);
  CHECK(out.is_zero());

  StickelbergerElement pair;
  pair.level = lvl;
  pair.poly.assign(lvl->units.order, mpq_class(0));
  pair.poly[lvl->units.index_of(2)] = mpq_class(5, 3);
  pair.poly[lvl->units.index_of(7)] = mpq_class(5, 3);  // sigma_2 + sigma_{-2}
  CHECK(flat_projection(pair, 3, 2).is_zero());
}

TEST_CASE("flat projection of theta_21 mod 9") {
  StickelbergerElement theta = stickelberger_element(21, {});
  GRElem flat = flat_projection(theta, 3, 2);
  auto lvl = theta.level;

  // odd quadratic character of conductor 7, evaluated mod 9:
  // value is -B_{1,psi} (1 - psi(3)) = 1 * 2 = 2
  u64 sum = 0;
  for (u64 g = 0; g < lvl->units.order; ++g) {
    u64 a = lvl->units.unit_of(g) % 7;
    u64 v = (a == 1 || a == 2 || a == 4) ? 1 : 8;
    sum = addmod(sum, mulmod(v, flat.c[g], 9), 9);
  }
  CHECK(sum == 2);

  // the omega component is gone, and the minus projection is a fixed point
  GRElem e_omega = omega_idempotent(*lvl, 3, 2);
  CHECK(gr_mul(e_omega, flat).is_zero());
  GRElem conj_flat = gr_translate(flat, lvl->units.index_of(20));
  CHECK(conj_flat == gr_neg(flat));
}

TEST_CASE("flat projection integrality sweep") {
  for (u64 p : {3, 5}) {
    for (u64 f : {1, 2, 4, 5, 7, 8, 11, 13, 14, 16}) {
      if (f % p == 0) continue;
      StickelbergerElement theta = stickelberger_element(p * f, {});
      CHECK_NOTHROW(flat_projection(theta, p, 2));
    }
    for (u64 f : {1, 5, 7}) {
      if (f % p == 0) continue;
      StickelbergerElement theta = stickelberger_element(p * p * f, {});
      CHECK_NOTHROW(flat_projection(theta, p, 2));
    }
  }
}

TEST_CASE("twist basics and involutivity") {
  auto lvl = make_level(45);
  auto ring = lvl->ring(3, 2);

  GRElem one = GRElem::one(ring);
  CHECK(twist(*lvl, one) == one);

  GRElem sig2 = GRElem::basis(ring, lvl->units.index_of(2));
  GRElem t = twist(*lvl, sig2);
  GRElem expect(ring);
  expect.c[lvl->units.index_of(23)] = 2;  // 2 * sigma_2^{-1}, 2^{-1} = 23 mod 45
  CHECK(t == expect);

  std::mt19937_64 rng(7);
  GRElem x(ring);
  for (auto& c : x.c) c = rng() % 9;
  CHECK(twist(*lvl, twist(*lvl, x)) == x);
}

TEST_CASE("twist commutes with level projection") {
  auto big = make_level(315), small = make_level(45);
  auto ring = big->ring(3, 2);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    GRElem x(ring);
    for (auto& c : x.c) c = rng() % 9;
    GRElem a = project_group_ring(*big, *small, twist(*big, x));
    GRElem b = twist(*small, project_group_ring(*big, *small, x));
    CHECK(a == b);
  }
}

TEST_CASE("Frobenius polynomial and u-factor identities") {
  CharacterSpec chi = quadratic_mod5(3, 2);
  LevelRing lvl = level_ring(3, 2, {7});
  GRElem one = GRElem::one(lvl.ring);

  GRElem u = u_factor(chi, 7, lvl);
  GRElem P = frobenius_polynomial(chi, 7, 3, 2).at_frobenius_inverse(lvl);
  CHECK(P == gr_sub(one, u));

  // u_q is a unit; 1 - u_q = -u_q (1 - u_q^{-1})
  u64 fr = lvl.frobenius(7);
  u64 scalar = mulmod(invmod(chi(2), 9), 7 % 9, 9);
  GRElem uinv(lvl.ring);
  uinv.c[fr] = invmod(scalar, 9);
  CHECK(gr_mul(u, uinv) == one);
  CHECK(gr_sub(one, u) == gr_neg(gr_mul(u, gr_sub(one, uinv))));
}

TEST_CASE("modified L-element at the base level matches the Bernoulli oracle") {
  CharacterSpec chi = quadratic_mod5(3, 1);
  LevelRing base = level_ring(3, 1, {});
  GRElem L = modified_p_adic_L(base, chi);
  // augmentation = -B_{1,psi} for the odd quadratic character mod 15 (= -(-2))
  u64 aug = 0;
  for (u64 c : L.c) aug = addmod(aug, c, 3);
  CHECK(aug == 2);
}

TEST_CASE("modified L-element hypothesis violations are reported") {
  LevelRing base = level_ring(3, 1, {});
  CharacterSpec odd_chi = quadratic_mod5(3, 1);
  odd_chi.values = {{1, 1}, {2, 2}, {3, 1}, {4, 2}};  // odd quadratic mod 5
  odd_chi.odd = true;
  CHECK_THROWS_AS(modified_p_adic_L(base, odd_chi), math_error);

  CharacterSpec trivial;
  trivial.modulus = 5;
  trivial.values = {{1, 1}, {2, 1}, {3, 1}, {4, 1}};
  trivial.order = 1;
  trivial.odd = false;
  trivial.p = 3;
  trivial.n = 1;
  CHECK_THROWS_AS(modified_p_adic_L(base, trivial), math_error);
}

TEST_CASE("Euler-system window norm relations") {
  for (unsigned n : {1u, 2u}) {
    CharacterSpec chi = quadratic_mod5(3, n);
    EulerSystemWindow w = l_element_window(chi, 3, n, {7});
    REQUIRE(w.levels.size() == 2);
    WindowReport rep = euler_window_validate(w);
    CHECK(rep.valid);
    CHECK(rep.failures.empty());

    // deliberate corruption is detected and localized
    w.values[1].c[0] = addmod(w.values[1].c[0], 1, w.values[1].ring->mod);
    WindowReport bad = euler_window_validate(w);
    CHECK(!bad.valid);
    REQUIRE(bad.failures.size() == 1);
    CHECK(bad.failures[0].upper == 1);
    CHECK(bad.failures[0].lower == 0);
  }
}

TEST_CASE("two-prime Euler-system window") {
  CharacterSpec chi = quadratic_mod5(3, 1);
  EulerSystemWindow w = l_element_window(chi, 3, 1, {7, 13});
  REQUIRE(w.levels.size() == 4);
  WindowReport rep = euler_window_validate(w);
  CHECK(rep.valid);
}
