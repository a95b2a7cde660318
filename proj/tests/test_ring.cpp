#include <random>

#include "doctest.h"
#include "eskit/ring.hpp"

using namespace esk;

namespace {
GRElem elem(const RingPtr& R, std::vector<u64> c) { return GRElem(R, std::move(c)); }

GRElem random_elem(const RingPtr& R, std::mt19937_64& rng) {
  GRElem e(R);
  for (auto& x : e.c) x = rng() % R->mod;
  return e;
}
}  // namespace

TEST_CASE("gr_mul: schoolbook convolution examples in Z/9[C3]") {
  auto R = make_ring(3, 2, {3});
  // (1+s)(1-s) = 1 - s^2
  GRElem a = elem(R, {1, 1, 0});
  GRElem b = elem(R, {1, 8, 0});
  CHECK(gr_mul(a, b) == elem(R, {1, 0, 8}));

  // identity element
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    GRElem x = random_elem(R, rng);
    CHECK(gr_mul(x, GRElem::one(R)) == x);
  }

  // the norm element absorbs group translates
  GRElem norm = elem(R, {1, 1, 1});
  CHECK(gr_mul(norm, GRElem::basis(R, 1)) == norm);
}

TEST_CASE("gr_mul: associative and commutative on random triples") {
  std::mt19937_64 rng(2024);
  for (auto factors : {std::vector<u64>{3}, std::vector<u64>{2, 4}, std::vector<u64>{9}}) {
    auto R = make_ring(3, 2, factors);
    for (int t = 0; t < 340; ++t) {
      GRElem a = random_elem(R, rng), b = random_elem(R, rng), c = random_elem(R, rng);
      CHECK(gr_mul(gr_mul(a, b), c) == gr_mul(a, gr_mul(b, c)));
      CHECK(gr_mul(a, b) == gr_mul(b, a));
    }
  }
}

TEST_CASE("involution: examples and ring-homomorphism property") {
  auto R = make_ring(3, 2, {3});
  CHECK(involution(GRElem::basis(R, 1)) == GRElem::basis(R, 2));
  CHECK(involution(elem(R, {1, 2, 0})) == elem(R, {1, 0, 2}));

  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    GRElem a = random_elem(R, rng), b = random_elem(R, rng);
    CHECK(involution(involution(a)) == a);
    CHECK(involution(gr_mul(a, b)) == gr_mul(involution(a), involution(b)));
    CHECK(involution(gr_add(a, b)) == gr_add(involution(a), involution(b)));
  }
}

TEST_CASE("idempotent: quadratic character on C2 inside Z/9[C2]") {
  auto R = make_ring(3, 2, {2});
  // delta = {1, c}, chi(c) = -1: e = 5 (1 - c)
  GRElem e = idempotent(R, {0, 1}, {1, 8});
  CHECK(e == elem(R, {5, 4}));
  CHECK(gr_mul(e, e) == e);
  // c * e = chi(c) e = -e
  CHECK(gr_mul(GRElem::basis(R, 1), e) == gr_neg(e));

  // trivial character: averaging idempotent
  GRElem e0 = idempotent(R, {0, 1}, {1, 1});
  GRElem avg(R);
  u64 half = invmod(2, 9);
  avg.c = {half, half};
  CHECK(e0 == avg);
  CHECK(gr_mul(e0, e0) == e0);

  // orthogonality of distinct characters
  CHECK(gr_mul(e, e0).is_zero());
}

TEST_CASE("idempotent: |delta| must be invertible") {
  auto R = make_ring(3, 2, {3});
  CHECK_THROWS_AS(idempotent(R, {0, 1, 2}, {1, 1, 1}), math_error);
}

TEST_CASE("idempotent: e^2 = e for all characters of C4 over Z/25") {
  auto R = make_ring(5, 2, {4});
  u64 i = teichmuller(5, 2, 2);  // 7: a 4th root of unity mod 25
  REQUIRE(powmod(i, 2, 25) == 24);
  std::vector<u64> delta{0, 1, 2, 3};
  for (u64 k = 0; k < 4; ++k) {
    std::vector<u64> vals{1, powmod(i, k, 25), powmod(i, 2 * k, 25), powmod(i, 3 * k, 25)};
    GRElem e = idempotent(R, delta, vals);
    CHECK(gr_mul(e, e) == e);
    // sigma e = chi(sigma) e
    CHECK(gr_mul(GRElem::basis(R, 1), e) == gr_scale(e, vals[1]));
  }
}

TEST_CASE("teichmuller: pinned values and defining properties") {
  CHECK(teichmuller(3, 2, 2) == 8);
  CHECK(teichmuller(3, 2, 1) == 1);
  CHECK(teichmuller(5, 2, 4) == 24);
  CHECK_THROWS_AS(teichmuller(3, 2, 3), math_error);

  // frozen independent oracle: over Z/9 and Z/27, enumerate roots of
  // x^{p-1} = 1 and check teichmuller picks the one congruent to a mod p
  for (unsigned n = 1; n <= 3; ++n) {
    u64 mod = ipow(3, n);
    for (u64 a = 1; a < 3; ++a) {
      u64 t = teichmuller(3, n, a);
      CHECK(powmod(t, 2, mod) == 1 % mod);
      CHECK(t % 3 == a);
    }
  }
  for (u64 a = 1; a < 7; ++a) {
    u64 t = teichmuller(7, 3, a);
    CHECK(powmod(t, 6, 343) == 1);
    CHECK(t % 7 == a);
  }
}

TEST_CASE("character spec validation") {
  CharacterSpec chi;
  chi.modulus = 7;
  chi.p = 3;
  chi.n = 2;
  chi.order = 2;
  chi.odd = false;
  // quadratic residues mod 7: 1,2,4
  chi.values = {{1, 1}, {2, 1}, {3, 8}, {4, 1}, {5, 8}, {6, 8}};
  CHECK_THROWS_AS(chi.validate(), math_error);  // chi(-1) = chi(6) = -1, so odd
  chi.odd = true;
  CHECK_NOTHROW(chi.validate());
  CHECK(chi(2) == 1);
  CHECK(chi(5) == 8);

  // breaking multiplicativity is caught
  chi.values[2] = 8;
  CHECK_THROWS_AS(chi.validate(), math_error);
}

TEST_CASE("ring descriptor: locality predicate and enumeration order") {
  CHECK(make_ring(3, 2, {3})->is_local());
  CHECK(make_ring(3, 2, {3, 9})->is_local());
  CHECK(!make_ring(3, 2, {2})->is_local());
  CHECK_THROWS_AS(make_ring(2, 2, {3}), usage_error);
  CHECK_THROWS_AS(make_ring(9, 1, {3}), usage_error);

  Group G({2, 3});
  CHECK(G.order == 6);
  CHECK(G.mul(1, 1) == 0);          // (1,0)+(1,0) = (0,0)
  CHECK(G.mul(2, 2) == 4);          // (0,1)+(0,1) = (0,2)
  CHECK(G.inv(3) == G.encode({1, 2}));
  CHECK(G.encode(G.decode(5)) == 5);
}
