#include "doctest.h"
#include "eskit/ideals.hpp"

using namespace esk;

namespace {
GRElem elem(const RingPtr& R, std::vector<u64> c) { return GRElem(R, std::move(c)); }
}

TEST_CASE("ideal comparison: (1-s) and (3) are incomparable in Z/9[C3]") {
  auto R = make_ring(3, 2, {3});
  IdealHandle aug = principal_ideal(elem(R, {1, 8, 0}));  // 1 - s
  IdealHandle three = principal_ideal(GRElem::scalar(R, 3));
  CHECK(ideal_compare(aug, three) == IdealRel::incomparable);
  CHECK(ideal_compare(aug, aug) == IdealRel::equal);
  CHECK(ideal_compare(three, unit_ideal(R)) == IdealRel::a_in_b);
  CHECK(ideal_compare(unit_ideal(R), three) == IdealRel::b_in_a);
  CHECK(ideal_compare(zero_ideal(R), three) == IdealRel::a_in_b);
}

TEST_CASE("ideal canonical form: different generating sets give identical bases") {
  auto R = make_ring(3, 2, {3});
  GRElem three = GRElem::scalar(R, 3);
  IdealHandle a = principal_ideal(three);
  IdealHandle b = ideal_from_generators(R, {three, gr_mul(three, GRElem::basis(R, 1)),
                                            gr_scale(three, 2)});
  CHECK(a == b);
  CHECK(a.basis == howell_form(a.basis));
}

TEST_CASE("ideal arithmetic: sum, intersection, product") {
  auto R = make_ring(3, 2, {3});
  GRElem x = GRElem::scalar(R, 3);
  GRElem y = elem(R, {1, 8, 0});  // 1 - s
  IdealHandle I = principal_ideal(x), J = principal_ideal(y);

  CHECK(ideal_sum(I, zero_ideal(R)) == I);
  CHECK(ideal_sum(I, unit_ideal(R)) == unit_ideal(R));
  CHECK(ideal_product(I, unit_ideal(R)) == I);
  CHECK(ideal_product(I, I) == zero_ideal(R));  // (3)(3) = (9) = 0 in Z/9

  // product (3)(1-s) = (3 - 3s)
  CHECK(ideal_product(I, J) == principal_ideal(gr_mul(x, y)));

  // containments: I J inside I cap J inside both inside I + J
  IdealHandle prod = ideal_product(I, J), meet = ideal_intersect(I, J), join = ideal_sum(I, J);
  CHECK(ideal_subset(prod, meet));
  CHECK(ideal_subset(meet, I));
  CHECK(ideal_subset(meet, J));
  CHECK(ideal_subset(I, join));
  CHECK(ideal_subset(J, join));
}

TEST_CASE("ideal membership") {
  auto R = make_ring(3, 2, {3});
  IdealHandle aug = principal_ideal(elem(R, {1, 8, 0}));
  // the augmentation ideal contains s - s^2 and 3 - 3s but not 3
  CHECK(ideal_contains(aug, elem(R, {0, 1, 8})));
  CHECK(ideal_contains(aug, elem(R, {3, 6, 0})));
  CHECK(!ideal_contains(aug, GRElem::scalar(R, 3)));
}
