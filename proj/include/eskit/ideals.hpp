#pragma once

#include "eskit/ring.hpp"

// Ideals of (Z/p^n)[G], canonicalized as Howell bases of the underlying
// Z/p^n-lattice after closing the generating set under multiplication by the
// group.  Equal ideals have bit-identical bases.

namespace esk {

struct IdealHandle {
  RingPtr ring;
  Mat basis;  // Howell form, rows of length |G|, G-closed span

  bool is_zero() const { return basis.rows == 0; }
  bool operator==(const IdealHandle& o) const { return *ring == *o.ring && basis == o.basis; }
};

IdealHandle ideal_from_generators(const RingPtr& ring, const std::vector<GRElem>& gens);
IdealHandle ideal_from_lattice(const RingPtr& ring, const Mat& lattice);  // closes and reduces
IdealHandle zero_ideal(const RingPtr& ring);
IdealHandle unit_ideal(const RingPtr& ring);
IdealHandle principal_ideal(const GRElem& a);

bool ideal_contains(const IdealHandle& I, const GRElem& a);
bool ideal_subset(const IdealHandle& a, const IdealHandle& b);

enum class IdealRel { equal, a_in_b, b_in_a, incomparable };
IdealRel ideal_compare(const IdealHandle& a, const IdealHandle& b);

IdealHandle ideal_sum(const IdealHandle& a, const IdealHandle& b);
IdealHandle ideal_intersect(const IdealHandle& a, const IdealHandle& b);
IdealHandle ideal_product(const IdealHandle& a, const IdealHandle& b);

}  // namespace esk
