#include "eskit/ideals.hpp"

namespace esk {

IdealHandle ideal_from_lattice(const RingPtr& ring, const Mat& lattice) {
  // close under the group action, then canonicalize
  const auto& G = ring->group;
  Mat L(0, G.order, ring->p, ring->n);
  for (std::size_t i = 0; i < lattice.rows; ++i) {
    GRElem e(ring, lattice.row(i));
    for (u64 g = 0; g < G.order; ++g) L.append_row(gr_translate(e, g).c);
  }
  return IdealHandle{ring, howell_form(L)};
}

IdealHandle ideal_from_generators(const RingPtr& ring, const std::vector<GRElem>& gens) {
  Mat L(0, ring->dim(), ring->p, ring->n);
  for (const auto& g : gens) {
    if (!(*g.ring == *ring)) throw usage_error("ideal generator from wrong ring");
    L.append_row(g.c);
  }
  return ideal_from_lattice(ring, L);
}

IdealHandle zero_ideal(const RingPtr& ring) {
  return IdealHandle{ring, Mat(0, ring->dim(), ring->p, ring->n)};
}

IdealHandle unit_ideal(const RingPtr& ring) {
  return ideal_from_generators(ring, {GRElem::one(ring)});
}

IdealHandle principal_ideal(const GRElem& a) { return ideal_from_generators(a.ring, {a}); }

bool ideal_contains(const IdealHandle& I, const GRElem& a) { return in_span(a.c, I.basis); }

bool ideal_subset(const IdealHandle& a, const IdealHandle& b) {
  for (std::size_t i = 0; i < a.basis.rows; ++i)
    if (!in_span(a.basis.row(i), b.basis)) return false;
  return true;
}

IdealRel ideal_compare(const IdealHandle& a, const IdealHandle& b) {
  if (!(*a.ring == *b.ring)) throw usage_error("ideal_compare: ring mismatch");
  bool ab = ideal_subset(a, b), ba = ideal_subset(b, a);
  if (ab && ba) return IdealRel::equal;
  if (ab) return IdealRel::a_in_b;
  if (ba) return IdealRel::b_in_a;
  return IdealRel::incomparable;
}

IdealHandle ideal_sum(const IdealHandle& a, const IdealHandle& b) {
  if (!(*a.ring == *b.ring)) throw usage_error("ideal_sum: ring mismatch");
  if (a.basis.rows == 0) return b;
  if (b.basis.rows == 0) return a;
  return IdealHandle{a.ring, lattice_sum(a.basis, b.basis)};
}

IdealHandle ideal_intersect(const IdealHandle& a, const IdealHandle& b) {
  if (!(*a.ring == *b.ring)) throw usage_error("ideal_intersect: ring mismatch");
  return IdealHandle{a.ring, lattice_intersect(a.basis, b.basis)};
}

IdealHandle ideal_product(const IdealHandle& a, const IdealHandle& b) {
  if (!(*a.ring == *b.ring)) throw usage_error("ideal_product: ring mismatch");
  std::vector<GRElem> gens;
  for (std::size_t i = 0; i < a.basis.rows; ++i)
    for (std::size_t j = 0; j < b.basis.rows; ++j)
      gens.push_back(gr_mul(GRElem(a.ring, a.basis.row(i)), GRElem(b.ring, b.basis.row(j))));
  if (gens.empty()) return zero_ideal(a.ring);
  return ideal_from_generators(a.ring, gens);
}

}  // namespace esk
