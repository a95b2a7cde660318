#pragma once

#include <memory>

#include "eskit/dirichlet.hpp"
#include "eskit/modules.hpp"
#include "eskit/ring.hpp"

// The concrete rank-0 Euler system over Q: partial zeta values at s = 0,
// Stickelberger elements with exact rational coefficients, eigenspace/flat
// projections to (Z/p^n)-group rings, the cyclotomic twist, modified p-adic
// L-elements at finite level, and Euler-system windows with their norm
// relations.

namespace esk {

// ---- cyclotomic levels -------------------------------------------------------

// The m-th cyclotomic level: group ring coefficients are indexed by the unit
// group of Z/m with the sigma_a labeling.
struct CyclotomicLevel {
  u64 m = 1;
  UnitGroup units;

  // (Z/p^n)[(Z/m)^*] using the unit group's cyclic decomposition
  RingPtr ring(u64 p, unsigned n) const { return make_ring(p, n, units.factors); }
};

using LevelPtr = std::shared_ptr<const CyclotomicLevel>;
LevelPtr make_level(u64 m);

// ---- Stickelberger elements ----------------------------------------------------

// An element of Q[(Z/m)^*]; poly[g] is the coefficient of sigma_{unit_of(g)}.
struct StickelbergerElement {
  LevelPtr level;
  std::vector<mpq_class> poly;

  // coefficient of sigma_a^{-1} (the key used in reports)
  const mpq_class& coeff_key(u64 a) const;
};

// zeta_{m,S}(0, sigma_a) = 1/2 - <a/m>, S = {infinity} and the primes dividing m
mpq_class partial_zeta_zero(u64 m, u64 a);

// theta_m multiplied by prod_{q in extra}(1 - Frob_q^{-1})
StickelbergerElement stickelberger_element(u64 m, const std::vector<u64>& extra_primes);

// level projection sigma_a -> sigma_{a mod m'} for m' | m
StickelbergerElement project_stickelberger(const StickelbergerElement& theta, u64 m_small);

// evaluation sigma_b -> psi(b); psi a character of (Z/m)^*
CycElem evaluate_character(const StickelbergerElement& theta, const DirichletCharacter& psi);

// ---- flat projection and twist ---------------------------------------------------

// Projection to the c = -1 eigenspace with the omega-eigencomponent removed,
// reduced mod p^n.  Requires p | m; throws math_error if the result is not
// p-integral.
GRElem flat_projection(const StickelbergerElement& theta, u64 p, unsigned n);

// linear extension of sigma_a -> (a mod p^n) sigma_a^{-1}; requires p^n | m
GRElem twist(const CyclotomicLevel& level, const GRElem& x);

// push x at the big level to the small level (sigma_a -> sigma_{a mod m'})
GRElem project_group_ring(const CyclotomicLevel& big, const CyclotomicLevel& small,
                          const GRElem& x);

// ---- finite-level L-elements ------------------------------------------------------

// The coefficient ring (Z/p^n)[Gamma_n x prod_q G_q] for the composite of the
// fields k(q) (maximal p-subextension inside Q(mu_q)) over the n-th cyclotomic
// layer; factor 0 is Gamma_n of order p^n, factor 1+i is G_{q_i}.
struct LevelRing {
  u64 p = 3;
  unsigned n = 1;
  std::vector<u64> qs;         // ramified prime labels, sorted
  std::vector<u64> gq_orders;  // p^{v_p(q-1)} per q
  RingPtr ring;

  // group index of the Frobenius at ell (coprime to p and to all q except
  // possibly its own label, where the component is trivial)
  u64 frobenius(u64 ell) const;
};

LevelRing level_ring(u64 p, unsigned n, std::vector<u64> qs);

// digit of the Frobenius at a in Gamma_n (the 1+p part of (Z/p^{n+1})^*)
u64 gamma_digit(u64 p, unsigned n, u64 a);

// projection between level rings (drop the G_q factors not present downstairs)
RingProjection level_projection(const LevelRing& big, const LevelRing& small);

// P_q(x) = 1 - chi(q)^{-1} q x over Z/p^n
struct FrobeniusPolynomial {
  u64 q = 0;
  u64 c0 = 1, c1 = 0;  // P(x) = c0 + c1 x

  GRElem at_frobenius_inverse(const LevelRing& level) const;
};

FrobeniusPolynomial frobenius_polynomial(const CharacterSpec& chi, u64 q, u64 p, unsigned n);

// u_q = chi(q)^{-1} chi_cyc(Frob_q) Frob_q^{-1} at the given level
GRElem u_factor(const CharacterSpec& chi, u64 q, const LevelRing& level);

// The finite-level truncation of the modified p-adic L-element for the field
// ramified exactly at the given primes, as an element of the level ring.
GRElem modified_p_adic_L(const LevelRing& level, const CharacterSpec& chi);

// ---- Euler-system windows -----------------------------------------------------------

struct EulerSystemWindow {
  u64 p = 3;
  unsigned n = 1;
  CharacterSpec chi;
  std::vector<LevelRing> levels;
  std::vector<GRElem> values;  // one per level
};

struct WindowFailure {
  std::size_t upper = 0, lower = 0;  // level indices of the covering pair
  GRElem lhs, rhs;                   // projected value vs Euler-factor product
};

struct WindowReport {
  bool valid = true;
  std::vector<WindowFailure> failures;
};

// window of L-elements over all subsets of the given prime pool
EulerSystemWindow l_element_window(const CharacterSpec& chi, u64 p, unsigned n,
                                   const std::vector<u64>& pool);

// checks the norm relation on every covering pair of levels
WindowReport euler_window_validate(const EulerSystemWindow& w);

}  // namespace esk
