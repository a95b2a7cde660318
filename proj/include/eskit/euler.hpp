#pragma once

#include <string>

#include "eskit/ideals.hpp"
#include "eskit/stickelberger.hpp"

// Kolyvagin derivatives of Euler-system windows: derivative operators D_q,
// Galois-fixed derived classes kappa_n over the base ring (Z/p^n)[Gamma_n],
// the leading-coefficient congruence, permutation-modified classes
// kappa-tilde, and the derived ideals Theta^i.

namespace esk {

// An auxiliary prime q = 1 mod p together with the chosen generator sigma_q
// of G_q.  sigma_gen is the exponent e with sigma_q = g^e for the canonical
// generator g of the cyclic factor (the image of the smallest primitive root
// mod q); it must be coprime to p.
struct PrimeLabel {
  std::string name;
  u64 q = 0;
  u64 gq_order = 1;   // p^{v_p(q-1)}
  u64 sigma_gen = 1;  // exponent of the chosen generator, coprime to p
};

PrimeLabel make_prime_label(u64 q, u64 p, std::string name = "");

// A prime is admissible for (chi, p, n) when its Frobenius is trivial on the
// n-th layer, on the character field, and on Q(mu_{p^n}): q = 1 mod p^n,
// chi(q) = 1, and the Gamma_n-digit of q vanishes.
bool admissible_prime(const CharacterSpec& chi, u64 q, u64 p, unsigned n);

// D_q = sum_{i=0}^{#G_q - 1} i sigma_q^i inside the level ring (zero when
// G_q is trivial).  The label's q must be one of the level's auxiliary
// primes unless gq_order == 1.
GRElem derivative_operator(const LevelRing& level, const PrimeLabel& lab);

// D_n = prod_{q | n} D_q; labs must match the level's auxiliary primes.
GRElem derivative_product(const LevelRing& level, const std::vector<PrimeLabel>& labs);

// N_q = sum of all elements of G_q inside the level ring.
GRElem norm_operator(const LevelRing& level, const PrimeLabel& lab);

// The derived class kappa_n = (slice of D_n c_n at the trivial G(n)
// component) in (Z/p^n)[Gamma_n]; nn lists the primes dividing n as labels
// drawn from pool.  Throws usage_error if a label is inadmissible or the
// level is missing from the window, and math_error if D_n c_n fails to be
// fixed by G(n).
GRElem kolyvagin_class(const EulerSystemWindow& w, const std::vector<PrimeLabel>& pool,
                       const std::vector<u64>& nn);

// Checks c_n = (-1)^{nu(n)} kappa_n prod_{q | n} (sigma_q - 1) modulo
// I_n^{nu(n)+1}, where I_n is the augmentation ideal of G(n).
bool leading_coeff_check(const EulerSystemWindow& w, const std::vector<PrimeLabel>& pool,
                         const std::vector<u64>& nn);

// The class of x in I_q/I_q^2 with respect to the basis sigma_q - 1, where
// qi indexes the auxiliary prime inside the level ring.
u64 augmentation_class(const LevelRing& level, const GRElem& x, std::size_t qi,
                       const PrimeLabel& lab);

// kappa-tilde_n = sum over permutations tau of the primes of n of
// sgn(tau) (prod_{tau(q) != q} a_{tau,q}) kappa_{d_tau}, d_tau the product
// of the fixed primes and a_{tau,q} the class of P_{tau(q)}(Frob^{-1}) in
// I_q/I_q^2.
GRElem tilde_kappa(const EulerSystemWindow& w, const std::vector<PrimeLabel>& pool,
                   const std::vector<u64>& nn);

// Theta^i = ideal of (Z/p^n)[Gamma_n] generated by the kappa_n with
// nu(n) <= i over subsets of the pool.
IdealHandle theta_ideal(const EulerSystemWindow& w, const std::vector<PrimeLabel>& pool,
                        unsigned i);

}  // namespace esk
