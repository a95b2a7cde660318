#pragma once

#include <optional>
#include <string>

#include "eskit/euler.hpp"
#include "eskit/ideals.hpp"
#include "eskit/modules.hpp"

// Synthetic Selmer data and the formal Stark-system layer: a free ambient
// module with one transverse coordinate per auxiliary prime, planted divisor
// elements d_q, Selmer submodules H(n) cut out as joint kernels of the
// divisor functionals, and on top of that Stark systems with their
// transition maps, rank reduction, regulators, the kappa^sigma/delta^sigma
// classes with their four divisor/transverse relations, and the ideals
// I_i(eps).
//
// Exterior conventions.  Elements of the intersection power of H(n) embed
// canonically into the exterior power of the free ambient module, so they
// are stored as exterior coordinate vectors there.  All determinant twists
// are trivialized by wedging the divisor functionals in ascending label
// order; transition maps append divisor contractions in the last slots with
// the Koszul sign (-1)^{#larger labels}, and the auxiliary blocks (core
// functionals in rank reduction, transverse functionals in regulators) are
// likewise appended in the last slots in ascending order.

namespace esk {

// An element of wedge^k of the free ambient module R^m, with coordinates
// indexed by wedge_index(m, k) (lexicographic k-subsets).
struct WedgeElem {
  RingPtr ring;
  std::size_t m = 0, k = 0;
  std::vector<GRElem> c;

  WedgeElem() = default;
  WedgeElem(RingPtr r, std::size_t m_, std::size_t k_);
  bool is_zero() const;
  bool operator==(const WedgeElem& o) const;
};

WedgeElem wedge_add(const WedgeElem& a, const WedgeElem& b);
WedgeElem wedge_sub(const WedgeElem& a, const WedgeElem& b);
WedgeElem wedge_scale(const WedgeElem& a, const GRElem& s);

// contraction against the functional f (a row of length m), appended in the
// LAST slot: result(phi_1..phi_{k-1}) = a(phi_1..phi_{k-1}, f)
WedgeElem contract_last(const WedgeElem& a, const std::vector<GRElem>& f);
// contraction with f inserted in the FIRST slot:
// result(phi_2..phi_k) = a(f, phi_2..phi_k)
WedgeElem contract_first(const WedgeElem& a, const std::vector<GRElem>& f);

// A synthetic Selmer datum over R: free ambient module of rank
// core_rank + #labels with core coordinates e_0..e_{r-1} followed by one
// transverse coordinate g_q per label; per-label finite functionals phi_q
// and divisor functionals div_q (rows over the ambient); and for every
// conductor mask the Selmer submodule H(n) = {x : div_q(x) = 0 for q not
// dividing n} presented as a submodule of the ambient.
struct SelmerDatum {
  RingPtr ring;
  std::vector<PrimeLabel> labels;             // ascending by q
  unsigned core_rank = 0;
  std::vector<std::vector<GRElem>> phi_rows;  // one row per label
  std::vector<std::vector<GRElem>> div_rows;  // one row per label
  std::vector<SubmodulePresentation> selmer;  // indexed by conductor mask

  std::size_t ambient_rank() const { return core_rank + labels.size(); }
  std::size_t transverse_index(std::size_t qi) const { return core_rank + qi; }
  // the planted divisor d_q (the g_q coefficient of the divisor row)
  const GRElem& planted_divisor(std::size_t qi) const;
  // evaluate a functional row on an ambient element
  GRElem apply_row(const std::vector<GRElem>& row, const std::vector<GRElem>& x) const;
};

// datum with unit divisors: H(n) free of rank core_rank + nu(n)
SelmerDatum free_selmer_datum(const RingPtr& ring, std::vector<PrimeLabel> labels,
                              unsigned core_rank);

// datum with planted divisors d_q; phi_core (optional, one row of length
// core_rank per label) mixes the finite functionals into the core
// coordinates: phi_q = g_q^* + sum_i phi_core[q][i] e_i^*
SelmerDatum synthetic_selmer_datum(const RingPtr& ring, std::vector<PrimeLabel> labels,
                                   unsigned core_rank, const std::vector<GRElem>& divisors,
                                   const std::vector<std::vector<GRElem>>& phi_core = {});

struct SelmerReport {
  bool valid = true;
  std::vector<std::string> violations;
  std::vector<std::string> notes;
};

// checks the cartesian condition on every covering pair (H(n/q) equals the
// divisor kernel inside H(n)), divisor vanishing off the conductor, and the
// finite-functional isomorphism on the full-pool Selmer module
SelmerReport validate_selmer_datum(const SelmerDatum& d);

// A Stark system of the given rank: for each conductor mask an element of
// cap^{rank + nu(n)} H(n), stored as an exterior coordinate vector over the
// ambient with the determinant twist trivialized in ascending label order.
struct StarkSystem {
  unsigned rank = 0;
  std::vector<WedgeElem> eps;  // indexed by conductor mask
};

// the canonical system eps_n = (prod_{q not | n} d_q) e_0 ^ .. ^ e_{rank-1}
// ^ (g_q : q | n); requires rank <= core_rank and pure divisor rows
StarkSystem planted_stark_system(const SelmerDatum& d, unsigned rank);

// the transition map Phi_{m,n} on exterior coordinates (iterated divisor
// contraction in descending label order with the Koszul sign), as a map of
// free coordinate modules
ModuleMap stark_transition(const SelmerDatum& d, u64 mmask, u64 nmask, unsigned rank);
WedgeElem stark_transition_apply(const SelmerDatum& d, u64 mmask, u64 nmask,
                                 const WedgeElem& x);

// checks Phi_{m,m/q}(eps_m) = eps_{m/q} on every covering pair
SelmerReport stark_system_check(const SelmerDatum& d, const StarkSystem& sys);

struct StarkSolveReport {
  bool free_rank_one = false;
  unsigned length = 0;        // composition length of the solution module
  Mat solution_lattice;       // Howell basis, flat coordinates over all masks
  std::optional<StarkSystem> basis;  // generator when free of rank 1
};

// solves the inverse-limit system over the divisibility poset as a kernel
// over expanded scalars and analyzes the R-module structure of the result
StarkSolveReport stark_solve(const SelmerDatum& d, unsigned rank);

// (eps_n) -> ((-1)^{r nu(n)} l_n(eps_n)) with l_n the contraction against
// the core coordinate functionals e_0^*..e_{r-1}^* (appended in the last
// slots); turns a rank-r system into a rank-0 system
StarkSystem rank_reduction(const SelmerDatum& d, const StarkSystem& sys);

// Reg_n(eps) = (-1)^{nu(n)} eps_n contracted against the finite functionals
// phi_q, q | n, in ascending order (last slots); an element of cap^{rank} H
WedgeElem regulator(const SelmerDatum& d, const StarkSystem& sys, u64 nmask);

// kappa^sigma_{n,q} = (-1)^{nu(n)} eps-bar_{n,q}(phi_{sigma(r_1)} ^ ..):
// nn lists the label indices of n in a chosen order (the result is
// order-independent), q is a label index not in nn, sigma maps label indices
// to label indices.  Requires a rank-0 system.  Result: an ambient element
// (k = 1 exterior vector) of H(nq).
WedgeElem kappa_sigma(const SelmerDatum& d, const StarkSystem& sys,
                      const std::vector<std::size_t>& nn, std::size_t q,
                      const std::vector<std::size_t>& sigma);

// delta^sigma_n = (-1)^{nu(n)} eps-bar_{n,1}(phi^sigma_n), a ring element
GRElem delta_sigma(const SelmerDatum& d, const StarkSystem& sys,
                   const std::vector<std::size_t>& nn, const std::vector<std::size_t>& sigma);

// checks the four divisor/transverse relations of the kappa^sigma classes
// over all conductors, labels q off the conductor, and self-maps sigma of
// the label set (all of them when #labels^#labels <= 256, otherwise the
// identity only)
SelmerReport check_coh_rel(const SelmerDatum& d, const StarkSystem& sys);

// an ambient element z of H(qr) with div_q(z) = 1, when the planted divisor
// d_q is a unit
std::optional<std::vector<GRElem>> transverse_unit(const SelmerDatum& d, std::size_t q,
                                                   std::size_t r);

// verifies the divisor compatibilities of
//   kappa-tilde_{m,q} = -div_r(z) kappa_{m,r} + delta_m z
//                       + sum_{s | m} phi_{sigma(s)}(z) kappa_{m/s,s}
// against kappa_{m,q}, for every conductor m avoiding q and r.  A missing z
// is reported as unverifiable (not a failure); div_q(z) != 1 is rejected.
SelmerReport tilde_kappa_identity_check(const SelmerDatum& d, const StarkSystem& sys,
                                        std::size_t q, std::size_t r,
                                        const std::optional<std::vector<GRElem>>& z,
                                        const std::vector<std::size_t>& sigma);

// I_i(eps) = sum over nu(n) = i of the image ideal of eps_n (the ideal of
// its exterior coordinates); requires a rank-0 system
IdealHandle stark_ideals(const SelmerDatum& d, const StarkSystem& sys, unsigned i);

}  // namespace esk
