#pragma once

#include <optional>

#include "eskit/ideals.hpp"
#include "eskit/ring.hpp"

// Finitely presented modules over R = (Z/p^n)[G], their hom modules, duals,
// exterior powers and exterior bi-duals, and the ideal invariants (Fitting,
// annihilator, characteristic).  Everything reduces to Z/p^n linear algebra
// through scalar expansion; module elements are flat residue rows of length
// gens * |G| taken modulo the expanded relation lattice.

namespace esk {

struct PresentedModule {
  RingPtr ring;
  std::size_t gens = 0;
  RMat relations;   // rows: relations among the generators (columns = gens)
  Mat rel_lattice;  // Howell basis of the expanded relation lattice

  PresentedModule() = default;
  PresentedModule(RingPtr r, std::size_t g, RMat rel);

  std::size_t flat_dim() const { return gens * ring->dim(); }
  unsigned length() const;
  bool is_zero_module() const { return length() == 0; }

  std::vector<u64> reduce(const std::vector<u64>& elem) const;
  bool elem_is_zero(const std::vector<u64>& elem) const;
  bool elem_equal(const std::vector<u64>& a, const std::vector<u64>& b) const;
  std::vector<u64> zero_elem() const { return std::vector<u64>(flat_dim(), 0); }
  // the j-th generator as an element
  std::vector<u64> gen_elem(std::size_t j) const;
  // a * generator j
  std::vector<u64> scaled_gen(const GRElem& a, std::size_t j) const;
  std::vector<u64> elem_add(const std::vector<u64>& a, const std::vector<u64>& b) const;
  std::vector<u64> elem_sub(const std::vector<u64>& a, const std::vector<u64>& b) const;
  std::vector<u64> elem_scale(const std::vector<u64>& a, const GRElem& s) const;
};

PresentedModule free_module(const RingPtr& ring, std::size_t k);
// cyclic module R/(ideal generated by given elements)
PresentedModule quotient_module(const RingPtr& ring, const std::vector<GRElem>& gens);

struct ModuleMap {
  PresentedModule source, target;
  RMat action;  // source.gens x target.gens

  // verifies the map sends source relations into the target relation lattice
  void check_well_defined() const;
  std::vector<u64> apply(const std::vector<u64>& elem) const;
  bool is_injective() const;
  bool is_surjective() const;
};

ModuleMap map_compose(const ModuleMap& f, const ModuleMap& g);  // f then g
ModuleMap identity_map(const PresentedModule& M);

// ---- hom modules ----------------------------------------------------------

struct HomModule {
  PresentedModule mod;   // presentation of Hom(M, N)
  PresentedModule src;   // M
  PresentedModule tgt;   // N
  // chosen R-generators of the solution lattice: each row is a flattened
  // src.gens x tgt.gens matrix over R
  Mat gen_matrices;
  Mat gen_expanded;      // expand_scalars of the stacked generator matrices (cache)
  Mat k0;                // lattice of matrices representing the zero map

  // value matrix of the hom element with the given coordinates
  RMat value_matrix(const std::vector<u64>& coords) const;
  // evaluation pairing Hom(M,N) x M -> N
  std::vector<u64> evaluate(const std::vector<u64>& coords, const std::vector<u64>& m) const;
  // express a concrete value matrix (flattened) as coordinates, if possible
  std::optional<std::vector<u64>> coords_of(const std::vector<u64>& flat_matrix) const;
};

HomModule hom_module(const PresentedModule& M, const PresentedModule& N);
HomModule dual_module(const PresentedModule& M);  // Hom(M, R)

// ---- exterior powers and bi-duals ----------------------------------------

// lexicographically ordered r-subsets of {0,...,g-1}
std::vector<std::vector<std::size_t>> wedge_index(std::size_t g, std::size_t r);

PresentedModule exterior_power(const PresentedModule& M, std::size_t r);

// Context for the r-th exterior bi-dual (wedge^r M^*)^*, keeping the dual
// and the wedge of the dual so elements can be evaluated.
struct BidualModule {
  PresentedModule base;    // M
  std::size_t r = 0;
  HomModule dual;          // M^* with its generator value-matrices
  PresentedModule wedge;   // wedge^r (M^*)
  HomModule bidual;        // (wedge^r M^*)^*  -- elements live here
};

BidualModule exterior_bidual(const PresentedModule& M, std::size_t r);

// canonical map xi: wedge^r M -> bidual^r M
ModuleMap xi_map(const BidualModule& B);

// contraction by Phi in wedge^r(M^*) (coordinates w.r.t. Bs.wedge generators
// of the SAME dual): map from the s-th bidual Bs to the (s-r)-th bidual Bt.
// Bs and Bt must be built from the same dual of the same module.
ModuleMap contract(const BidualModule& Bs, const BidualModule& Bt,
                   const std::vector<u64>& phi_coords);

// ---- cartesian squares (Appendix-B map) -----------------------------------

struct CartesianSquare {
  ModuleMap incl;   // M1 -> M2, injective
  ModuleMap pi1;    // M1 -> F1 (free module of rank s1)
  ModuleMap pi2;    // M2 -> F2 (free module of rank s2)
  RMat f_incl;      // F1 -> F2, split injective, s1 x s2
};

bool square_is_cartesian(const CartesianSquare& S);

// The map cap^r M2 (x) det(F2^*) -> cap^{r-s2+s1} M1 (x) det(F1^*) with the
// determinant twists trivialized by the standard bases of F1 and F2.
ModuleMap cartesian_map(const CartesianSquare& S, const BidualModule& B2,
                        const BidualModule& B1);

// ---- ideal invariants ------------------------------------------------------

IdealHandle fitting_ideal(const PresentedModule& M, std::size_t i);
IdealHandle annihilator(const PresentedModule& M);
IdealHandle characteristic_ideal(const PresentedModule& M);

// ---- submodules and subquotients -------------------------------------------

// Present the lattice quotient K/K0 inside R^k.  Generators are chosen as an
// R-minimized subset of the Howell rows of K.  Returns the module together
// with the flat generator representatives (rows of length k*|G|).
struct Subquotient {
  PresentedModule mod;
  Mat gen_reps;  // one flat row per generator
};
Subquotient subquotient(const RingPtr& ring, std::size_t k, const Mat& K, const Mat& K0);

// R-minimized generating rows for the lattice K modulo the sublattice S0
// (rows are taken from the Howell basis of K in order).
Mat r_generators(const RingPtr& ring, const Mat& K, const Mat& S0);

// submodule of M generated by the given elements; inclusion into M
struct SubmodulePresentation {
  PresentedModule sub;
  ModuleMap incl;
};
SubmodulePresentation submodule_presentation(const PresentedModule& M,
                                             const std::vector<std::vector<u64>>& elements);

// ---- base change ------------------------------------------------------------

struct RingProjection {
  RingPtr src, tgt;
  std::vector<u64> group_map;  // image in tgt.group per src group index

  void validate() const;  // surjective homomorphism, tgt.n <= src.n, same p
  GRElem push(const GRElem& a) const;
  RMat push(const RMat& m) const;
};

PresentedModule base_change(const PresentedModule& M, const RingProjection& proj);

// ---- kernel presentations (Lemma-expre route) -------------------------------

// M := ker(alpha) for alpha: R^a -> R^b given as an a x b matrix acting on
// row vectors.  Returns the kernel as a subquotient of R^a.
Subquotient kernel_module(const RingPtr& ring, const RMat& alpha);

// The sublattice of wedge^r(R^a) (free of rank C(a,r)) computing cap^r M via
// ker(wedge^r P1 -> I (x) wedge^{r-1} P1) where I = im(alpha).
Mat bidual_kernel_lattice(const RingPtr& ring, const RMat& alpha, std::size_t r);

// The image of the definitional cap^r M inside wedge^r(R^a), via the dual
// surjection (R^a)^* -> M^*.  Equal to bidual_kernel_lattice by Lemma-expre.
Mat bidual_image_lattice(const RingPtr& ring, const RMat& alpha, std::size_t r);

// determinant of a square matrix over the group ring (permutation expansion)
GRElem gr_det(const RMat& A);

// inverse of a square matrix over R, if it exists
std::optional<RMat> rmat_inverse(const RMat& A);

}  // namespace esk
