#include "eskit/modules.hpp"

#include <algorithm>
#include <cassert>

namespace esk {

namespace {

// solve x*A = b modulo the row span of L (L may be empty); returns the
// A-row coordinates only
std::optional<std::vector<u64>> solve_mod(const Mat& A, const Mat& L, const std::vector<u64>& b) {
  if (L.rows == 0) return solve_left(A, b);
  Mat S = vstack(A, L);
  auto sol = solve_left(S, b);
  if (!sol) return std::nullopt;
  sol->resize(A.rows);
  return sol;
}

Mat orbit_rows(const RingPtr& ring, const std::vector<u64>& flat) {
  u64 d = ring->dim();
  Mat L(0, flat.size(), ring->p, ring->n);
  auto rrow = unflatten_row(ring, flat);
  for (u64 g = 0; g < d; ++g) {
    std::vector<GRElem> t;
    t.reserve(rrow.size());
    for (const auto& e : rrow) t.push_back(gr_translate(e, g));
    L.append_row(flatten_row(t));
  }
  return L;
}

Mat empty_lattice(const RingPtr& ring, std::size_t flat_cols) {
  return Mat(0, flat_cols, ring->p, ring->n);
}

// block-diagonal embedding of `blocks` copies of lattice L into a flat space
// of blocks*L.cols columns
Mat blockdiag_lattice(const Mat& L, std::size_t blocks) {
  Mat B(0, blocks * L.cols, L.p, L.n);
  for (std::size_t k = 0; k < blocks; ++k)
    for (std::size_t i = 0; i < L.rows; ++i) {
      std::vector<u64> row(blocks * L.cols, 0);
      for (std::size_t j = 0; j < L.cols; ++j) row[k * L.cols + j] = L.at(i, j);
      B.append_row(row);
    }
  return B;
}

}  // namespace

PresentedModule::PresentedModule(RingPtr r, std::size_t g, RMat rel)
    : ring(std::move(r)), gens(g), relations(std::move(rel)) {
  if (relations.rows == 0) relations = RMat(ring, 0, gens);
  if (relations.cols != gens) throw usage_error("relation matrix has wrong number of columns");
  rel_lattice = howell_form(expand_row_lattice(relations));
}

unsigned PresentedModule::length() const {
  return static_cast<unsigned>(gens * ring->dim() * ring->n) - span_length(rel_lattice);
}

std::vector<u64> PresentedModule::reduce(const std::vector<u64>& elem) const {
  if (elem.size() != flat_dim()) throw usage_error("element has wrong length");
  if (rel_lattice.rows == 0) {
    auto r = elem;
    for (auto& x : r) x %= ring->mod;
    return r;
  }
  return reduce_mod(elem, rel_lattice);
}

bool PresentedModule::elem_is_zero(const std::vector<u64>& elem) const {
  auto r = reduce(elem);
  return std::all_of(r.begin(), r.end(), [](u64 x) { return x == 0; });
}

bool PresentedModule::elem_equal(const std::vector<u64>& a, const std::vector<u64>& b) const {
  return reduce(a) == reduce(b);
}

std::vector<u64> PresentedModule::gen_elem(std::size_t j) const {
  std::vector<u64> e(flat_dim(), 0);
  e[j * ring->dim()] = 1 % ring->mod;
  return reduce(e);
}

std::vector<u64> PresentedModule::scaled_gen(const GRElem& a, std::size_t j) const {
  std::vector<u64> e(flat_dim(), 0);
  for (u64 h = 0; h < ring->dim(); ++h) e[j * ring->dim() + h] = a.c[h];
  return reduce(e);
}

std::vector<u64> PresentedModule::elem_add(const std::vector<u64>& a,
                                           const std::vector<u64>& b) const {
  std::vector<u64> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = (a[i] + b[i]) % ring->mod;
  return reduce(r);
}

std::vector<u64> PresentedModule::elem_sub(const std::vector<u64>& a,
                                           const std::vector<u64>& b) const {
  std::vector<u64> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = (a[i] + ring->mod - b[i] % ring->mod) % ring->mod;
  return reduce(r);
}

std::vector<u64> PresentedModule::elem_scale(const std::vector<u64>& a, const GRElem& s) const {
  auto rr = unflatten_row(ring, a);
  for (auto& e : rr) e = gr_mul(e, s);
  return reduce(flatten_row(rr));
}

PresentedModule free_module(const RingPtr& ring, std::size_t k) {
  return PresentedModule(ring, k, RMat(ring, 0, k));
}

PresentedModule quotient_module(const RingPtr& ring, const std::vector<GRElem>& gens) {
  RMat rel(ring, gens.size(), 1);
  for (std::size_t i = 0; i < gens.size(); ++i) rel.at(i, 0) = gens[i];
  return PresentedModule(ring, 1, rel);
}

void ModuleMap::check_well_defined() const {
  if (action.rows != source.gens || action.cols != target.gens)
    throw usage_error("module map has wrong shape");
  Mat E = expand_scalars(action);
  for (std::size_t i = 0; i < source.relations.rows; ++i) {
    std::vector<u64> rho = flatten_row(
        std::vector<GRElem>(source.relations.e.begin() + static_cast<std::ptrdiff_t>(i * source.gens),
                            source.relations.e.begin() + static_cast<std::ptrdiff_t>((i + 1) * source.gens)));
    Mat v(1, rho.size(), E.p, E.n);
    v.set_row(0, rho);
    Mat img = mat_mul(v, E);
    if (!target.elem_is_zero(img.row(0)))
      throw math_error("module map does not respect relations");
  }
}

std::vector<u64> ModuleMap::apply(const std::vector<u64>& elem) const {
  Mat E = expand_scalars(action);
  Mat v(1, elem.size(), E.p, E.n);
  v.set_row(0, source.reduce(elem));
  return target.reduce(mat_mul(v, E).row(0));
}

bool ModuleMap::is_injective() const {
  Mat K = ker_into(expand_scalars(action), target.rel_lattice);
  for (std::size_t i = 0; i < K.rows; ++i)
    if (!source.elem_is_zero(K.row(i))) return false;
  return true;
}

bool ModuleMap::is_surjective() const {
  Mat img = expand_row_lattice(action);
  Mat full = lattice_sum(img, target.rel_lattice);
  return span_length(full) ==
         static_cast<unsigned>(target.gens * target.ring->dim() * target.ring->n);
}

ModuleMap map_compose(const ModuleMap& f, const ModuleMap& g) {
  return ModuleMap{f.source, g.target, rmat_mul(f.action, g.action)};
}

ModuleMap identity_map(const PresentedModule& M) {
  return ModuleMap{M, M, RMat::identity(M.ring, M.gens)};
}

Mat r_generators(const RingPtr& ring, const Mat& K, const Mat& S0) {
  Mat S = S0.rows ? howell_form(S0) : Mat(0, K.cols, K.p, K.n);
  Mat out(0, K.cols, K.p, K.n);
  for (std::size_t i = 0; i < K.rows; ++i) {
    auto row = K.row(i);
    if (S.rows && in_span(row, S)) continue;
    if (!S.rows && std::all_of(row.begin(), row.end(), [](u64 x) { return x == 0; })) continue;
    out.append_row(row);
    S = howell_form(vstack(S.rows ? S : Mat(0, K.cols, K.p, K.n), orbit_rows(ring, row)));
  }
  return out;
}

Subquotient subquotient(const RingPtr& ring, std::size_t k, const Mat& K, const Mat& K0) {
  u64 d = ring->dim();
  Mat K0h = K0.rows ? howell_form(K0) : Mat(0, k * d, ring->p, ring->n);
  Mat gens = r_generators(ring, howell_form(K), K0h);
  std::size_t s = gens.rows;
  if (s == 0) {
    Subquotient sq;
    sq.mod = PresentedModule(ring, 0, RMat(ring, 0, 0));
    sq.gen_reps = Mat(0, k * d, ring->p, ring->n);
    return sq;
  }
  RMat Smat = rmat_from_flat_rows(ring, gens);
  Mat relK = ker_into(expand_scalars(Smat), K0h);
  Mat relrows = r_generators(ring, relK, empty_lattice(ring, s * d));
  Subquotient sq;
  sq.mod = PresentedModule(ring, s, rmat_from_flat_rows(ring, relrows));
  sq.gen_reps = gens;
  return sq;
}

// ---- hom modules ------------------------------------------------------------

HomModule hom_module(const PresentedModule& M, const PresentedModule& N) {
  if (!(*M.ring == *N.ring)) throw usage_error("hom_module: ring mismatch");
  const RingPtr& ring = M.ring;
  u64 d = ring->dim();
  std::size_t gM = M.gens, gN = N.gens;
  std::size_t unknowns = gM * gN;

  HomModule H;
  H.src = M;
  H.tgt = N;

  if (unknowns == 0) {
    H.mod = PresentedModule(ring, 0, RMat(ring, 0, 0));
    H.gen_matrices = Mat(0, unknowns * d, ring->p, ring->n);
    H.gen_expanded = Mat(0, unknowns * d, ring->p, ring->n);
    H.k0 = Mat(0, unknowns * d, ring->p, ring->n);
    return H;
  }

  // conditions: rho * T lies in N's relation lattice for R-generating
  // relations rho of M
  Mat relrows = r_generators(ring, M.rel_lattice, empty_lattice(ring, gM * d));
  RMat Rrel = rmat_from_flat_rows(ring, relrows);
  std::size_t rr = Rrel.rows;

  Mat K;
  if (rr == 0) {
    K = Mat::identity(unknowns * d, ring->p, ring->n);
  } else {
    // map R^{gM*gN} -> R^{rr*gN}: T |-> (rho_i * T)_i
    RMat C(ring, unknowns, rr * gN);
    for (std::size_t j = 0; j < gM; ++j)
      for (std::size_t k = 0; k < gN; ++k)
        for (std::size_t i = 0; i < rr; ++i)
          C.at(j * gN + k, i * gN + k) = Rrel.at(i, j);
    Mat target_lat = blockdiag_lattice(N.rel_lattice, rr);
    K = ker_into(expand_scalars(C), target_lat);
  }

  // matrices representing the zero map: every row of T in N's lattice
  Mat K0 = blockdiag_lattice(N.rel_lattice, gM);
  Subquotient sq = subquotient(ring, unknowns, K, K0);
  H.mod = sq.mod;
  H.gen_matrices = sq.gen_reps;
  H.k0 = K0.rows ? howell_form(K0) : Mat(0, unknowns * d, ring->p, ring->n);
  if (H.gen_matrices.rows)
    H.gen_expanded = expand_scalars(rmat_from_flat_rows(ring, H.gen_matrices));
  else
    H.gen_expanded = Mat(0, unknowns * d, ring->p, ring->n);
  return H;
}

HomModule dual_module(const PresentedModule& M) {
  return hom_module(M, free_module(M.ring, 1));
}

RMat HomModule::value_matrix(const std::vector<u64>& coords) const {
  const RingPtr& ring = src.ring;
  u64 d = ring->dim();
  std::vector<u64> flat(src.gens * tgt.gens * d, 0);
  if (gen_expanded.rows) {
    Mat v(1, gen_expanded.rows, gen_expanded.p, gen_expanded.n);
    v.set_row(0, coords);
    flat = mat_mul(v, gen_expanded).row(0);
  }
  u64 mod = ring->mod;
  (void)mod;
  RMat T(ring, src.gens, tgt.gens);
  auto rrow = unflatten_row(ring, flat);
  for (std::size_t j = 0; j < src.gens; ++j)
    for (std::size_t k = 0; k < tgt.gens; ++k) T.at(j, k) = rrow[j * tgt.gens + k];
  return T;
}

std::vector<u64> HomModule::evaluate(const std::vector<u64>& coords,
                                     const std::vector<u64>& m) const {
  RMat T = value_matrix(coords);
  ModuleMap f{src, tgt, T};
  return f.apply(m);
}

std::optional<std::vector<u64>> HomModule::coords_of(const std::vector<u64>& flat_matrix) const {
  if (gen_expanded.rows == 0) {
    // only the zero hom exists
    if (k0.rows ? in_span(flat_matrix, k0)
                : std::all_of(flat_matrix.begin(), flat_matrix.end(), [](u64 x) { return x == 0; }))
      return std::vector<u64>{};
    return std::nullopt;
  }
  return solve_mod(gen_expanded, k0, flat_matrix);
}

// ---- exterior powers --------------------------------------------------------

std::vector<std::vector<std::size_t>> wedge_index(std::size_t g, std::size_t r) {
  std::vector<std::vector<std::size_t>> out;
  if (r > g) return out;
  std::vector<std::size_t> c(r);
  for (std::size_t i = 0; i < r; ++i) c[i] = i;
  while (true) {
    out.push_back(c);
    std::size_t i = r;
    while (i > 0 && c[i - 1] == g - r + (i - 1)) --i;
    if (i == 0) break;
    ++c[i - 1];
    for (std::size_t j = i; j < r; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

namespace {
// position of subset S in wedge_index(g, |S|) lex order, via combinatorial
// number system
std::size_t subset_rank(const std::vector<std::size_t>& S, std::size_t g) {
  std::size_t r = S.size();
  auto choose = [](std::size_t a, std::size_t b) -> std::size_t {
    if (b > a) return 0;
    std::size_t res = 1;
    for (std::size_t i = 0; i < b; ++i) res = res * (a - i) / (i + 1);
    return res;
  };
  std::size_t rank = 0;
  std::size_t prev = 0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t v = prev; v < S[i]; ++v) rank += choose(g - v - 1, r - i - 1);
    prev = S[i] + 1;
  }
  return rank;
}
}  // namespace

PresentedModule exterior_power(const PresentedModule& M, std::size_t r) {
  const RingPtr& ring = M.ring;
  auto idx = wedge_index(M.gens, r);
  std::size_t ng = idx.size();
  if (ng == 0) return PresentedModule(ring, 0, RMat(ring, 0, 0));
  if (r == 0) return free_module(ring, 1);

  auto sub_idx = wedge_index(M.gens, r - 1);
  RMat rel(ring, M.relations.rows * sub_idx.size(), ng);
  std::size_t row = 0;
  for (std::size_t i = 0; i < M.relations.rows; ++i)
    for (const auto& T : sub_idx) {
      for (std::size_t j = 0; j < M.gens; ++j) {
        if (std::binary_search(T.begin(), T.end(), j)) continue;
        const GRElem& c = M.relations.at(i, j);
        if (c.is_zero()) continue;
        std::vector<std::size_t> S = T;
        S.insert(std::lower_bound(S.begin(), S.end(), j), j);
        std::size_t pos = static_cast<std::size_t>(
            std::count_if(T.begin(), T.end(), [j](std::size_t t) { return t < j; }));
        GRElem signed_c = (pos % 2 == 0) ? c : gr_neg(c);
        std::size_t col = subset_rank(S, M.gens);
        rel.at(row, col) = gr_add(rel.at(row, col), signed_c);
      }
      ++row;
    }
  return PresentedModule(ring, ng, rel);
}

BidualModule exterior_bidual(const PresentedModule& M, std::size_t r) {
  BidualModule B;
  B.base = M;
  B.r = r;
  B.dual = dual_module(M);
  B.wedge = exterior_power(B.dual.mod, r);
  B.bidual = hom_module(B.wedge, free_module(M.ring, 1));
  return B;
}

namespace {
// entry of dual generator t at base generator j, as a ring element
GRElem dual_gen_entry(const HomModule& D, std::size_t t, std::size_t j) {
  const RingPtr& ring = D.src.ring;
  u64 d = ring->dim();
  std::vector<u64> c(d);
  for (u64 h = 0; h < d; ++h) c[h] = D.gen_matrices.at(t, j * d + h);
  return GRElem(ring, c);
}

GRElem det_of(const RingPtr& ring, const std::vector<std::vector<GRElem>>& m) {
  std::size_t k = m.size();
  if (k == 0) return GRElem::one(ring);
  if (k == 1) return m[0][0];
  GRElem acc = GRElem::zero(ring);
  // Laplace expansion along the first row
  for (std::size_t j = 0; j < k; ++j) {
    if (m[0][j].is_zero()) continue;
    std::vector<std::vector<GRElem>> minor;
    for (std::size_t i = 1; i < k; ++i) {
      std::vector<GRElem> row;
      for (std::size_t l = 0; l < k; ++l)
        if (l != j) row.push_back(m[i][l]);
      minor.push_back(std::move(row));
    }
    GRElem term = gr_mul(m[0][j], det_of(ring, minor));
    acc = (j % 2 == 0) ? gr_add(acc, term) : gr_sub(acc, term);
  }
  return acc;
}

// wedge of k vectors in R^dim: coefficient at each ascending k-subset is the
// determinant of the corresponding k x k minor
std::vector<u64> wedge_of_vectors(const RingPtr& ring,
                                  const std::vector<std::vector<GRElem>>& vecs,
                                  std::size_t dim) {
  std::size_t k = vecs.size();
  auto idx = wedge_index(dim, k);
  u64 d = ring->dim();
  std::vector<u64> out(idx.size() * d, 0);
  for (std::size_t s = 0; s < idx.size(); ++s) {
    std::vector<std::vector<GRElem>> m(k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) m[i].push_back(vecs[i][idx[s][j]]);
    GRElem dd = det_of(ring, m);
    for (u64 h = 0; h < d; ++h) out[s * d + h] = dd.c[h];
  }
  return out;
}
}  // namespace

GRElem gr_det(const RMat& A) {
  if (A.rows != A.cols) throw usage_error("gr_det: not square");
  std::vector<std::vector<GRElem>> m(A.rows);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) m[i].push_back(A.at(i, j));
  return det_of(A.ring, m);
}

std::optional<RMat> rmat_inverse(const RMat& A) {
  if (A.rows != A.cols) return std::nullopt;
  const RingPtr& ring = A.ring;
  u64 d = ring->dim();
  Mat E = expand_scalars(A);
  RMat B(ring, A.rows, A.cols);
  for (std::size_t i = 0; i < A.rows; ++i) {
    std::vector<u64> target(A.cols * d, 0);
    target[i * d] = 1 % ring->mod;
    auto sol = solve_left(E, target);
    if (!sol) return std::nullopt;
    auto rr = unflatten_row(ring, *sol);
    for (std::size_t j = 0; j < A.cols; ++j) B.at(i, j) = rr[j];
  }
  return B;
}

ModuleMap xi_map(const BidualModule& B) {
  const PresentedModule& M = B.base;
  const RingPtr& ring = M.ring;
  PresentedModule W = exterior_power(M, B.r);
  auto src_idx = wedge_index(M.gens, B.r);
  auto tgt_idx = wedge_index(B.dual.mod.gens, B.r);
  u64 d = ring->dim();

  RMat action(ring, W.gens, B.bidual.mod.gens);
  for (std::size_t s = 0; s < src_idx.size(); ++s) {
    // functional on wedge^r(M^*): value at generator u_T is det(u_{t}(e_{s}))
    std::vector<u64> F(tgt_idx.size() * d, 0);
    for (std::size_t t = 0; t < tgt_idx.size(); ++t) {
      std::vector<std::vector<GRElem>> m(B.r);
      for (std::size_t a = 0; a < B.r; ++a)
        for (std::size_t b = 0; b < B.r; ++b)
          m[a].push_back(dual_gen_entry(B.dual, tgt_idx[t][a], src_idx[s][b]));
      GRElem dd = det_of(ring, m);
      for (u64 h = 0; h < d; ++h) F[t * d + h] = dd.c[h];
    }
    auto coords = B.bidual.coords_of(F);
    if (!coords) throw math_error("xi_map: functional not expressible (internal error)");
    auto rr = unflatten_row(ring, *coords);
    for (std::size_t j = 0; j < action.cols; ++j) action.at(s, j) = rr[j];
  }
  ModuleMap f{W, B.bidual.mod, action};
  f.check_well_defined();
  return f;
}

ModuleMap contract(const BidualModule& Bs, const BidualModule& Bt,
                   const std::vector<u64>& phi_coords) {
  const RingPtr& ring = Bs.base.ring;
  u64 d = ring->dim();
  std::size_t dg = Bs.dual.mod.gens;
  if (Bt.dual.mod.gens != dg) throw usage_error("contract: mismatched duals");
  if (Bs.r < Bt.r) throw usage_error("contract: target degree exceeds source degree");
  std::size_t r = Bs.r - Bt.r;
  auto idx_r = wedge_index(dg, r);
  auto idx_s = wedge_index(dg, Bs.r);
  auto idx_t = wedge_index(dg, Bt.r);
  if (phi_coords.size() != idx_r.size() * d) throw usage_error("contract: Phi has wrong length");

  RMat action(ring, Bs.bidual.mod.gens, Bt.bidual.mod.gens);
  for (std::size_t hrow = 0; hrow < Bs.bidual.mod.gens; ++hrow) {
    // values of the source functional on wedge^{s} generators
    auto hvals = unflatten_row(ring, Bs.bidual.gen_matrices.row(hrow));
    // target functional: u_B |-> T(Phi wedge u_B)
    std::vector<u64> F(idx_t.size() * d, 0);
    for (std::size_t b = 0; b < idx_t.size(); ++b) {
      GRElem acc = GRElem::zero(ring);
      for (std::size_t a = 0; a < idx_r.size(); ++a) {
        GRElem phiA(ring, std::vector<u64>(phi_coords.begin() + static_cast<std::ptrdiff_t>(a * d),
                                           phi_coords.begin() + static_cast<std::ptrdiff_t>((a + 1) * d)));
        if (phiA.is_zero()) continue;
        // disjointness and sign of merging A then B
        const auto& A = idx_r[a];
        const auto& Bset = idx_t[b];
        bool overlap = false;
        std::size_t inversions = 0;
        for (std::size_t x : Bset) {
          std::size_t gt = 0;
          for (std::size_t y : A) {
            if (y == x) {
              overlap = true;
              break;
            }
            if (y > x) ++gt;
          }
          if (overlap) break;
          inversions += gt;
        }
        if (overlap) continue;
        std::vector<std::size_t> U;
        U.reserve(A.size() + Bset.size());
        std::merge(A.begin(), A.end(), Bset.begin(), Bset.end(), std::back_inserter(U));
        std::size_t upos = subset_rank(U, dg);
        GRElem term = gr_mul(phiA, hvals[upos]);
        acc = (inversions % 2 == 0) ? gr_add(acc, term) : gr_sub(acc, term);
      }
      for (u64 h = 0; h < d; ++h) F[b * d + h] = acc.c[h];
    }
    auto coords = Bt.bidual.coords_of(F);
    if (!coords) throw math_error("contract: functional not expressible (internal error)");
    auto rr = unflatten_row(ring, *coords);
    for (std::size_t j = 0; j < action.cols; ++j) action.at(hrow, j) = rr[j];
  }
  ModuleMap f{Bs.bidual.mod, Bt.bidual.mod, action};
  f.check_well_defined();
  return f;
}

// ---- cartesian squares ------------------------------------------------------

bool square_is_cartesian(const CartesianSquare& S) {
  // commutativity
  RMat lhs = rmat_mul(S.incl.action, S.pi2.action);
  RMat rhs = rmat_mul(S.pi1.action, S.f_incl);
  for (std::size_t i = 0; i < lhs.e.size(); ++i)
    if (!(lhs.e[i] == rhs.e[i])) return false;
  if (!S.incl.is_injective()) return false;
  // pullback: {x in M2 : pi2(x) in F1} equals the image of M1
  Mat latF1 = howell_form(expand_row_lattice(S.f_incl));
  Mat X = ker_into(expand_scalars(S.pi2.action), latF1);
  Mat img = lattice_sum(expand_row_lattice(S.incl.action), S.incl.target.rel_lattice);
  Mat Xh = howell_form(X);
  return Xh == img;
}

ModuleMap cartesian_map(const CartesianSquare& S, const BidualModule& B2,
                        const BidualModule& B1) {
  const RingPtr& ring = B2.base.ring;
  u64 d = ring->dim();
  std::size_t s1 = S.f_incl.rows, s2 = S.f_incl.cols;
  if (s1 > s2) throw usage_error("cartesian_map: rank deficit");
  std::size_t s = s2 - s1;
  std::size_t r = B2.r;
  if (r < s) throw usage_error("cartesian_map: r < s2 - s1");
  if (B1.r != r - s) throw usage_error("cartesian_map: target bidual has wrong degree");
  if (!square_is_cartesian(S)) throw math_error("cartesian_map: square is not cartesian");

  // adapted basis of F2: rows of f_incl followed by a greedy completion by
  // standard basis vectors
  RMat Badapt(ring, s2, s2);
  for (std::size_t i = 0; i < s1; ++i)
    for (std::size_t j = 0; j < s2; ++j) Badapt.at(i, j) = S.f_incl.at(i, j);
  std::vector<std::size_t> complement;
  {
    Mat span = howell_form(expand_row_lattice(S.f_incl));
    for (std::size_t c = 0; c < s2 && complement.size() < s; ++c) {
      std::vector<u64> e(s2 * d, 0);
      e[c * d] = 1;
      if (in_span(e, span)) continue;
      RMat one_row(ring, 1, s2);
      one_row.at(0, c) = GRElem::one(ring);
      Mat cand = lattice_sum(span, expand_row_lattice(one_row));
      if (span_length(cand) == span_length(span) + d * ring->n) {
        complement.push_back(c);
        span = cand;
      }
    }
    if (complement.size() != s) throw math_error("cartesian_map: F1 -> F2 is not split injective");
  }
  for (std::size_t i = 0; i < s; ++i) Badapt.at(s1 + i, complement[i]) = GRElem::one(ring);
  auto Binv_opt = rmat_inverse(Badapt);
  if (!Binv_opt) throw math_error("cartesian_map: adapted basis is not invertible");
  RMat Binv = *Binv_opt;

  // h_c in M2^*: the c-th adapted coordinate of pi2
  RMat coord = rmat_mul(S.pi2.action, Binv);  // g2 x s2
  std::size_t d2 = B2.dual.mod.gens, d1 = B1.dual.mod.gens;
  std::vector<std::vector<GRElem>> hvecs;  // each in R^{d2}
  for (std::size_t c = s1; c < s2; ++c) {
    std::vector<u64> w(B2.base.gens * d, 0);
    for (std::size_t j = 0; j < B2.base.gens; ++j)
      for (u64 h = 0; h < d; ++h) w[j * d + h] = coord.at(j, c).c[h];
    auto cc = B2.dual.coords_of(w);
    if (!cc) throw math_error("cartesian_map: coordinate functional not expressible");
    hvecs.push_back(unflatten_row(ring, *cc));
  }

  // g: M2^* -> M1^* by composition with the inclusion
  RMat Gmap(ring, d2, d1);
  for (std::size_t t = 0; t < d2; ++t) {
    std::vector<u64> w(B1.base.gens * d, 0);
    for (std::size_t i = 0; i < B1.base.gens; ++i) {
      GRElem acc = GRElem::zero(ring);
      for (std::size_t j = 0; j < B2.base.gens; ++j)
        acc = gr_add(acc, gr_mul(S.incl.action.at(i, j), dual_gen_entry(B2.dual, t, j)));
      for (u64 h = 0; h < d; ++h) w[i * d + h] = acc.c[h];
    }
    auto cc = B1.dual.coords_of(w);
    if (!cc) throw math_error("cartesian_map: restriction functional not expressible");
    auto rr = unflatten_row(ring, *cc);
    for (std::size_t j = 0; j < d1; ++j) Gmap.at(t, j) = rr[j];
  }

  // lifts v_b with g(v_b) = generator b of M1^*
  Mat GE = expand_scalars(Gmap);
  std::vector<std::vector<GRElem>> lifts(d1);
  for (std::size_t b = 0; b < d1; ++b) {
    std::vector<u64> target(d1 * d, 0);
    target[b * d] = 1 % ring->mod;
    auto sol = solve_mod(GE, B1.dual.mod.rel_lattice, target);
    if (!sol) throw math_error("cartesian_map: dual restriction map is not surjective");
    lifts[b] = unflatten_row(ring, *sol);
  }

  // phi: wedge^{r-s}(M1^*) -> wedge^r(M2^*), then dualize
  auto idxB = wedge_index(d1, r - s);
  auto idxA = wedge_index(d2, r);
  std::vector<std::vector<u64>> phi_rows;  // per B: coefficients over idxA
  for (const auto& Bset : idxB) {
    std::vector<std::vector<GRElem>> vecs = hvecs;
    for (std::size_t b : Bset) vecs.push_back(lifts[b]);
    phi_rows.push_back(wedge_of_vectors(ring, vecs, d2));
  }

  // normalization from the determinant splitting: wedge of the adapted dual
  // functionals (quotient part first, then the F1 part) against the standard
  // dual basis
  RMat colmat(ring, s2, s2);
  for (std::size_t t = 0; t < s; ++t)
    for (std::size_t j = 0; j < s2; ++j) colmat.at(j, t) = Binv.at(j, s1 + t);
  for (std::size_t t = 0; t < s1; ++t)
    for (std::size_t j = 0; j < s2; ++j) colmat.at(j, s + t) = Binv.at(j, t);
  GRElem lambda = gr_det(colmat);
  // lambda is the wedge coefficient; the map must be scaled by its inverse
  Mat lamE = expand_elem(lambda);
  std::vector<u64> oneflat(d, 0);
  oneflat[0] = 1 % ring->mod;
  auto mu_c = solve_left(lamE, oneflat);
  if (!mu_c) throw math_error("cartesian_map: determinant splitting factor is not a unit");
  GRElem mu(ring, *mu_c);

  RMat action(ring, B2.bidual.mod.gens, B1.bidual.mod.gens);
  for (std::size_t hrow = 0; hrow < B2.bidual.mod.gens; ++hrow) {
    auto hvals = unflatten_row(ring, B2.bidual.gen_matrices.row(hrow));
    std::vector<u64> F(idxB.size() * d, 0);
    for (std::size_t b = 0; b < idxB.size(); ++b) {
      GRElem acc = GRElem::zero(ring);
      auto phiB = unflatten_row(ring, phi_rows[b]);
      for (std::size_t a = 0; a < idxA.size(); ++a)
        acc = gr_add(acc, gr_mul(phiB[a], hvals[a]));
      acc = gr_mul(acc, mu);
      for (u64 h = 0; h < d; ++h) F[b * d + h] = acc.c[h];
    }
    auto coords = B1.bidual.coords_of(F);
    if (!coords) throw math_error("cartesian_map: image functional not expressible");
    auto rr = unflatten_row(ring, *coords);
    for (std::size_t j = 0; j < action.cols; ++j) action.at(hrow, j) = rr[j];
  }
  ModuleMap f{B2.bidual.mod, B1.bidual.mod, action};
  f.check_well_defined();
  return f;
}

// ---- ideal invariants --------------------------------------------------------

IdealHandle fitting_ideal(const PresentedModule& M, std::size_t i) {
  const RingPtr& ring = M.ring;
  if (i >= M.gens) return unit_ideal(ring);
  std::size_t k = M.gens - i;
  if (M.relations.rows < k) return zero_ideal(ring);
  auto row_sets = wedge_index(M.relations.rows, k);
  auto col_sets = wedge_index(M.gens, k);
  std::vector<GRElem> minors;
  for (const auto& rs : row_sets)
    for (const auto& cs : col_sets) {
      std::vector<std::vector<GRElem>> m(k);
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) m[a].push_back(M.relations.at(rs[a], cs[b]));
      minors.push_back(det_of(ring, m));
    }
  return ideal_from_generators(ring, minors);
}

IdealHandle annihilator(const PresentedModule& M) {
  const RingPtr& ring = M.ring;
  u64 d = ring->dim();
  if (M.gens == 0) return unit_ideal(ring);
  Mat acc = Mat::identity(d, ring->p, ring->n);
  for (std::size_t j = 0; j < M.gens; ++j) {
    RMat embed(ring, 1, M.gens);
    embed.at(0, j) = GRElem::one(ring);
    Mat Kj = ker_into(expand_scalars(embed), M.rel_lattice);
    acc = lattice_intersect(acc, Kj);
  }
  return ideal_from_lattice(ring, acc);
}

IdealHandle characteristic_ideal(const PresentedModule& M) {
  const RingPtr& ring = M.ring;
  u64 d = ring->dim();
  std::size_t g = M.gens;
  if (g == 0) return unit_ideal(ring);

  // N := ker(R^g -> M) is the R-span of the relation rows
  Subquotient N = subquotient(ring, g, M.rel_lattice, empty_lattice(ring, g * d));
  std::size_t s = N.mod.gens;
  if (s == 0) return zero_ideal(ring);  // M free of positive rank

  HomModule D = dual_module(N.mod);
  std::size_t dg = D.mod.gens;

  // coordinates of e_j^* restricted to N, in terms of the dual generators
  std::vector<std::vector<GRElem>> cvecs;
  for (std::size_t j = 0; j < g; ++j) {
    std::vector<u64> w(s * d, 0);
    for (std::size_t i = 0; i < s; ++i)
      for (u64 h = 0; h < d; ++h) w[i * d + h] = N.gen_reps.at(i, j * d + h);
    auto cc = D.coords_of(w);
    if (!cc) throw math_error("characteristic_ideal: coordinate functional not expressible");
    cvecs.push_back(unflatten_row(ring, *cc));
  }

  // v0 = wedge of the g coordinate functionals inside wedge^g(N^*)
  std::vector<u64> v0 = wedge_of_vectors(ring, cvecs, dg);

  PresentedModule P = exterior_power(D.mod, g);
  HomModule Pd = hom_module(P, free_module(ring, 1));

  std::vector<GRElem> gens;
  for (std::size_t h = 0; h < Pd.mod.gens; ++h) {
    auto hvals = unflatten_row(ring, Pd.gen_matrices.row(h));
    auto v0r = unflatten_row(ring, v0);
    GRElem acc = GRElem::zero(ring);
    for (std::size_t a = 0; a < hvals.size(); ++a) acc = gr_add(acc, gr_mul(hvals[a], v0r[a]));
    gens.push_back(acc);
  }
  if (gens.empty()) return zero_ideal(ring);
  return ideal_from_generators(ring, gens);
}

// ---- submodules ---------------------------------------------------------------

SubmodulePresentation submodule_presentation(const PresentedModule& M,
                                             const std::vector<std::vector<u64>>& elements) {
  const RingPtr& ring = M.ring;
  u64 d = ring->dim();
  std::size_t s = elements.size();
  SubmodulePresentation out;
  if (s == 0) {
    out.sub = PresentedModule(ring, 0, RMat(ring, 0, 0));
    out.incl = ModuleMap{out.sub, M, RMat(ring, 0, M.gens)};
    return out;
  }
  Mat E(0, M.gens * d, ring->p, ring->n);
  for (const auto& e : elements) {
    if (e.size() != M.flat_dim()) throw usage_error("submodule element has wrong length");
    E.append_row(M.reduce(e));
  }
  RMat Smat = rmat_from_flat_rows(ring, E);
  Mat relK = ker_into(expand_scalars(Smat), M.rel_lattice);
  Mat relrows = r_generators(ring, relK, empty_lattice(ring, s * d));
  out.sub = PresentedModule(ring, s, rmat_from_flat_rows(ring, relrows));
  out.incl = ModuleMap{out.sub, M, Smat};
  out.incl.check_well_defined();
  return out;
}

// ---- base change ----------------------------------------------------------------

void RingProjection::validate() const {
  if (src->p != tgt->p) throw usage_error("ring projection must preserve p");
  if (tgt->n > src->n) throw usage_error("ring projection cannot increase the exponent");
  if (group_map.size() != src->dim()) throw usage_error("group map has wrong size");
  std::vector<bool> hit(tgt->dim(), false);
  for (u64 g = 0; g < src->dim(); ++g) {
    if (group_map[g] >= tgt->dim()) throw usage_error("group map out of range");
    hit[group_map[g]] = true;
    for (u64 h = 0; h < src->dim(); ++h)
      if (group_map[src->group.mul(g, h)] != tgt->group.mul(group_map[g], group_map[h]))
        throw usage_error("group map is not a homomorphism");
  }
  for (bool b : hit)
    if (!b) throw usage_error("group map is not surjective");
}

GRElem RingProjection::push(const GRElem& a) const {
  GRElem r(tgt);
  for (u64 g = 0; g < src->dim(); ++g)
    r.c[group_map[g]] = (r.c[group_map[g]] + a.c[g]) % tgt->mod;
  return r;
}

RMat RingProjection::push(const RMat& m) const {
  RMat r(tgt, m.rows, m.cols);
  for (std::size_t i = 0; i < m.e.size(); ++i) r.e[i] = push(m.e[i]);
  return r;
}

PresentedModule base_change(const PresentedModule& M, const RingProjection& proj) {
  proj.validate();
  if (!(*proj.src == *M.ring)) throw usage_error("base_change: module not over the source ring");
  return PresentedModule(proj.tgt, M.gens, proj.push(M.relations));
}

// ---- kernel presentations ---------------------------------------------------

Subquotient kernel_module(const RingPtr& ring, const RMat& alpha) {
  Mat K = left_kernel(expand_scalars(alpha));
  return subquotient(ring, alpha.rows, K, empty_lattice(ring, alpha.rows * ring->dim()));
}

Mat bidual_kernel_lattice(const RingPtr& ring, const RMat& alpha, std::size_t r) {
  u64 d = ring->dim();
  std::size_t a = alpha.rows, b = alpha.cols;
  auto idx_r = wedge_index(a, r);
  auto idx_r1 = wedge_index(a, r - 1);
  if (r == 0) throw usage_error("bidual_kernel_lattice: r must be >= 1");

  // I = im(alpha), generated by the rows of alpha with syzygy relations
  Mat syz = r_generators(ring, left_kernel(expand_scalars(alpha)), empty_lattice(ring, a * d));
  RMat syzR = rmat_from_flat_rows(ring, syz);

  // tensor module I (x) wedge^{r-1}(R^a): generators indexed by (i, T)
  std::size_t tg = a * idx_r1.size();
  RMat trel(ring, syzR.rows * idx_r1.size(), tg);
  for (std::size_t q = 0; q < syzR.rows; ++q)
    for (std::size_t t = 0; t < idx_r1.size(); ++t)
      for (std::size_t i = 0; i < a; ++i)
        trel.at(q * idx_r1.size() + t, i * idx_r1.size() + t) = syzR.at(q, i);
  PresentedModule T(ring, tg, trel);

  // derivation map wedge^r(R^a) -> I (x) wedge^{r-1}(R^a)
  RMat delta(ring, idx_r.size(), tg);
  for (std::size_t sI = 0; sI < idx_r.size(); ++sI) {
    const auto& S = idx_r[sI];
    for (std::size_t pos = 0; pos < S.size(); ++pos) {
      std::size_t i = S[pos];
      std::vector<std::size_t> rest;
      for (std::size_t x : S)
        if (x != i) rest.push_back(x);
      std::size_t tpos = subset_rank(rest, a);
      GRElem one = GRElem::one(ring);
      GRElem val = (pos % 2 == 0) ? one : gr_neg(one);
      delta.at(sI, i * idx_r1.size() + tpos) = gr_add(delta.at(sI, i * idx_r1.size() + tpos), val);
    }
  }
  return ker_into(expand_scalars(delta), T.rel_lattice);
}

Mat bidual_image_lattice(const RingPtr& ring, const RMat& alpha, std::size_t r) {
  u64 d = ring->dim();
  std::size_t a = alpha.rows;
  Subquotient Msq = kernel_module(ring, alpha);
  std::size_t s = Msq.mod.gens;
  auto idx = wedge_index(a, r);
  if (s == 0) return Mat(0, idx.size() * d, ring->p, ring->n);
  BidualModule B = exterior_bidual(Msq.mod, r);
  std::size_t dg = B.dual.mod.gens;

  // coordinates of e_j^* restricted to M
  std::vector<std::vector<GRElem>> cvecs;
  for (std::size_t j = 0; j < a; ++j) {
    std::vector<u64> w(s * d, 0);
    for (std::size_t i = 0; i < s; ++i)
      for (u64 h = 0; h < d; ++h) w[i * d + h] = Msq.gen_reps.at(i, j * d + h);
    auto cc = B.dual.coords_of(w);
    if (!cc) throw math_error("bidual_image_lattice: coordinate functional not expressible");
    cvecs.push_back(unflatten_row(ring, *cc));
  }

  // wedge^r of the surjection (R^a)^* -> M^* on each basis wedge
  std::vector<std::vector<GRElem>> wedges;  // per S in idx: coords over wedge^r(M^*) gens
  for (const auto& S : idx) {
    std::vector<std::vector<GRElem>> vv;
    for (std::size_t j : S) vv.push_back(cvecs[j]);
    wedges.push_back(unflatten_row(ring, wedge_of_vectors(ring, vv, dg)));
  }

  // each bidual generator h maps to the free element (S |-> h(wedge_S))
  Mat img(0, idx.size() * d, ring->p, ring->n);
  for (std::size_t h = 0; h < B.bidual.mod.gens; ++h) {
    auto hvals = unflatten_row(ring, B.bidual.gen_matrices.row(h));
    std::vector<u64> row(idx.size() * d, 0);
    for (std::size_t sI = 0; sI < idx.size(); ++sI) {
      GRElem acc = GRElem::zero(ring);
      for (std::size_t t = 0; t < hvals.size(); ++t)
        acc = gr_add(acc, gr_mul(wedges[sI][t], hvals[t]));
      for (u64 hh = 0; hh < d; ++hh) row[sI * d + hh] = acc.c[hh];
    }
    img.append_row(row);
  }
  // close under the group action and canonicalize
  Mat closed(0, idx.size() * d, ring->p, ring->n);
  for (std::size_t i = 0; i < img.rows; ++i) {
    Mat orb = orbit_rows(ring, img.row(i));
    for (std::size_t k = 0; k < orb.rows; ++k) closed.append_row(orb.row(k));
  }
  return howell_form(closed);
}

}  // namespace esk
