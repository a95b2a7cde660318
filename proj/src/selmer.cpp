#include "eskit/selmer.hpp"

#include <algorithm>

namespace esk {

namespace {

std::size_t binom(std::size_t a, std::size_t b) {
  if (b > a) return 0;
  std::size_t r = 1;
  for (std::size_t i = 0; i < b; ++i) r = r * (a - i) / (i + 1);
  return r;
}

// position of an ascending subset S in wedge_index(m, |S|) lex order
std::size_t subset_pos(const std::vector<std::size_t>& S, std::size_t m) {
  std::size_t r = S.size(), pos = 0, prev = 0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t v = prev; v < S[i]; ++v) pos += binom(m - v - 1, r - i - 1);
    prev = S[i] + 1;
  }
  return pos;
}

std::vector<std::size_t> mask_indices(u64 mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; mask; ++i, mask >>= 1)
    if (mask & 1) out.push_back(i);
  return out;
}

bool list_parity(const std::vector<std::size_t>& v) {
  bool odd = false;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (v[i] > v[j]) odd = !odd;
  return odd;
}

// the functional row as a scalar matrix (m|G|) x |G|
Mat func_matrix(const std::vector<GRElem>& row) {
  Mat M = expand_elem(row[0]);
  for (std::size_t j = 1; j < row.size(); ++j) M = vstack(M, expand_elem(row[j]));
  return M;
}

Mat selmer_lattice(const SelmerDatum& d, u64 mask) {
  return howell_form(expand_row_lattice(d.selmer[mask].incl.action));
}

bool mat_is_zero(const Mat& M) {
  for (u64 x : M.a)
    if (x) return false;
  return true;
}

std::vector<GRElem> wedge1_to_row(const WedgeElem& w) {
  if (w.k != 1) throw usage_error("expected a degree-one exterior vector");
  return w.c;
}

std::vector<GRElem> row_scale(const std::vector<GRElem>& v, const GRElem& s) {
  std::vector<GRElem> out = v;
  for (auto& x : out) x = gr_mul(x, s);
  return out;
}

std::vector<GRElem> row_add(const std::vector<GRElem>& a, const std::vector<GRElem>& b) {
  std::vector<GRElem> out = a;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = gr_add(out[j], b[j]);
  return out;
}

void require_rank0(const StarkSystem& sys) {
  if (sys.rank != 0) throw usage_error("a rank-0 Stark system is required");
}

std::vector<GRElem> coord_row(const SelmerDatum& d, std::size_t j) {
  std::vector<GRElem> row(d.ambient_rank(), GRElem(d.ring));
  row[j] = GRElem::one(d.ring);
  return row;
}

}  // namespace

// ---- exterior coordinate vectors ---------------------------------------------

WedgeElem::WedgeElem(RingPtr r, std::size_t m_, std::size_t k_)
    : ring(std::move(r)), m(m_), k(k_), c(binom(m_, k_), GRElem(ring)) {}

bool WedgeElem::is_zero() const {
  for (const auto& x : c)
    if (!x.is_zero()) return false;
  return true;
}

bool WedgeElem::operator==(const WedgeElem& o) const {
  return m == o.m && k == o.k && c == o.c;
}

WedgeElem wedge_add(const WedgeElem& a, const WedgeElem& b) {
  if (a.m != b.m || a.k != b.k) throw usage_error("exterior degree mismatch");
  WedgeElem out = a;
  for (std::size_t i = 0; i < out.c.size(); ++i) out.c[i] = gr_add(out.c[i], b.c[i]);
  return out;
}

WedgeElem wedge_sub(const WedgeElem& a, const WedgeElem& b) {
  if (a.m != b.m || a.k != b.k) throw usage_error("exterior degree mismatch");
  WedgeElem out = a;
  for (std::size_t i = 0; i < out.c.size(); ++i) out.c[i] = gr_sub(out.c[i], b.c[i]);
  return out;
}

WedgeElem wedge_scale(const WedgeElem& a, const GRElem& s) {
  WedgeElem out = a;
  for (auto& x : out.c) x = gr_mul(x, s);
  return out;
}

namespace {

// common contraction: sign counts elements of S' on the chosen side of j
WedgeElem contract_side(const WedgeElem& a, const std::vector<GRElem>& f, bool last) {
  if (a.k == 0) throw usage_error("cannot contract a degree-zero vector");
  if (f.size() != a.m) throw usage_error("functional length mismatch");
  WedgeElem out(a.ring, a.m, a.k - 1);
  auto idx = wedge_index(a.m, a.k - 1);
  for (std::size_t s = 0; s < idx.size(); ++s) {
    GRElem acc(a.ring);
    for (std::size_t j = 0; j < a.m; ++j) {
      if (std::binary_search(idx[s].begin(), idx[s].end(), j)) continue;
      if (f[j].is_zero()) continue;
      std::vector<std::size_t> S = idx[s];
      S.insert(std::lower_bound(S.begin(), S.end(), j), j);
      std::size_t side = 0;
      for (std::size_t v : idx[s])
        if (last ? v > j : v < j) ++side;
      GRElem term = gr_mul(f[j], a.c[subset_pos(S, a.m)]);
      acc = (side & 1) ? gr_sub(acc, term) : gr_add(acc, term);
    }
    out.c[s] = acc;
  }
  return out;
}

}  // namespace

WedgeElem contract_last(const WedgeElem& a, const std::vector<GRElem>& f) {
  return contract_side(a, f, true);
}

WedgeElem contract_first(const WedgeElem& a, const std::vector<GRElem>& f) {
  return contract_side(a, f, false);
}

// ---- datum construction --------------------------------------------------------

const GRElem& SelmerDatum::planted_divisor(std::size_t qi) const {
  return div_rows.at(qi).at(transverse_index(qi));
}

GRElem SelmerDatum::apply_row(const std::vector<GRElem>& row,
                              const std::vector<GRElem>& x) const {
  GRElem acc(ring);
  for (std::size_t j = 0; j < row.size(); ++j) acc = gr_add(acc, gr_mul(row[j], x[j]));
  return acc;
}

namespace {

SelmerDatum build_datum(const RingPtr& ring, std::vector<PrimeLabel> labels,
                        unsigned core_rank, const std::vector<GRElem>& divisors,
                        const std::vector<std::vector<GRElem>>& phi_core) {
  std::sort(labels.begin(), labels.end(),
            [](const PrimeLabel& a, const PrimeLabel& b) { return a.q < b.q; });
  for (std::size_t i = 0; i + 1 < labels.size(); ++i)
    if (labels[i].q == labels[i + 1].q) throw usage_error("duplicate auxiliary label");
  if (divisors.size() != labels.size())
    throw usage_error("one planted divisor per label is required");

  SelmerDatum d;
  d.ring = ring;
  d.labels = std::move(labels);
  d.core_rank = core_rank;
  std::size_t N = d.labels.size();
  std::size_t m = d.ambient_rank();

  for (std::size_t qi = 0; qi < N; ++qi) {
    std::vector<GRElem> div(m, GRElem(ring)), phi(m, GRElem(ring));
    div[d.transverse_index(qi)] = divisors[qi];
    phi[d.transverse_index(qi)] = GRElem::one(ring);
    if (!phi_core.empty()) {
      if (phi_core.size() != N || phi_core[qi].size() != core_rank)
        throw usage_error("core mixing rows must match labels and core rank");
      for (unsigned i = 0; i < core_rank; ++i) phi[i] = phi_core[qi][i];
    }
    d.div_rows.push_back(std::move(div));
    d.phi_rows.push_back(std::move(phi));
  }

  // annihilator generators of each planted divisor
  Mat empty(0, ring->dim(), ring->p, ring->n);
  std::vector<std::vector<GRElem>> ann(N);
  for (std::size_t qi = 0; qi < N; ++qi) {
    Mat K = left_kernel(expand_elem(divisors[qi]));
    Mat gens = r_generators(ring, K, empty);
    for (std::size_t i = 0; i < gens.rows; ++i)
      ann[qi].push_back(unflatten_row(ring, gens.row(i))[0]);
  }

  PresentedModule ambient = free_module(ring, m);
  for (u64 mask = 0; mask < (u64(1) << N); ++mask) {
    std::vector<std::vector<u64>> elems;
    for (unsigned i = 0; i < core_rank; ++i) elems.push_back(ambient.gen_elem(i));
    for (std::size_t qi = 0; qi < N; ++qi) {
      if (mask & (u64(1) << qi)) {
        elems.push_back(ambient.gen_elem(d.transverse_index(qi)));
      } else {
        for (const auto& a : ann[qi]) {
          std::vector<GRElem> row(m, GRElem(ring));
          row[d.transverse_index(qi)] = a;
          elems.push_back(flatten_row(row));
        }
      }
    }
    d.selmer.push_back(submodule_presentation(ambient, elems));
  }
  return d;
}

}  // namespace

SelmerDatum free_selmer_datum(const RingPtr& ring, std::vector<PrimeLabel> labels,
                              unsigned core_rank) {
  std::vector<GRElem> ones(labels.size(), GRElem::one(ring));
  return build_datum(ring, std::move(labels), core_rank, ones, {});
}

SelmerDatum synthetic_selmer_datum(const RingPtr& ring, std::vector<PrimeLabel> labels,
                                   unsigned core_rank, const std::vector<GRElem>& divisors,
                                   const std::vector<std::vector<GRElem>>& phi_core) {
  return build_datum(ring, std::move(labels), core_rank, divisors, phi_core);
}

// ---- validation ------------------------------------------------------------------

SelmerReport validate_selmer_datum(const SelmerDatum& d) {
  SelmerReport rep;
  std::size_t N = d.labels.size();
  auto flag = [&rep](std::string msg) {
    rep.valid = false;
    rep.violations.push_back(std::move(msg));
  };

  if (d.selmer.size() != (u64(1) << N) || d.phi_rows.size() != N || d.div_rows.size() != N) {
    flag("datum shape mismatch");
    return rep;
  }

  std::vector<Mat> div_mats, ker_mats;
  for (std::size_t qi = 0; qi < N; ++qi) {
    div_mats.push_back(func_matrix(d.div_rows[qi]));
    ker_mats.push_back(left_kernel(div_mats.back()));
  }

  for (u64 mask = 0; mask < d.selmer.size(); ++mask) {
    Mat K = selmer_lattice(d, mask);
    for (std::size_t qi = 0; qi < N; ++qi) {
      u64 bit = u64(1) << qi;
      if (mask & bit) {
        // cartesian condition on the covering pair: H(n/q) is the divisor
        // kernel inside H(n)
        Mat pullback = howell_form(lattice_intersect(K, ker_mats[qi]));
        if (!(pullback == selmer_lattice(d, mask & ~bit)))
          flag("covering square at label " + d.labels[qi].name + ", conductor mask " +
               std::to_string(mask) + " is not cartesian");
      } else {
        // divisor vanishing off the conductor
        if (!mat_is_zero(mat_mul(K, div_mats[qi])))
          flag("divisor at label " + d.labels[qi].name +
               " does not vanish on the Selmer module of mask " + std::to_string(mask));
      }
    }
  }

  // finite functionals on the full-pool Selmer module: jointly surjective,
  // and an isomorphism when the core rank is zero
  if (N > 0) {
    Mat Phi = func_matrix(d.phi_rows[0]);
    for (std::size_t qi = 1; qi < N; ++qi) Phi = hstack(Phi, func_matrix(d.phi_rows[qi]));
    Mat Ktop = selmer_lattice(d, d.selmer.size() - 1);
    Mat image = howell_form(mat_mul(Ktop, Phi));
    Mat full = howell_form(Mat::identity(N * d.ring->dim(), d.ring->p, d.ring->n));
    if (!(image == full))
      flag("finite functionals are not jointly surjective on the full-pool module");
    if (d.core_rank == 0) {
      Mat ker = lattice_intersect(Ktop, left_kernel(Phi));
      if (span_length(howell_form(ker)) != 0)
        flag("finite functionals have a kernel on the full-pool module at core rank 0");
    }
  }

  rep.notes.push_back(
      "local finite and transverse quotients are free of rank 1 by construction");
  return rep;
}

// ---- Stark systems ------------------------------------------------------------------

StarkSystem planted_stark_system(const SelmerDatum& d, unsigned rank) {
  if (rank > d.core_rank) throw usage_error("system rank exceeds the core rank");
  std::size_t N = d.labels.size(), m = d.ambient_rank();
  for (std::size_t qi = 0; qi < N; ++qi)
    for (std::size_t j = 0; j < m; ++j)
      if (j != d.transverse_index(qi) && !d.div_rows[qi][j].is_zero())
        throw usage_error("datum has no planted system: divisor rows are not pure");

  StarkSystem sys;
  sys.rank = rank;
  for (u64 mask = 0; mask < (u64(1) << N); ++mask) {
    std::size_t k = rank + static_cast<std::size_t>(__builtin_popcountll(mask));
    WedgeElem e(d.ring, m, k);
    std::vector<std::size_t> S;
    for (unsigned i = 0; i < rank; ++i) S.push_back(i);
    GRElem coef = GRElem::one(d.ring);
    for (std::size_t qi = 0; qi < N; ++qi) {
      if (mask & (u64(1) << qi))
        S.push_back(d.transverse_index(qi));
      else
        coef = gr_mul(coef, d.planted_divisor(qi));
    }
    e.c[subset_pos(S, m)] = coef;
    sys.eps.push_back(std::move(e));
  }
  return sys;
}

WedgeElem stark_transition_apply(const SelmerDatum& d, u64 mmask, u64 nmask,
                                 const WedgeElem& x) {
  if ((mmask & nmask) != nmask) throw usage_error("transition requires divisibility");
  WedgeElem out = x;
  u64 cur = mmask;
  auto diff = mask_indices(mmask & ~nmask);
  for (auto it = diff.rbegin(); it != diff.rend(); ++it) {
    std::size_t qi = *it;
    std::size_t larger = 0;
    for (std::size_t qj = qi + 1; qj < d.labels.size(); ++qj)
      if (cur & (u64(1) << qj)) ++larger;
    out = contract_last(out, d.div_rows[qi]);
    if (larger & 1)
      for (auto& v : out.c) v = gr_neg(v);
    cur &= ~(u64(1) << qi);
  }
  return out;
}

ModuleMap stark_transition(const SelmerDatum& d, u64 mmask, u64 nmask, unsigned rank) {
  if ((mmask & nmask) != nmask) throw usage_error("transition requires divisibility");
  std::size_t m = d.ambient_rank();
  std::size_t ks = rank + static_cast<std::size_t>(__builtin_popcountll(mmask));
  std::size_t kt = rank + static_cast<std::size_t>(__builtin_popcountll(nmask));
  if (ks > m) throw usage_error("exterior degree exceeds the ambient rank");
  std::size_t ds = binom(m, ks), dt = binom(m, kt);
  RMat action(d.ring, ds, dt);
  for (std::size_t i = 0; i < ds; ++i) {
    WedgeElem b(d.ring, m, ks);
    b.c[i] = GRElem::one(d.ring);
    WedgeElem img = stark_transition_apply(d, mmask, nmask, b);
    for (std::size_t j = 0; j < dt; ++j) action.at(i, j) = img.c[j];
  }
  ModuleMap f{free_module(d.ring, ds), free_module(d.ring, dt), action};
  return f;
}

SelmerReport stark_system_check(const SelmerDatum& d, const StarkSystem& sys) {
  SelmerReport rep;
  std::size_t N = d.labels.size();
  for (u64 mask = 1; mask < (u64(1) << N); ++mask)
    for (std::size_t qi = 0; qi < N; ++qi) {
      u64 bit = u64(1) << qi;
      if (!(mask & bit)) continue;
      WedgeElem got = stark_transition_apply(d, mask, mask & ~bit, sys.eps[mask]);
      if (!(got == sys.eps[mask & ~bit])) {
        rep.valid = false;
        rep.violations.push_back("transition from mask " + std::to_string(mask) +
                                 " at label " + d.labels[qi].name + " is incompatible");
      }
    }
  return rep;
}

StarkSolveReport stark_solve(const SelmerDatum& d, unsigned rank) {
  std::size_t N = d.labels.size(), m = d.ambient_rank();
  u64 masks = u64(1) << N;
  std::vector<std::size_t> offs(masks + 1, 0);
  for (u64 mask = 0; mask < masks; ++mask) {
    std::size_t k = rank + static_cast<std::size_t>(__builtin_popcountll(mask));
    offs[mask + 1] = offs[mask] + binom(m, k);
  }
  std::size_t T = offs[masks];

  // equations: transition(eps_m) - eps_{m/q} = 0 over all covering pairs
  std::size_t cols = 0;
  std::vector<std::pair<u64, std::size_t>> pairs;
  for (u64 mask = 1; mask < masks; ++mask)
    for (std::size_t qi = 0; qi < N; ++qi)
      if (mask & (u64(1) << qi)) {
        pairs.emplace_back(mask, qi);
        cols += offs[(mask & ~(u64(1) << qi)) + 1] - offs[mask & ~(u64(1) << qi)];
      }
  RMat E(d.ring, T, cols);
  std::size_t colofs = 0;
  GRElem minus_one = gr_neg(GRElem::one(d.ring));
  for (auto [mask, qi] : pairs) {
    u64 nmask = mask & ~(u64(1) << qi);
    ModuleMap t = stark_transition(d, mask, nmask, rank);
    std::size_t dt = t.action.cols;
    for (std::size_t i = 0; i < t.action.rows; ++i)
      for (std::size_t j = 0; j < dt; ++j) E.at(offs[mask] + i, colofs + j) = t.action.at(i, j);
    for (std::size_t j = 0; j < dt; ++j) E.at(offs[nmask] + j, colofs + j) = minus_one;
    colofs += dt;
  }

  StarkSolveReport rep;
  Mat L = cols ? left_kernel(expand_scalars(E))
               : howell_form(Mat::identity(T * d.ring->dim(), d.ring->p, d.ring->n));
  rep.solution_lattice = L;
  rep.length = span_length(L);

  unsigned free_len = d.ring->n * static_cast<unsigned>(d.ring->dim());
  for (std::size_t i = 0; i < L.rows && !rep.free_rank_one; ++i) {
    std::vector<GRElem> v = unflatten_row(d.ring, L.row(i));
    RMat row(d.ring, 1, v.size());
    for (std::size_t j = 0; j < v.size(); ++j) row.at(0, j) = v[j];
    Mat cyc = howell_form(expand_row_lattice(row));
    if (cyc == L && rep.length == free_len) {
      rep.free_rank_one = true;
      StarkSystem sys;
      sys.rank = rank;
      for (u64 mask = 0; mask < masks; ++mask) {
        std::size_t k = rank + static_cast<std::size_t>(__builtin_popcountll(mask));
        WedgeElem e(d.ring, m, k);
        for (std::size_t j = 0; j < e.c.size(); ++j) e.c[j] = v[offs[mask] + j];
        sys.eps.push_back(std::move(e));
      }
      rep.basis = std::move(sys);
    }
  }
  return rep;
}

StarkSystem rank_reduction(const SelmerDatum& d, const StarkSystem& sys) {
  unsigned r = sys.rank;
  if (r > d.core_rank)
    throw usage_error("rank reduction needs the core identification up to the system rank");
  StarkSystem out;
  out.rank = 0;
  for (u64 mask = 0; mask < sys.eps.size(); ++mask) {
    WedgeElem x = sys.eps[mask];
    for (unsigned i = r; i-- > 0;) x = contract_last(x, coord_row(d, i));
    unsigned nu = static_cast<unsigned>(__builtin_popcountll(mask));
    if ((r * nu) & 1)
      for (auto& v : x.c) v = gr_neg(v);
    out.eps.push_back(std::move(x));
  }
  return out;
}

WedgeElem regulator(const SelmerDatum& d, const StarkSystem& sys, u64 nmask) {
  WedgeElem x = sys.eps.at(nmask);
  auto qs = mask_indices(nmask);
  for (auto it = qs.rbegin(); it != qs.rend(); ++it) x = contract_last(x, d.phi_rows[*it]);
  if (qs.size() & 1)
    for (auto& v : x.c) v = gr_neg(v);
  return x;
}

namespace {

void check_sigma_args(const SelmerDatum& d, const std::vector<std::size_t>& nn,
                      const std::vector<std::size_t>& sigma) {
  if (sigma.size() != d.labels.size()) throw usage_error("sigma must map the label set");
  for (std::size_t s : sigma)
    if (s >= d.labels.size()) throw usage_error("sigma image out of range");
  std::vector<std::size_t> sorted = nn;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw usage_error("conductor labels must be distinct");
  for (std::size_t i : nn)
    if (i >= d.labels.size()) throw usage_error("conductor label out of range");
}

WedgeElem kappa_core(const SelmerDatum& d, const StarkSystem& sys,
                     const std::vector<std::size_t>& order, u64 mask,
                     const std::vector<std::size_t>& nn,
                     const std::vector<std::size_t>& sigma) {
  WedgeElem x = sys.eps.at(mask);
  for (std::size_t i : nn) x = contract_first(x, d.phi_rows[sigma[i]]);
  bool neg = (nn.size() & 1) != 0;
  if (list_parity(order)) neg = !neg;
  if (neg)
    for (auto& v : x.c) v = gr_neg(v);
  return x;
}

}  // namespace

WedgeElem kappa_sigma(const SelmerDatum& d, const StarkSystem& sys,
                      const std::vector<std::size_t>& nn, std::size_t q,
                      const std::vector<std::size_t>& sigma) {
  require_rank0(sys);
  check_sigma_args(d, nn, sigma);
  if (q >= d.labels.size()) throw usage_error("label q out of range");
  u64 mask = u64(1) << q;
  for (std::size_t i : nn) {
    if (i == q) throw usage_error("q must not divide the conductor");
    mask |= u64(1) << i;
  }
  std::vector<std::size_t> order = nn;
  order.push_back(q);
  return kappa_core(d, sys, order, mask, nn, sigma);
}

GRElem delta_sigma(const SelmerDatum& d, const StarkSystem& sys,
                   const std::vector<std::size_t>& nn, const std::vector<std::size_t>& sigma) {
  require_rank0(sys);
  check_sigma_args(d, nn, sigma);
  u64 mask = 0;
  for (std::size_t i : nn) mask |= u64(1) << i;
  WedgeElem x = kappa_core(d, sys, nn, mask, nn, sigma);
  return x.c.at(0);
}

SelmerReport check_coh_rel(const SelmerDatum& d, const StarkSystem& sys) {
  require_rank0(sys);
  SelmerReport rep;
  std::size_t N = d.labels.size();
  auto flag = [&rep](std::string msg) {
    rep.valid = false;
    rep.violations.push_back(std::move(msg));
  };

  // all self-maps of the label set when feasible, otherwise the identity
  std::vector<std::vector<std::size_t>> sigmas;
  double total = 1;
  for (std::size_t i = 0; i < N; ++i) total *= static_cast<double>(N);
  if (N > 0 && total <= 256) {
    std::vector<std::size_t> cur(N, 0);
    for (;;) {
      sigmas.push_back(cur);
      std::size_t k = 0;
      while (k < N && cur[k] + 1 == N) cur[k++] = 0;
      if (k == N) break;
      ++cur[k];
    }
  } else {
    std::vector<std::size_t> id(N);
    for (std::size_t i = 0; i < N; ++i) id[i] = i;
    sigmas.push_back(id);
  }

  for (const auto& sigma : sigmas)
    for (u64 nmask = 0; nmask < (u64(1) << N); ++nmask) {
      auto nn = mask_indices(nmask);
      for (std::size_t q = 0; q < N; ++q) {
        if (nmask & (u64(1) << q)) continue;
        if ((nmask | (u64(1) << q)) >= sys.eps.size()) continue;
        auto kappa = wedge1_to_row(kappa_sigma(d, sys, nn, q, sigma));
        auto where = [&](const char* rel) {
          return std::string(rel) + " at conductor mask " + std::to_string(nmask) +
                 ", label " + d.labels[q].name;
        };
        // (ii) div_q(kappa) = delta_n
        if (!(d.apply_row(d.div_rows[q], kappa) == delta_sigma(d, sys, nn, sigma)))
          flag(where("divisor-at-q relation"));
        // (iv) phi_{sigma(q)}(kappa) = -delta_{nq}
        std::vector<std::size_t> nnq = mask_indices(nmask | (u64(1) << q));
        if (!(d.apply_row(d.phi_rows[sigma[q]], kappa) ==
              gr_neg(delta_sigma(d, sys, nnq, sigma))))
          flag(where("transverse-at-q relation"));
        for (std::size_t ri : nn) {
          std::vector<std::size_t> sub;
          for (std::size_t i : nn)
            if (i != ri) sub.push_back(i);
          auto kappa2 = wedge1_to_row(kappa_sigma(d, sys, sub, q, sigma));
          // (i) div_r(kappa_n) = phi_{sigma(r)}(kappa_{n/r})
          if (!(d.apply_row(d.div_rows[ri], kappa) ==
                d.apply_row(d.phi_rows[sigma[ri]], kappa2)))
            flag(where("divisor-descent relation"));
          // (iii) phi_{sigma(r)}(kappa_n) = 0
          if (!d.apply_row(d.phi_rows[sigma[ri]], kappa).is_zero())
            flag(where("transverse-vanishing relation"));
        }
      }
    }
  return rep;
}

std::optional<std::vector<GRElem>> transverse_unit(const SelmerDatum& d, std::size_t q,
                                                   std::size_t r) {
  if (q >= d.labels.size() || r >= d.labels.size() || q == r)
    throw usage_error("distinct labels q and r are required");
  u64 mask = (u64(1) << q) | (u64(1) << r);
  Mat K = selmer_lattice(d, mask);
  Mat vals = mat_mul(K, func_matrix(d.div_rows[q]));
  std::vector<u64> one(d.ring->dim(), 0);
  one[0] = 1 % d.ring->mod;
  auto x = solve_left(vals, one);
  if (!x) return std::nullopt;
  std::vector<u64> flat(K.cols, 0);
  for (std::size_t i = 0; i < K.rows; ++i)
    for (std::size_t j = 0; j < K.cols; ++j)
      flat[j] = addmod(flat[j], mulmod((*x)[i], K.at(i, j), d.ring->mod), d.ring->mod);
  return unflatten_row(d.ring, flat);
}

SelmerReport tilde_kappa_identity_check(const SelmerDatum& d, const StarkSystem& sys,
                                        std::size_t q, std::size_t r,
                                        const std::optional<std::vector<GRElem>>& z,
                                        const std::vector<std::size_t>& sigma) {
  require_rank0(sys);
  SelmerReport rep;
  if (!z) {
    rep.notes.push_back("no transverse unit at label " + d.labels.at(q).name +
                        "; the identity is unverifiable on this datum");
    return rep;
  }
  if (!(d.apply_row(d.div_rows.at(q), *z) == GRElem::one(d.ring)))
    throw usage_error("z must map to 1 under the divisor at q");
  for (std::size_t f = 0; f < d.labels.size(); ++f)
    if (f != q && f != r && !d.apply_row(d.div_rows[f], *z).is_zero()) {
      rep.valid = false;
      rep.violations.push_back("z has a divisor component at label " + d.labels[f].name);
      return rep;
    }

  std::size_t N = d.labels.size();
  GRElem div_r_z = d.apply_row(d.div_rows.at(r), *z);
  for (u64 mm = 0; mm < (u64(1) << N); ++mm) {
    if (mm & ((u64(1) << q) | (u64(1) << r))) continue;
    auto nn = mask_indices(mm);
    auto kq = wedge1_to_row(kappa_sigma(d, sys, nn, q, sigma));
    auto kr = wedge1_to_row(kappa_sigma(d, sys, nn, r, sigma));
    GRElem delta_m = delta_sigma(d, sys, nn, sigma);
    std::vector<GRElem> tilde = row_add(row_scale(kr, gr_neg(div_r_z)),
                                        row_scale(*z, delta_m));
    for (std::size_t si : nn) {
      std::vector<std::size_t> sub;
      for (std::size_t i : nn)
        if (i != si) sub.push_back(i);
      auto ks = wedge1_to_row(kappa_sigma(d, sys, sub, si, sigma));
      tilde = row_add(tilde, row_scale(ks, d.apply_row(d.phi_rows[sigma.at(si)], *z)));
    }
    for (std::size_t f = 0; f < N; ++f)
      if (!(d.apply_row(d.div_rows[f], tilde) == d.apply_row(d.div_rows[f], kq))) {
        rep.valid = false;
        rep.violations.push_back("divisor compatibility at label " + d.labels[f].name +
                                 " fails for conductor mask " + std::to_string(mm));
      }
  }
  return rep;
}

IdealHandle stark_ideals(const SelmerDatum& d, const StarkSystem& sys, unsigned i) {
  require_rank0(sys);
  std::vector<GRElem> gens{GRElem(d.ring)};
  for (u64 mask = 0; mask < sys.eps.size(); ++mask) {
    if (static_cast<unsigned>(__builtin_popcountll(mask)) != i) continue;
    for (const auto& c : sys.eps[mask].c) gens.push_back(c);
  }
  return ideal_from_generators(d.ring, gens);
}

}  // namespace esk
