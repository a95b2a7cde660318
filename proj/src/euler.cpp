#include "eskit/euler.hpp"

#include <algorithm>
#include <numeric>

namespace esk {

namespace {

// index of q among the level's auxiliary primes
std::size_t q_index(const LevelRing& level, u64 q) {
  for (std::size_t i = 0; i < level.qs.size(); ++i)
    if (level.qs[i] == q) return i;
  throw usage_error("auxiliary prime is not part of the level");
}

// group index of the canonical generator of the (1+qi)-th factor
u64 factor_stride(const LevelRing& level, std::size_t qi) {
  u64 stride = 1;
  for (std::size_t k = 0; k < 1 + qi; ++k) stride *= level.ring->group.factors[k];
  return stride;
}

// group index of sigma_q^k
u64 sigma_power(const LevelRing& level, std::size_t qi, const PrimeLabel& lab, u64 k) {
  u64 gq = level.gq_orders[qi];
  return factor_stride(level, qi) * mulmod(k % gq, lab.sigma_gen % gq, gq);
}

const PrimeLabel& label_of(const std::vector<PrimeLabel>& pool, u64 q) {
  for (const auto& lab : pool)
    if (lab.q == q) return lab;
  throw usage_error("prime is missing from the label pool");
}

std::size_t find_level(const EulerSystemWindow& w, const std::vector<u64>& qs) {
  for (std::size_t i = 0; i < w.levels.size(); ++i)
    if (w.levels[i].qs == qs) return i;
  throw usage_error("level is missing from the window");
}

std::vector<u64> sorted_conductor(const std::vector<u64>& nn) {
  std::vector<u64> qs = nn;
  std::sort(qs.begin(), qs.end());
  if (std::adjacent_find(qs.begin(), qs.end()) != qs.end())
    throw usage_error("conductor primes must be distinct");
  return qs;
}

}  // namespace

PrimeLabel make_prime_label(u64 q, u64 p, std::string name) {
  if (!is_prime(q)) throw usage_error("auxiliary label is not prime");
  if (q % p != 1) throw usage_error("auxiliary prime is not 1 mod p");
  PrimeLabel lab;
  lab.name = name.empty() ? "q" + std::to_string(q) : std::move(name);
  lab.q = q;
  lab.gq_order = ipow(p, valuation(q - 1, p, 63));
  lab.sigma_gen = 1;
  return lab;
}

bool admissible_prime(const CharacterSpec& chi, u64 q, u64 p, unsigned n) {
  if (!is_prime(q) || q % p != 1) return false;
  if (q % ipow(p, n) != 1) return false;
  if (q % chi.modulus == 0) return false;
  if (chi(q % chi.modulus) != 1 % ipow(p, n)) return false;
  return gamma_digit(p, n, q) == 0;
}

GRElem derivative_operator(const LevelRing& level, const PrimeLabel& lab) {
  if (lab.gq_order == 1) return GRElem::zero(level.ring);
  if (lab.sigma_gen % level.p == 0)
    throw usage_error("sigma generator exponent must be coprime to p");
  std::size_t qi = q_index(level, lab.q);
  if (level.gq_orders[qi] != lab.gq_order)
    throw usage_error("label order disagrees with the level ring");
  GRElem D(level.ring);
  for (u64 i = 1; i < lab.gq_order; ++i)
    D.c[sigma_power(level, qi, lab, i)] = i % level.ring->mod;
  return D;
}

GRElem derivative_product(const LevelRing& level, const std::vector<PrimeLabel>& labs) {
  if (labs.size() != level.qs.size())
    throw usage_error("derivative product needs one label per auxiliary prime");
  GRElem D = GRElem::one(level.ring);
  for (const auto& lab : labs) D = gr_mul(D, derivative_operator(level, lab));
  return D;
}

GRElem norm_operator(const LevelRing& level, const PrimeLabel& lab) {
  std::size_t qi = q_index(level, lab.q);
  u64 stride = factor_stride(level, qi);
  GRElem N(level.ring);
  for (u64 i = 0; i < level.gq_orders[qi]; ++i) N.c[stride * i] = 1 % level.ring->mod;
  return N;
}

GRElem kolyvagin_class(const EulerSystemWindow& w, const std::vector<PrimeLabel>& pool,
                       const std::vector<u64>& nn) {
  std::vector<u64> qs = sorted_conductor(nn);
  std::size_t li = find_level(w, qs);
  const LevelRing& level = w.levels[li];

  std::vector<PrimeLabel> labs;
  for (u64 q : qs) {
    const PrimeLabel& lab = label_of(pool, q);
    if (!admissible_prime(w.chi, q, w.p, w.n))
      throw usage_error("inadmissible auxiliary prime: " + lab.name);
    labs.push_back(lab);
  }

  GRElem x = gr_mul(derivative_product(level, labs), w.values[li]);
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    if (gr_translate(x, factor_stride(level, qi)) != x)
      throw math_error("derived class is not Galois-fixed");
  }

  u64 pn = ipow(w.p, w.n);
  GRElem out(make_ring(w.p, w.n, {pn}));
  for (u64 g = 0; g < pn; ++g) out.c[g] = x.c[g];
  return out;
}

bool leading_coeff_check(const EulerSystemWindow& w, const std::vector<PrimeLabel>& pool,
                         const std::vector<u64>& nn) {
  std::vector<u64> qs = sorted_conductor(nn);
  std::size_t li = find_level(w, qs);
  const LevelRing& level = w.levels[li];
  GRElem kappa = kolyvagin_class(w, pool, nn);

  GRElem rhs(level.ring);
  for (u64 g = 0; g < kappa.c.size(); ++g) rhs.c[g] = kappa.c[g];
  GRElem one = GRElem::one(level.ring);
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    const PrimeLabel& lab = label_of(pool, qs[qi]);
    GRElem sigma = GRElem::basis(level.ring, sigma_power(level, qi, lab, 1));
    rhs = gr_mul(rhs, gr_sub(sigma, one));
  }
  if (qs.size() % 2 == 1) rhs = gr_neg(rhs);
  GRElem diff = gr_sub(w.values[li], rhs);

  unsigned nu = static_cast<unsigned>(qs.size());
  if (nu == 0) return diff.is_zero();

  // generators of I^{nu+1}: degree-(nu+1) monomials in the sigma_q - 1
  std::vector<GRElem> gens;
  std::vector<GRElem> aug;
  for (std::size_t qi = 0; qi < qs.size(); ++qi)
    aug.push_back(gr_sub(GRElem::basis(level.ring, factor_stride(level, qi)), one));
  std::vector<unsigned> expo(qs.size(), 0);
  expo[0] = nu + 1;
  for (;;) {
    GRElem m = one;
    for (std::size_t qi = 0; qi < qs.size(); ++qi)
      for (unsigned t = 0; t < expo[qi]; ++t) m = gr_mul(m, aug[qi]);
    gens.push_back(m);
    // next composition of nu+1 into qs.size() parts
    std::size_t k = 0;
    while (k < qs.size() && expo[k] == 0) ++k;
    if (k + 1 == qs.size()) break;
    unsigned head = expo[k];
    expo[k] = 0;
    expo[k + 1] += 1;
    expo[0] = head - 1;
  }
  IdealHandle power = ideal_from_generators(level.ring, gens);
  return ideal_contains(power, diff);
}

u64 augmentation_class(const LevelRing& level, const GRElem& x, std::size_t qi,
                       const PrimeLabel& lab) {
  u64 gq = level.gq_orders[qi];
  u64 pn = level.ring->mod;
  u64 M = std::min(gq, pn);
  u64 stride = factor_stride(level, qi);
  u64 A = 0;
  for (u64 g = 0; g < x.c.size(); ++g) {
    u64 digit = (g / stride) % gq;
    A = addmod(A, mulmod(x.c[g] % M, digit % M, M), M);
  }
  return mulmod(A, invmod(lab.sigma_gen % M, M), M);
}

GRElem tilde_kappa(const EulerSystemWindow& w, const std::vector<PrimeLabel>& pool,
                   const std::vector<u64>& nn) {
  std::vector<u64> qs = sorted_conductor(nn);
  std::size_t li = find_level(w, qs);
  const LevelRing& level = w.levels[li];
  u64 pn = ipow(w.p, w.n);

  GRElem total = kolyvagin_class(w, pool, {});
  total = gr_scale(total, 0);

  std::vector<std::size_t> perm(qs.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool neg = false;
    for (std::size_t i = 0; i < perm.size(); ++i)
      for (std::size_t j = i + 1; j < perm.size(); ++j)
        if (perm[i] > perm[j]) neg = !neg;

    std::vector<u64> fixed;
    u64 coef = 1 % pn;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      if (perm[i] == i) {
        fixed.push_back(qs[i]);
        continue;
      }
      u64 moved_to = qs[perm[i]];
      GRElem P = frobenius_polynomial(w.chi, moved_to, w.p, w.n).at_frobenius_inverse(level);
      coef = mulmod(coef, augmentation_class(level, P, i, label_of(pool, qs[i])), pn);
    }
    GRElem term = gr_scale(kolyvagin_class(w, pool, fixed), coef);
    total = neg ? gr_sub(total, term) : gr_add(total, term);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

IdealHandle theta_ideal(const EulerSystemWindow& w, const std::vector<PrimeLabel>& pool,
                        unsigned i) {
  std::vector<u64> qs;
  for (const auto& lab : pool) qs.push_back(lab.q);
  std::sort(qs.begin(), qs.end());

  std::vector<GRElem> gens;
  for (u64 mask = 0; mask < (u64(1) << qs.size()); ++mask) {
    if (static_cast<unsigned>(__builtin_popcountll(mask)) > i) continue;
    std::vector<u64> sub;
    for (std::size_t k = 0; k < qs.size(); ++k)
      if (mask & (u64(1) << k)) sub.push_back(qs[k]);
    gens.push_back(kolyvagin_class(w, pool, sub));
  }
  return ideal_from_generators(gens.front().ring, gens);
}

}  // namespace esk
