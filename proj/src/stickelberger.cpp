#include "eskit/stickelberger.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace esk {

LevelPtr make_level(u64 m) {
  auto lvl = std::make_shared<CyclotomicLevel>();
  lvl->m = m;
  lvl->units = unit_group(m);
  return lvl;
}

const mpq_class& StickelbergerElement::coeff_key(u64 a) const {
  return poly[level->units.index_of(level->units.inv(a))];
}

mpq_class partial_zeta_zero(u64 m, u64 a) {
  if (m <= 1) throw usage_error("modulus must exceed 1");
  if (std::gcd(a % m, m) != 1) throw usage_error("argument not coprime to the modulus");
  u64 r = a % m;
  if (r == 0) r = m;  // representative in (0,1]
  return mpq_class(1, 2) - mpq_class(static_cast<unsigned long>(r), static_cast<unsigned long>(m));
}

StickelbergerElement stickelberger_element(u64 m, const std::vector<u64>& extra_primes) {
  StickelbergerElement theta;
  theta.level = make_level(m);
  const UnitGroup& G = theta.level->units;
  theta.poly.assign(G.order, mpq_class(0));
  for (u64 g = 0; g < G.order; ++g) {
    u64 a = G.unit_of(g);
    theta.poly[G.index_of(G.inv(a))] = partial_zeta_zero(m, a);
  }
  for (u64 q : extra_primes) {
    if (!is_prime(q)) throw usage_error("extra factor is not prime");
    if (std::gcd(q, m) != 1) throw usage_error("extra prime divides the modulus");
    // multiply by 1 - sigma_q^{-1}
    std::vector<mpq_class> shifted(G.order, mpq_class(0));
    u64 qinv = G.inv(q % m);
    for (u64 g = 0; g < G.order; ++g)
      shifted[G.index_of(mulmod(G.unit_of(g), qinv, m))] = theta.poly[g];
    for (u64 g = 0; g < G.order; ++g) theta.poly[g] -= shifted[g];
  }
  return theta;
}

StickelbergerElement project_stickelberger(const StickelbergerElement& theta, u64 m_small) {
  u64 m = theta.level->m;
  if (m_small <= 1 || m % m_small != 0) throw usage_error("target level must divide the source level");
  StickelbergerElement out;
  out.level = make_level(m_small);
  const UnitGroup& G = theta.level->units;
  const UnitGroup& H = out.level->units;
  out.poly.assign(H.order, mpq_class(0));
  for (u64 g = 0; g < G.order; ++g)
    out.poly[H.index_of(G.unit_of(g) % m_small)] += theta.poly[g];
  return out;
}

CycElem evaluate_character(const StickelbergerElement& theta, const DirichletCharacter& psi) {
  const UnitGroup& G = theta.level->units;
  if (psi.units->m != G.m) throw usage_error("character level mismatch");
  CycElem sum = CycElem::zero(G.exponent);
  for (u64 g = 0; g < G.order; ++g) {
    if (theta.poly[g] == 0) continue;
    sum = cyc_add(sum, cyc_scale(psi.value(G.unit_of(g)), theta.poly[g]));
  }
  return sum;
}

// ---- flat projection and twist ---------------------------------------------------

GRElem flat_projection(const StickelbergerElement& theta, u64 p, unsigned n) {
  u64 m = theta.level->m;
  unsigned t = 0;
  {
    u64 mm = m;
    while (mm % p == 0) {
      mm /= p;
      ++t;
    }
  }
  if (t == 0) throw usage_error("level does not contain mu_p");
  u64 pt = ipow(p, t);
  const UnitGroup& G = theta.level->units;

  // work modulo p^{n+t}: coefficients scaled by p^t are p-integral
  auto work = make_ring(p, n + t, G.factors);
  u64 P = work->mod;
  GRElem Y(work);
  for (u64 g = 0; g < G.order; ++g) {
    mpq_class c = theta.poly[g];
    mpz_class num = c.get_num(), den = c.get_den();
    unsigned s = 0;
    while (den % p == 0) {
      den /= p;
      ++s;
    }
    if (s > t) throw math_error("coefficient denominator exceeds the p-part of the level");
    mpz_class scaled = num * ipow(p, t - s);
    u64 v = mpz_fdiv_ui(scaled.get_mpz_t(), static_cast<unsigned long>(P));
    u64 deninv = invmod(mpz_fdiv_ui(den.get_mpz_t(), static_cast<unsigned long>(P)), P);
    Y.c[g] = mulmod(v, deninv, P);
  }

  // minus projection (1 - c)/2, c = sigma_{-1}
  GRElem shifted(work);
  u64 minus1 = G.index_of(m - 1);
  for (u64 g = 0; g < G.order; ++g)
    shifted.c[work->group.mul(g, minus1)] = Y.c[g];
  GRElem Yminus = gr_scale(gr_sub(Y, shifted), invmod(2, P));

  // Remove the omega component: the omega-isotypic part for the maximal
  // prime-to-p subgroup, with the character trivial away from p and equal to
  // the Teichmueller character on the p-cyclotomic part.
  std::vector<u64> delta, chi_values;
  for (u64 g = 0; g < G.order; ++g) {
    auto digits = G.dlog(G.unit_of(g));
    bool prime_to_p_order = true;
    for (std::size_t k = 0; k < digits.size(); ++k) {
      u64 pv = 1;
      for (u64 d = G.factors[k]; d % p == 0; d /= p) pv *= p;
      if (digits[k] % pv != 0) {
        prime_to_p_order = false;
        break;
      }
    }
    if (!prime_to_p_order) continue;
    delta.push_back(g);
    chi_values.push_back(teichmuller(p, n + t, G.unit_of(g) % p));
  }
  GRElem e_omega = idempotent(work, delta, chi_values);
  GRElem Z = gr_sub(Yminus, gr_mul(e_omega, Yminus));

  // divide by p^t and reduce mod p^n
  auto out_ring = theta.level->ring(p, n);
  GRElem out(out_ring);
  for (u64 g = 0; g < G.order; ++g) {
    if (Z.c[g] % pt != 0) throw math_error("flat projection is not p-integral");
    out.c[g] = (Z.c[g] / pt) % out_ring->mod;
  }
  return out;
}

GRElem twist(const CyclotomicLevel& level, const GRElem& x) {
  const UnitGroup& G = level.units;
  if (x.ring->group.factors != G.factors) throw usage_error("element is not at this level");
  u64 p = x.ring->p;
  u64 pn = x.ring->mod;
  if (level.m % ipow(p, x.ring->n) != 0)
    throw usage_error("cyclotomic character undefined: p^n does not divide the level");
  GRElem out(x.ring);
  for (u64 g = 0; g < G.order; ++g) {
    u64 a = G.unit_of(g);
    out.c[G.index_of(G.inv(a))] =
        addmod(out.c[G.index_of(G.inv(a))], mulmod(a % pn, x.c[g], pn), pn);
  }
  return out;
}

GRElem project_group_ring(const CyclotomicLevel& big, const CyclotomicLevel& small,
                          const GRElem& x) {
  if (big.m % small.m != 0) throw usage_error("target level must divide the source level");
  auto out_ring = small.ring(x.ring->p, x.ring->n);
  GRElem out(out_ring);
  for (u64 g = 0; g < big.units.order; ++g) {
    u64 idx = small.units.index_of(big.units.unit_of(g) % small.m);
    out.c[idx] = addmod(out.c[idx], x.c[g], out_ring->mod);
  }
  return out;
}

// ---- level rings ------------------------------------------------------------------

// digit of <a> in Gamma_n = (1+p)-part of (Z/p^{n+1})^*
u64 gamma_digit(u64 p, unsigned n, u64 a) {
  u64 P1 = ipow(p, n + 1);
  u64 w = teichmuller(p, n + 1, a % P1);
  u64 u = mulmod(a % P1, invmod(w, P1), P1);
  u64 pw = 1 % P1, base = (1 + p) % P1, pn = ipow(p, n);
  for (u64 s = 0; s < pn; ++s) {
    if (pw == u) return s;
    pw = mulmod(pw, base, P1);
  }
  throw math_error("discrete log failure in the cyclotomic layer");
}

u64 mod_q_digit(u64 q, u64 gq_order, u64 ell) {
  static std::map<u64, std::vector<u64>> cache;
  auto it = cache.find(q);
  if (it == cache.end()) {
    std::vector<u64> table(q, ~u64(0));
    u64 g = smallest_primitive_root(q);
    u64 pw = 1 % q;
    for (u64 s = 0; s < q - 1; ++s) {
      table[pw] = s;
      pw = mulmod(pw, g, q);
    }
    it = cache.emplace(q, std::move(table)).first;
  }
  u64 s = it->second[ell % q];
  if (s == ~u64(0)) throw usage_error("argument not coprime to an auxiliary prime");
  return s % gq_order;
}

u64 LevelRing::frobenius(u64 ell) const {
  std::vector<u64> digits(1 + qs.size(), 0);
  digits[0] = gamma_digit(p, n, ell);
  for (std::size_t i = 0; i < qs.size(); ++i)
    digits[1 + i] = (ell % qs[i] == 0) ? 0 : mod_q_digit(qs[i], gq_orders[i], ell);
  return ring->group.encode(digits);
}

LevelRing level_ring(u64 p, unsigned n, std::vector<u64> qs) {
  std::sort(qs.begin(), qs.end());
  LevelRing L;
  L.p = p;
  L.n = n;
  L.qs = qs;
  std::vector<u64> factors{ipow(p, n)};
  for (u64 q : qs) {
    if (!is_prime(q)) throw usage_error("auxiliary label is not prime");
    if (q % p != 1) throw usage_error("auxiliary prime is not 1 mod p");
    u64 gq = ipow(p, valuation(q - 1, p, 63));
    L.gq_orders.push_back(gq);
    factors.push_back(gq);
  }
  L.ring = make_ring(p, n, factors);
  return L;
}

RingProjection level_projection(const LevelRing& big, const LevelRing& small) {
  if (big.p != small.p || big.n != small.n) throw usage_error("level ring mismatch");
  for (u64 q : small.qs)
    if (std::find(big.qs.begin(), big.qs.end(), q) == big.qs.end())
      throw usage_error("target level is not a sublevel");
  RingProjection proj;
  proj.src = big.ring;
  proj.tgt = small.ring;
  proj.group_map.resize(big.ring->dim());
  for (u64 g = 0; g < big.ring->dim(); ++g) {
    auto digits = big.ring->group.decode(g);
    std::vector<u64> out(1 + small.qs.size(), 0);
    out[0] = digits[0];
    for (std::size_t i = 0; i < small.qs.size(); ++i) {
      auto it = std::find(big.qs.begin(), big.qs.end(), small.qs[i]);
      out[1 + i] = digits[1 + (it - big.qs.begin())];
    }
    proj.group_map[g] = small.ring->group.encode(out);
  }
  proj.validate();
  return proj;
}

GRElem FrobeniusPolynomial::at_frobenius_inverse(const LevelRing& level) const {
  GRElem out = GRElem::scalar(level.ring, c0);
  u64 fr = level.frobenius(q);
  u64 fr_inv = level.ring->group.inv(fr);
  out.c[fr_inv] = addmod(out.c[fr_inv], c1, level.ring->mod);
  return out;
}

FrobeniusPolynomial frobenius_polynomial(const CharacterSpec& chi, u64 q, u64 p, unsigned n) {
  u64 pn = ipow(p, n);
  FrobeniusPolynomial P;
  P.q = q;
  P.c0 = 1 % pn;
  P.c1 = submod(0, mulmod(invmod(chi(q % chi.modulus), pn), q % pn, pn), pn);
  return P;
}

GRElem u_factor(const CharacterSpec& chi, u64 q, const LevelRing& level) {
  u64 pn = level.ring->mod;
  u64 scalar = mulmod(invmod(chi(q % chi.modulus), pn), q % pn, pn);
  GRElem out(level.ring);
  out.c[level.ring->group.inv(level.frobenius(q))] = scalar;
  return out;
}

GRElem modified_p_adic_L(const LevelRing& level, const CharacterSpec& chi) {
  chi.validate();
  u64 p = level.p;
  unsigned n = level.n;
  if (chi.p != p || chi.n != n) throw usage_error("character ring mismatch");
  if (chi.odd) throw math_error("character must be even");
  if (chi.order <= 1) throw math_error("character must be nontrivial");
  if ((p - 1) % chi.order != 0) throw math_error("character order must divide p - 1");
  u64 f = chi.modulus;
  if (f % p == 0) throw usage_error("character conductor must be prime to p");
  for (u64 q : level.qs)
    if (f % q == 0) throw usage_error("ramified prime divides the character conductor");

  u64 m = f * ipow(p, n + 1);
  for (u64 q : level.qs) m *= q;
  auto lvl = make_level(m);
  StickelbergerElement theta = stickelberger_element(m, {});
  GRElem flat = flat_projection(theta, p, n);
  GRElem tw = twist(*lvl, flat);

  // push along the chi-component: sigma_a -> chi(a mod f) * (Gamma_n, G_q image)
  u64 pn = ipow(p, n);
  GRElem val(level.ring);
  const UnitGroup& G = lvl->units;
  for (u64 g = 0; g < G.order; ++g) {
    if (tw.c[g] == 0) continue;
    u64 a = G.unit_of(g);
    std::vector<u64> digits(1 + level.qs.size(), 0);
    digits[0] = gamma_digit(p, n, a);
    for (std::size_t i = 0; i < level.qs.size(); ++i)
      digits[1 + i] = mod_q_digit(level.qs[i], level.gq_orders[i], a);
    u64 idx = level.ring->group.encode(digits);
    u64 cval = mulmod(chi(a % f), tw.c[g], pn);
    val.c[idx] = addmod(val.c[idx], cval, pn);
  }

  // multiply by prod_q (-u_q) over the ramified primes
  for (u64 q : level.qs) val = gr_mul(val, gr_neg(u_factor(chi, q, level)));
  return val;
}

// ---- Euler-system windows ------------------------------------------------------------

EulerSystemWindow l_element_window(const CharacterSpec& chi, u64 p, unsigned n,
                                   const std::vector<u64>& pool) {
  EulerSystemWindow w;
  w.p = p;
  w.n = n;
  w.chi = chi;
  for (u64 mask = 0; mask < (u64(1) << pool.size()); ++mask) {
    std::vector<u64> qs;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (mask & (u64(1) << i)) qs.push_back(pool[i]);
    w.levels.push_back(level_ring(p, n, qs));
    w.values.push_back(modified_p_adic_L(w.levels.back(), chi));
  }
  return w;
}

WindowReport euler_window_validate(const EulerSystemWindow& w) {
  WindowReport report;
  u64 p = w.p;
  unsigned n = w.n;
  for (std::size_t j = 0; j < w.levels.size(); ++j) {
    for (std::size_t i = 0; i < w.levels.size(); ++i) {
      const auto& up = w.levels[j].qs;
      const auto& lo = w.levels[i].qs;
      if (up.size() != lo.size() + 1) continue;
      if (!std::includes(up.begin(), up.end(), lo.begin(), lo.end())) continue;
      u64 q = 0;
      for (u64 x : up)
        if (std::find(lo.begin(), lo.end(), x) == lo.end()) q = x;
      RingProjection proj = level_projection(w.levels[j], w.levels[i]);
      GRElem lhs = proj.push(w.values[j]);
      GRElem euler = frobenius_polynomial(w.chi, q, p, n).at_frobenius_inverse(w.levels[i]);
      GRElem rhs = gr_mul(euler, w.values[i]);
      if (!(lhs == rhs)) {
        report.valid = false;
        report.failures.push_back({j, i, lhs, rhs});
      }
    }
  }
  return report;
}

}  // namespace esk
