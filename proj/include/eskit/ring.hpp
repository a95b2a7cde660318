#pragma once

#include <map>
#include <memory>
#include <vector>

#include "eskit/linalg.hpp"

// The coefficient rings (Z/p^n)[G] for a finite abelian group G.  Group
// elements are enumerated in mixed-radix order over the invariant factors:
// index i corresponds to the tuple (i mod d_1, (i/d_1) mod d_2, ...).

namespace esk {

struct Group {
  std::vector<u64> factors;  // direct factor orders d_1, ..., d_k
  u64 order = 1;

  explicit Group(std::vector<u64> fs = {}) : factors(std::move(fs)) {
    for (u64 d : factors) {
      if (d == 0) throw usage_error("group factor must be positive");
      order *= d;
    }
  }

  std::vector<u64> decode(u64 i) const {
    std::vector<u64> t(factors.size());
    for (std::size_t k = 0; k < factors.size(); ++k) {
      t[k] = i % factors[k];
      i /= factors[k];
    }
    return t;
  }
  u64 encode(const std::vector<u64>& t) const {
    u64 i = 0;
    for (std::size_t k = factors.size(); k-- > 0;) i = i * factors[k] + t[k] % factors[k];
    return i;
  }
  u64 mul(u64 i, u64 j) const {
    u64 r = 0, m = 1;
    for (std::size_t k = 0; k < factors.size(); ++k) {
      u64 d = factors[k];
      r += m * ((i % d + j % d) % d);
      m *= d;
      i /= d;
      j /= d;
    }
    return r;
  }
  u64 inv(u64 i) const {
    u64 r = 0, m = 1;
    for (std::size_t k = 0; k < factors.size(); ++k) {
      u64 d = factors[k];
      u64 c = i % d;
      r += m * (c ? d - c : 0);
      m *= d;
      i /= d;
    }
    return r;
  }
  // generator of the k-th direct factor
  u64 gen(std::size_t k) const {
    std::vector<u64> t(factors.size(), 0);
    t[k] = 1;
    return encode(t);
  }
  bool operator==(const Group& o) const { return factors == o.factors; }
};

struct Ring {
  u64 p;
  unsigned n;
  u64 mod;  // p^n
  Group group;

  Ring(u64 p_, unsigned n_, Group g) : p(p_), n(n_), mod(ipow(p_, n_)), group(std::move(g)) {
    if (p_ < 3 || !is_prime(p_)) throw usage_error("p must be an odd prime");
    if (n_ < 1) throw usage_error("n must be >= 1");
    if (mod >= (u64(1) << 31)) throw usage_error("p^n too large");
  }

  u64 dim() const { return group.order; }
  bool is_local() const {
    for (u64 d : group.factors) {
      u64 t = d;
      while (t % p == 0) t /= p;
      if (t != 1) return false;
    }
    return true;
  }
  bool operator==(const Ring& o) const {
    return p == o.p && n == o.n && group == o.group;
  }
};

using RingPtr = std::shared_ptr<const Ring>;

inline RingPtr make_ring(u64 p, unsigned n, std::vector<u64> factors) {
  return std::make_shared<const Ring>(p, n, Group(std::move(factors)));
}

struct GRElem {
  RingPtr ring;
  std::vector<u64> c;  // coefficients indexed by group element, reduced mod p^n

  GRElem() = default;
  explicit GRElem(RingPtr r) : ring(std::move(r)), c(ring->dim(), 0) {}
  GRElem(RingPtr r, std::vector<u64> coeffs) : ring(std::move(r)), c(std::move(coeffs)) {
    if (c.size() != ring->dim()) throw usage_error("coefficient length mismatch");
    for (auto& x : c) x %= ring->mod;
  }

  static GRElem zero(const RingPtr& r) { return GRElem(r); }
  static GRElem one(const RingPtr& r) {
    GRElem e(r);
    e.c[0] = 1 % r->mod;
    return e;
  }
  static GRElem scalar(const RingPtr& r, u64 a) {
    GRElem e(r);
    e.c[0] = a % r->mod;
    return e;
  }
  static GRElem basis(const RingPtr& r, u64 g) {
    GRElem e(r);
    e.c.at(g) = 1 % r->mod;
    return e;
  }

  bool is_zero() const {
    for (u64 x : c)
      if (x) return false;
    return true;
  }
  bool operator==(const GRElem& o) const { return *ring == *o.ring && c == o.c; }
};

GRElem gr_add(const GRElem& a, const GRElem& b);
GRElem gr_sub(const GRElem& a, const GRElem& b);
GRElem gr_mul(const GRElem& a, const GRElem& b);
GRElem gr_scale(const GRElem& a, u64 s);
GRElem gr_neg(const GRElem& a);
GRElem involution(const GRElem& a);

// a * g^{-1}-shift: multiply by the basis element of group index g
GRElem gr_translate(const GRElem& a, u64 g);

// p-th-power-stable lift: the unique (p-1)-th root of unity congruent to a
// mod p, computed in Z/p^n.
u64 teichmuller(u64 p, unsigned n, u64 a);

struct CharacterSpec {
  u64 modulus = 1;                 // f
  std::map<u64, u64> values;       // unit mod f -> residue mod p^n
  u64 order = 1;                   // divides p - 1
  bool odd = false;                // parity: sign of chi(-1)
  u64 p = 3;
  unsigned n = 1;

  // validates multiplicativity, root-of-unity order, and parity
  void validate() const;
  u64 operator()(u64 a) const;     // value at a unit mod f (throws otherwise)
};

// e_chi = |delta|^{-1} sum_{s in delta} chi(s) s^{-1}, where delta is a list
// of group indices forming a subgroup and chi_values gives chi on them.
GRElem idempotent(const RingPtr& ring, const std::vector<u64>& delta,
                  const std::vector<u64>& chi_values);

// Matrices over the group ring, with scalar expansion to Z/p^n.
struct RMat {
  RingPtr ring;
  std::size_t rows = 0, cols = 0;
  std::vector<GRElem> e;  // row-major

  RMat() = default;
  RMat(RingPtr r, std::size_t rr, std::size_t cc)
      : ring(std::move(r)), rows(rr), cols(cc), e(rr * cc, GRElem(ring)) {}
  GRElem& at(std::size_t i, std::size_t j) { return e[i * cols + j]; }
  const GRElem& at(std::size_t i, std::size_t j) const { return e[i * cols + j]; }
  static RMat identity(const RingPtr& r, std::size_t k) {
    RMat m(r, k, k);
    for (std::size_t i = 0; i < k; ++i) m.at(i, i) = GRElem::one(r);
    return m;
  }
};

RMat rmat_mul(const RMat& A, const RMat& B);

// Regular-representation block expansion: each entry a becomes the |G|x|G|
// block of right multiplication on coefficient row vectors, so that
// expand(A*B) = expand(A)*expand(B).
Mat expand_scalars(const RMat& M);
Mat expand_elem(const GRElem& a);

// The R-row-span of M as a Z/p^n lattice: every R-row contributes |G|
// translated scalar rows.  Not Howell-reduced.
Mat expand_row_lattice(const RMat& M);

// Interpret a flat residue row of length k*|G| as an R-row of length k.
std::vector<GRElem> unflatten_row(const RingPtr& ring, const std::vector<u64>& row);
std::vector<u64> flatten_row(const std::vector<GRElem>& row);
RMat rmat_from_flat_rows(const RingPtr& ring, const Mat& rows);

}  // namespace esk
