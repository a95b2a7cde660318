#include "eskit/ring.hpp"

#include <numeric>

namespace esk {

namespace {
void check_same_ring(const GRElem& a, const GRElem& b) {
  if (!(*a.ring == *b.ring)) throw usage_error("group ring mismatch");
}
}  // namespace

GRElem gr_add(const GRElem& a, const GRElem& b) {
  check_same_ring(a, b);
  GRElem r = a;
  for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = (r.c[i] + b.c[i]) % r.ring->mod;
  return r;
}

GRElem gr_sub(const GRElem& a, const GRElem& b) {
  check_same_ring(a, b);
  GRElem r = a;
  for (std::size_t i = 0; i < r.c.size(); ++i)
    r.c[i] = (r.c[i] + r.ring->mod - b.c[i]) % r.ring->mod;
  return r;
}

GRElem gr_mul(const GRElem& a, const GRElem& b) {
  check_same_ring(a, b);
  const auto& G = a.ring->group;
  const u64 mod = a.ring->mod;
  GRElem r(a.ring);
  for (u64 g = 0; g < G.order; ++g) {
    u64 x = a.c[g];
    if (!x) continue;
    for (u64 h = 0; h < G.order; ++h) {
      u64 y = b.c[h];
      if (!y) continue;
      u64 k = G.mul(g, h);
      r.c[k] = (r.c[k] + x * y) % mod;
    }
  }
  return r;
}

GRElem gr_scale(const GRElem& a, u64 s) {
  GRElem r = a;
  s %= r.ring->mod;
  for (auto& x : r.c) x = x * s % r.ring->mod;
  return r;
}

GRElem gr_neg(const GRElem& a) { return gr_scale(a, a.ring->mod - 1); }

GRElem involution(const GRElem& a) {
  GRElem r(a.ring);
  const auto& G = a.ring->group;
  for (u64 g = 0; g < G.order; ++g) r.c[G.inv(g)] = a.c[g];
  return r;
}

GRElem gr_translate(const GRElem& a, u64 g) {
  GRElem r(a.ring);
  const auto& G = a.ring->group;
  for (u64 h = 0; h < G.order; ++h) r.c[G.mul(h, g)] = a.c[h];
  return r;
}

u64 teichmuller(u64 p, unsigned n, u64 a) {
  u64 mod = ipow(p, n);
  a %= mod;
  if (a % p == 0) throw math_error("teichmuller: argument divisible by p");
  // iterate x -> x^p until stable; converges to the root of x^{p-1} = 1
  u64 x = a;
  for (unsigned i = 0; i + 1 < n; ++i) x = powmod(x, p, mod);
  // one extra round to confirm stability
  u64 y = powmod(x, p, mod);
  while (y != x) {
    x = y;
    y = powmod(x, p, mod);
  }
  return x;
}

void CharacterSpec::validate() const {
  u64 mod = ipow(p, n);
  if (modulus < 1) throw usage_error("character modulus must be positive");
  if ((p - 1) % order != 0) throw math_error("character order must divide p-1");
  for (const auto& [a, v] : values) {
    if (std::gcd(a, modulus) != 1) throw usage_error("character table key not a unit");
    if (powmod(v, order, mod) != 1 % mod) throw math_error("character value is not a root of unity of the stated order");
  }
  for (const auto& [a, va] : values)
    for (const auto& [b, vb] : values) {
      u64 ab = a * b % modulus;
      auto it = values.find(ab);
      if (it == values.end()) throw usage_error("character table not closed under multiplication");
      if (it->second != va * vb % mod) throw math_error("character not multiplicative");
    }
  u64 m1 = (modulus - 1) % modulus;
  auto it = values.find(modulus == 1 ? 0 : m1);
  if (modulus > 2) {
    if (it == values.end()) throw usage_error("character table missing -1");
    bool is_odd = (it->second == mod - 1 % mod && mod > 2);
    if (is_odd != odd) throw math_error("character parity flag does not match chi(-1)");
  }
}

u64 CharacterSpec::operator()(u64 a) const {
  a %= modulus;
  auto it = values.find(a);
  if (it == values.end()) throw usage_error("character evaluated outside its unit table");
  return it->second;
}

GRElem idempotent(const RingPtr& ring, const std::vector<u64>& delta,
                  const std::vector<u64>& chi_values) {
  if (delta.size() != chi_values.size()) throw usage_error("idempotent: table size mismatch");
  u64 sz = delta.size();
  u64 inv_sz;
  try {
    inv_sz = invmod(sz % ring->mod, ring->mod);
  } catch (const math_error&) {
    throw math_error("idempotent: |delta| not invertible mod p");
  }
  GRElem e(ring);
  const auto& G = ring->group;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    u64 gi = G.inv(delta[i]);
    e.c[gi] = (e.c[gi] + chi_values[i] % ring->mod * inv_sz) % ring->mod;
  }
  return e;
}

RMat rmat_mul(const RMat& A, const RMat& B) {
  if (A.cols != B.rows || !(*A.ring == *B.ring)) throw usage_error("rmat_mul: mismatch");
  RMat C(A.ring, A.rows, B.cols);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t k = 0; k < A.cols; ++k) {
      if (A.at(i, k).is_zero()) continue;
      for (std::size_t j = 0; j < B.cols; ++j)
        C.at(i, j) = gr_add(C.at(i, j), gr_mul(A.at(i, k), B.at(k, j)));
    }
  return C;
}

Mat expand_elem(const GRElem& a) {
  const auto& R = *a.ring;
  const auto& G = R.group;
  Mat E(G.order, G.order, R.p, R.n);
  // row h, column g: coefficient of (x*a) at g when x is the basis vector h,
  // i.e. a_{h^{-1} g}
  for (u64 h = 0; h < G.order; ++h) {
    u64 hi = G.inv(h);
    for (u64 g = 0; g < G.order; ++g) E.at(h, g) = a.c[G.mul(hi, g)];
  }
  return E;
}

Mat expand_scalars(const RMat& M) {
  const auto& R = *M.ring;
  u64 d = R.group.order;
  Mat E(M.rows * d, M.cols * d, R.p, R.n);
  for (std::size_t i = 0; i < M.rows; ++i)
    for (std::size_t j = 0; j < M.cols; ++j) {
      Mat B = expand_elem(M.at(i, j));
      for (u64 h = 0; h < d; ++h)
        for (u64 g = 0; g < d; ++g) E.at(i * d + h, j * d + g) = B.at(h, g);
    }
  return E;
}

Mat expand_row_lattice(const RMat& M) {
  const auto& R = *M.ring;
  u64 d = R.group.order;
  Mat L(0, M.cols * d, R.p, R.n);
  for (std::size_t i = 0; i < M.rows; ++i)
    for (u64 g = 0; g < d; ++g) {
      std::vector<u64> row(M.cols * d, 0);
      for (std::size_t j = 0; j < M.cols; ++j) {
        GRElem t = gr_translate(M.at(i, j), g);
        for (u64 h = 0; h < d; ++h) row[j * d + h] = t.c[h];
      }
      L.append_row(row);
    }
  return L;
}

std::vector<GRElem> unflatten_row(const RingPtr& ring, const std::vector<u64>& row) {
  u64 d = ring->dim();
  if (row.size() % d != 0) throw usage_error("unflatten_row: length not a multiple of |G|");
  std::vector<GRElem> out;
  for (std::size_t j = 0; j * d < row.size(); ++j)
    out.emplace_back(ring, std::vector<u64>(row.begin() + static_cast<std::ptrdiff_t>(j * d),
                                            row.begin() + static_cast<std::ptrdiff_t>((j + 1) * d)));
  return out;
}

std::vector<u64> flatten_row(const std::vector<GRElem>& row) {
  std::vector<u64> out;
  for (const auto& e : row) out.insert(out.end(), e.c.begin(), e.c.end());
  return out;
}

RMat rmat_from_flat_rows(const RingPtr& ring, const Mat& rows) {
  u64 d = ring->dim();
  RMat M(ring, rows.rows, rows.cols / d);
  for (std::size_t i = 0; i < rows.rows; ++i) {
    auto r = unflatten_row(ring, rows.row(i));
    for (std::size_t j = 0; j < M.cols; ++j) M.at(i, j) = r[j];
  }
  return M;
}

}  // namespace esk
