#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

// Shared scalar helpers for arithmetic modulo a prime power p^n.
// All residues are stored as std::uint64_t in [0, p^n); moduli are kept
// below 2^31 so products never overflow.

namespace esk {

using u64 = std::uint64_t;

struct math_error : std::runtime_error {
  explicit math_error(const std::string& what) : std::runtime_error(what) {}
};

struct usage_error : std::runtime_error {
  explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

inline u64 mulmod(u64 a, u64 b, u64 m) { return (a * b) % m; }

inline u64 addmod(u64 a, u64 b, u64 m) { return (a + b) % m; }

inline u64 submod(u64 a, u64 b, u64 m) { return (a + m - b % m) % m; }

inline u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

u64 invmod(u64 a, u64 m);  // throws math_error if not a unit

// p-adic valuation of a residue mod p^n; val(0) == n by convention.
inline unsigned valuation(u64 a, u64 p, unsigned n) {
  if (a == 0) return n;
  unsigned v = 0;
  while (a % p == 0) {
    a /= p;
    ++v;
  }
  return v;
}

inline u64 ipow(u64 a, unsigned e) {
  u64 r = 1;
  while (e--) r *= a;
  return r;
}

bool is_prime(u64 q);
u64 smallest_primitive_root(u64 q);  // q an odd prime power or 1, 2, 4

}  // namespace esk
