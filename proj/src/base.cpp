#include "eskit/base.hpp"

namespace esk {

u64 invmod(u64 a, u64 m) {
  a %= m;
  // extended Euclid over signed ints; m < 2^31 so this is safe
  std::int64_t t = 0, newt = 1;
  std::int64_t r = static_cast<std::int64_t>(m), newr = static_cast<std::int64_t>(a);
  while (newr != 0) {
    std::int64_t q = r / newr;
    std::int64_t tmp = t - q * newt;
    t = newt;
    newt = tmp;
    tmp = r - q * newr;
    r = newr;
    newr = tmp;
  }
  if (r != 1) throw math_error("invmod: " + std::to_string(a) + " is not a unit mod " + std::to_string(m));
  if (t < 0) t += static_cast<std::int64_t>(m);
  return static_cast<u64>(t);
}

bool is_prime(u64 q) {
  if (q < 2) return false;
  for (u64 d = 2; d * d <= q; ++d)
    if (q % d == 0) return false;
  return true;
}

u64 smallest_primitive_root(u64 q) {
  if (q == 1 || q == 2) return 1;
  if (q == 4) return 3;
  // factor out: q must be p^k for odd prime p
  u64 p = q;
  for (u64 d = 3; d * d <= p; d += 2)
    if (p % d == 0) {
      p = d;
      break;
    }
  u64 phi = q / p * (p - 1);
  // collect prime factors of phi
  u64 tmp = phi;
  u64 fac[16];
  int nf = 0;
  for (u64 d = 2; d * d <= tmp; ++d)
    if (tmp % d == 0) {
      fac[nf++] = d;
      while (tmp % d == 0) tmp /= d;
    }
  if (tmp > 1) fac[nf++] = tmp;
  for (u64 g = 2; g < q; ++g) {
    if (g % p == 0) continue;
    bool ok = true;
    for (int i = 0; i < nf && ok; ++i)
      if (powmod(g, phi / fac[i], q) == 1) ok = false;
    if (ok) return g;
  }
  throw math_error("no primitive root mod " + std::to_string(q));
}

}  // namespace esk
