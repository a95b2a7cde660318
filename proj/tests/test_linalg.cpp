#include <random>
#include <set>

#include "doctest.h"
#include "eskit/linalg.hpp"
#include "eskit/ring.hpp"

using namespace esk;

namespace {

Mat mat_from(u64 p, unsigned n, std::vector<std::vector<u64>> rows, std::size_t cols) {
  Mat M(rows.size(), cols, p, n);
  for (std::size_t i = 0; i < rows.size(); ++i) M.set_row(i, rows[i]);
  return M;
}

// Brute-force span of the rows of M over Z/p^n, as a sorted set of vectors.
std::set<std::vector<u64>> enumerate_span(const Mat& M) {
  std::set<std::vector<u64>> span;
  std::vector<u64> coef(M.rows, 0);
  while (true) {
    std::vector<u64> v(M.cols, 0);
    for (std::size_t i = 0; i < M.rows; ++i)
      for (std::size_t j = 0; j < M.cols; ++j)
        v[j] = (v[j] + coef[i] * M.at(i, j)) % M.mod;
    span.insert(v);
    std::size_t k = 0;
    while (k < coef.size() && ++coef[k] == M.mod) coef[k++] = 0;
    if (k == coef.size()) break;
  }
  return span;
}

}  // namespace

TEST_CASE("howell form: pinned small examples over Z/9") {
  // already reduced
  Mat A = mat_from(3, 2, {{3}}, 1);
  CHECK(howell_form(A) == mat_from(3, 2, {{3}}, 1));

  // unit rows rescale to the identity
  Mat B = mat_from(3, 2, {{2, 0}, {0, 2}}, 2);
  CHECK(howell_form(B) == mat_from(3, 2, {{1, 0}, {0, 1}}, 2));

  // the span of [3,1] needs the closure row [0,3]
  Mat C = mat_from(3, 2, {{3, 1}}, 2);
  Mat H = howell_form(C);
  REQUIRE(H.rows == 2);
  CHECK(H.row(0) == std::vector<u64>{3, 1});
  CHECK(H.row(1) == std::vector<u64>{0, 3});
  // frozen oracle: exhaustive span enumeration over (Z/9)^2
  CHECK(enumerate_span(C) == enumerate_span(H));
  CHECK(enumerate_span(C).size() == 9);
}

TEST_CASE("howell form: canonical under random row operations") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 500; ++trial) {
    u64 p = (trial % 2) ? 3 : 5;
    unsigned n = 2;
    std::size_t r = 1 + rng() % 3, c = 1 + rng() % 4;
    Mat M(r, c, p, n);
    for (auto& x : M.a) x = rng() % M.mod;
    Mat H1 = howell_form(M);
    // apply a random invertible row operation sequence
    Mat N = M;
    for (int k = 0; k < 6; ++k) {
      std::size_t i = rng() % r, j = rng() % r;
      u64 s = rng() % N.mod;
      if (i == j) {
        // scale by a unit
        u64 u = s;
        while (u % p == 0) u = (u + 1) % N.mod;
        for (std::size_t t = 0; t < c; ++t) N.at(i, t) = N.at(i, t) * u % N.mod;
      } else {
        for (std::size_t t = 0; t < c; ++t)
          N.at(i, t) = (N.at(i, t) + s * N.at(j, t)) % N.mod;
      }
    }
    CHECK(howell_form(N) == H1);
  }
}

TEST_CASE("howell form: equal spans iff identical forms (exhaustive check on small cases)") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 60; ++trial) {
    Mat M(2, 2, 3, 2);
    for (auto& x : M.a) x = rng() % 9;
    Mat H = howell_form(M);
    CHECK(enumerate_span(M) == enumerate_span(H));
  }
}

TEST_CASE("kernel: pinned examples and exhaustive verification") {
  // over Z/9, M = [[3]] has left kernel spanned by [3]
  Mat M = mat_from(3, 2, {{3}}, 1);
  Mat K = left_kernel(M);
  REQUIRE(K.rows == 1);
  CHECK(K.row(0) == std::vector<u64>{3});

  // invertible matrix: zero kernel
  Mat I2 = mat_from(3, 2, {{1, 2}, {0, 1}}, 2);
  CHECK(left_kernel(I2).rows == 0);

  // zero 1x1 matrix: full kernel
  Mat Z = mat_from(3, 2, {{0}}, 1);
  Mat KZ = left_kernel(Z);
  REQUIRE(KZ.rows == 1);
  CHECK(KZ.row(0) == std::vector<u64>{1});

  // exhaustive: random 2x2 over Z/9, kernel membership both directions
  std::mt19937_64 rng(999);
  for (int trial = 0; trial < 40; ++trial) {
    Mat A(2, 2, 3, 2);
    for (auto& x : A.a) x = rng() % 9;
    Mat Ker = left_kernel(A);
    auto kernel_set = enumerate_span(Ker);
    std::set<std::vector<u64>> brute;
    for (u64 x0 = 0; x0 < 9; ++x0)
      for (u64 x1 = 0; x1 < 9; ++x1) {
        std::vector<u64> v{x0, x1};
        u64 a = (x0 * A.at(0, 0) + x1 * A.at(1, 0)) % 9;
        u64 b = (x0 * A.at(0, 1) + x1 * A.at(1, 1)) % 9;
        if (a == 0 && b == 0) brute.insert(v);
      }
    CHECK(kernel_set == brute);
  }
}

TEST_CASE("rank-nullity via lengths over Z/9, sizes <= 2x2") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t r = 1 + rng() % 2, c = 1 + rng() % 2;
    Mat A(r, c, 3, 2);
    for (auto& x : A.a) x = rng() % 9;
    unsigned len_image = span_length(howell_form(A));
    unsigned len_kernel = span_length(left_kernel(A));
    CHECK(len_image + len_kernel == 2 * r);  // length of (Z/9)^r is 2r
  }
}

TEST_CASE("solve: pinned examples over Z/9") {
  Mat A = mat_from(3, 2, {{3}}, 1);
  auto x = solve_left(A, {6});
  REQUIRE(x.has_value());
  CHECK((*x)[0] * 3 % 9 == 6);
  CHECK(*x == std::vector<u64>{2});  // deterministic first solution

  CHECK(!solve_left(A, {1}).has_value());

  auto z = solve_left(A, {0});
  REQUIRE(z.has_value());
  CHECK(*z == std::vector<u64>{0});
}

TEST_CASE("solve: agreement with exhaustive search on random systems") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 60; ++trial) {
    Mat A(2, 2, 3, 2);
    for (auto& x : A.a) x = rng() % 9;
    std::vector<u64> b{rng() % 9, rng() % 9};
    bool brute = false;
    for (u64 x0 = 0; x0 < 9 && !brute; ++x0)
      for (u64 x1 = 0; x1 < 9 && !brute; ++x1) {
        u64 c0 = (x0 * A.at(0, 0) + x1 * A.at(1, 0)) % 9;
        u64 c1 = (x0 * A.at(0, 1) + x1 * A.at(1, 1)) % 9;
        if (c0 == b[0] && c1 == b[1]) brute = true;
      }
    auto sol = solve_left(A, b);
    CHECK(sol.has_value() == brute);
    if (sol) {
      u64 c0 = ((*sol)[0] * A.at(0, 0) + (*sol)[1] * A.at(1, 0)) % 9;
      u64 c1 = ((*sol)[0] * A.at(0, 1) + (*sol)[1] * A.at(1, 1)) % 9;
      CHECK(c0 == b[0]);
      CHECK(c1 == b[1]);
    }
  }
}

TEST_CASE("expand_scalars: identity, permutation blocks, functoriality") {
  auto R = make_ring(3, 2, {3});  // Z/9[C3]

  RMat I = RMat::identity(R, 2);
  CHECK(expand_scalars(I) == Mat::identity(6, 3, 2));

  // the generator s expands to a cyclic permutation block
  Mat S = expand_elem(GRElem::basis(R, 1));
  Mat P(3, 3, 3, 2);
  P.at(0, 1) = P.at(1, 2) = P.at(2, 0) = 1;
  CHECK(S == P);

  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 30; ++trial) {
    RMat A(R, 2, 2), B(R, 2, 2);
    for (auto& e : A.e)
      for (auto& c : e.c) c = rng() % 9;
    for (auto& e : B.e)
      for (auto& c : e.c) c = rng() % 9;
    CHECK(expand_scalars(rmat_mul(A, B)) == mat_mul(expand_scalars(A), expand_scalars(B)));
  }
}
