#include "eskit/linalg.hpp"

#include <algorithm>
#include <cassert>

namespace esk {

Mat mat_mul(const Mat& A, const Mat& B) {
  if (A.cols != B.rows || A.mod != B.mod) throw usage_error("mat_mul: shape/modulus mismatch");
  Mat C(A.rows, B.cols, A.p, A.n);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t k = 0; k < A.cols; ++k) {
      u64 x = A.at(i, k);
      if (!x) continue;
      for (std::size_t j = 0; j < B.cols; ++j)
        C.at(i, j) = (C.at(i, j) + x * B.at(k, j)) % C.mod;
    }
  return C;
}

Mat mat_add(const Mat& A, const Mat& B) {
  if (A.rows != B.rows || A.cols != B.cols || A.mod != B.mod)
    throw usage_error("mat_add: shape/modulus mismatch");
  Mat C = A;
  for (std::size_t i = 0; i < C.a.size(); ++i) C.a[i] = (C.a[i] + B.a[i]) % C.mod;
  return C;
}

Mat mat_scale(const Mat& A, u64 c) {
  Mat C = A;
  c %= C.mod;
  for (auto& x : C.a) x = x * c % C.mod;
  return C;
}

Mat transpose(const Mat& A) {
  Mat C(A.cols, A.rows, A.p, A.n);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) C.at(j, i) = A.at(i, j);
  return C;
}

Mat hstack(const Mat& A, const Mat& B) {
  if (A.rows != B.rows || A.mod != B.mod) throw usage_error("hstack: shape/modulus mismatch");
  Mat C(A.rows, A.cols + B.cols, A.p, A.n);
  for (std::size_t i = 0; i < A.rows; ++i) {
    for (std::size_t j = 0; j < A.cols; ++j) C.at(i, j) = A.at(i, j);
    for (std::size_t j = 0; j < B.cols; ++j) C.at(i, A.cols + j) = B.at(i, j);
  }
  return C;
}

Mat vstack(const Mat& A, const Mat& B) {
  if (A.cols != B.cols || A.mod != B.mod) throw usage_error("vstack: shape/modulus mismatch");
  Mat C(A.rows + B.rows, A.cols, A.p, A.n);
  std::copy(A.a.begin(), A.a.end(), C.a.begin());
  std::copy(B.a.begin(), B.a.end(), C.a.begin() + static_cast<std::ptrdiff_t>(A.a.size()));
  return C;
}

Mat submat_cols(const Mat& A, std::size_t c0, std::size_t c1) {
  Mat C(A.rows, c1 - c0, A.p, A.n);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = c0; j < c1; ++j) C.at(i, j - c0) = A.at(i, j);
  return C;
}

namespace {

// Echelonize rows in place.  Pivot choice per column: minimal p-valuation,
// then smallest representative after unit normalization (the representative
// is the p-power itself, so valuation alone decides; ties broken by row
// order, which is stable).  Pivots are normalized to pure p-powers and all
// other rows are reduced at the pivot column.
void echelonize(std::vector<std::vector<u64>>& rows, std::size_t cols, u64 p, unsigned n, u64 mod) {
  std::size_t top = 0;
  for (std::size_t col = 0; col < cols && top < rows.size(); ++col) {
    std::size_t best = rows.size();
    unsigned bestv = n;
    for (std::size_t i = top; i < rows.size(); ++i) {
      u64 e = rows[i][col];
      if (!e) continue;
      unsigned v = valuation(e, p, n);
      if (v < bestv) {
        bestv = v;
        best = i;
      }
    }
    if (best == rows.size()) continue;
    std::swap(rows[top], rows[best]);
    // normalize pivot to p^v
    u64 piv = rows[top][col];
    u64 pv = ipow(p, bestv);
    u64 unit = piv / pv;  // exact: piv = unit * p^v with unit a unit
    u64 ui = invmod(unit, mod);
    if (ui != 1)
      for (auto& x : rows[top]) x = x * ui % mod;
    // eliminate every other row at this column (possible iff val >= bestv;
    // rows below always qualify by pivot minimality... not necessarily for
    // rows above, whose entry here can have smaller valuation only if they
    // had an earlier pivot -- those we merely reduce when possible)
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == top) continue;
      u64 e = rows[i][col];
      if (!e) continue;
      unsigned v = valuation(e, p, n);
      if (v < bestv) continue;  // can happen for rows above; reduced in back pass
      u64 f = e / pv;
      for (std::size_t j = 0; j < cols; ++j)
        rows[i][j] = (rows[i][j] + (mod - f * rows[top][j] % mod)) % mod;
    }
    ++top;
  }
  // drop zero rows
  rows.erase(std::remove_if(rows.begin(), rows.end(),
                            [](const std::vector<u64>& r) {
                              return std::all_of(r.begin(), r.end(), [](u64 x) { return x == 0; });
                            }),
             rows.end());
}

std::size_t lead_col(const std::vector<u64>& r) {
  for (std::size_t j = 0; j < r.size(); ++j)
    if (r[j]) return j;
  return r.size();
}

}  // namespace

Mat howell_form(const Mat& M) {
  const u64 p = M.p, mod = M.mod;
  const unsigned n = M.n;
  const std::size_t cols = M.cols;
  std::vector<std::vector<u64>> rows;
  for (std::size_t i = 0; i < M.rows; ++i) {
    auto r = M.row(i);
    if (std::any_of(r.begin(), r.end(), [](u64 x) { return x != 0; })) rows.push_back(std::move(r));
  }
  bool changed = true;
  while (changed) {
    echelonize(rows, cols, p, n, mod);
    changed = false;
    // Howell closure: for a pivot p^v with v > 0, p^{n-v} times that row has
    // zero leading entry and must be spanned by the later rows.
    std::size_t count = rows.size();
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t c = lead_col(rows[i]);
      unsigned v = valuation(rows[i][c], p, n);
      if (v == 0) continue;
      u64 s = ipow(p, n - v);
      std::vector<u64> extra(cols);
      for (std::size_t j = 0; j < cols; ++j) extra[j] = rows[i][j] * s % mod;
      // reduce against rows with later pivots
      for (std::size_t k = i + 1; k < count; ++k) {
        std::size_t ck = lead_col(rows[k]);
        u64 e = extra[ck];
        if (!e) continue;
        unsigned vk = valuation(rows[k][ck], p, n);
        if (valuation(e, p, n) < vk) continue;
        u64 f = e / ipow(p, vk);
        for (std::size_t j = 0; j < cols; ++j)
          extra[j] = (extra[j] + (mod - f * rows[k][j] % mod)) % mod;
      }
      if (std::any_of(extra.begin(), extra.end(), [](u64 x) { return x != 0; })) {
        rows.push_back(std::move(extra));
        changed = true;
      }
    }
  }
  // back-substitution pass, left to right: entries above each pivot reduced
  // modulo the pivot value
  for (std::size_t j = 0; j < rows.size(); ++j) {
    std::size_t c = lead_col(rows[j]);
    unsigned v = valuation(rows[j][c], p, n);
    u64 pv = ipow(p, v);
    for (std::size_t i = 0; i < j; ++i) {
      u64 e = rows[i][c];
      u64 f = e / pv;
      if (!f) continue;
      for (std::size_t k = 0; k < cols; ++k)
        rows[i][k] = (rows[i][k] + (mod - f * rows[j][k] % mod)) % mod;
    }
  }
  Mat H(rows.size(), cols, p, n);
  for (std::size_t i = 0; i < rows.size(); ++i) H.set_row(i, rows[i]);
  return H;
}

Mat left_kernel(const Mat& M) {
  Mat aug = hstack(M, Mat::identity(M.rows, M.p, M.n));
  Mat H = howell_form(aug);
  Mat K(0, M.rows, M.p, M.n);
  for (std::size_t i = 0; i < H.rows; ++i) {
    bool zero = true;
    for (std::size_t j = 0; j < M.cols && zero; ++j)
      if (H.at(i, j)) zero = false;
    if (zero) {
      std::vector<u64> r(M.rows);
      for (std::size_t j = 0; j < M.rows; ++j) r[j] = H.at(i, M.cols + j);
      K.append_row(r);
    }
  }
  return howell_form(K);
}

Mat ker_into(const Mat& A, const Mat& L) {
  if (L.rows == 0) return left_kernel(A);
  if (A.cols != L.cols || A.mod != L.mod) throw usage_error("ker_into: shape mismatch");
  Mat S = vstack(A, L);
  Mat K = left_kernel(S);  // rows (x, y) with xA + yL = 0
  Mat X(0, A.rows, A.p, A.n);
  for (std::size_t i = 0; i < K.rows; ++i) {
    std::vector<u64> r(A.rows);
    for (std::size_t j = 0; j < A.rows; ++j) r[j] = K.at(i, j);
    X.append_row(r);
  }
  return howell_form(X);
}

std::optional<std::vector<u64>> solve_left(const Mat& A, const std::vector<u64>& b) {
  if (b.size() != A.cols) throw usage_error("solve_left: dimension mismatch");
  Mat aug = hstack(A, Mat::identity(A.rows, A.p, A.n));
  Mat H = howell_form(aug);
  std::vector<u64> r = b;
  for (auto& x : r) x %= A.mod;
  std::vector<u64> x(A.rows, 0);
  for (std::size_t i = 0; i < H.rows; ++i) {
    std::size_t c = A.cols;
    for (std::size_t j = 0; j < A.cols; ++j)
      if (H.at(i, j)) {
        c = j;
        break;
      }
    if (c == A.cols) break;  // remaining rows have zero A-part
    u64 e = r[c];
    if (!e) continue;
    unsigned v = valuation(H.at(i, c), A.p, A.n);
    if (valuation(e, A.p, A.n) < v) continue;
    u64 f = e / ipow(A.p, v);
    for (std::size_t j = 0; j < A.cols; ++j)
      r[j] = (r[j] + (A.mod - f * H.at(i, j) % A.mod)) % A.mod;
    for (std::size_t j = 0; j < A.rows; ++j)
      x[j] = (x[j] + f * H.at(i, A.cols + j)) % A.mod;
  }
  for (u64 e : r)
    if (e) return std::nullopt;
  return x;
}

std::vector<u64> reduce_mod(const std::vector<u64>& v, const Mat& H) {
  std::vector<u64> r = v;
  for (auto& x : r) x %= H.mod;
  for (std::size_t i = 0; i < H.rows; ++i) {
    std::size_t c = H.cols;
    for (std::size_t j = 0; j < H.cols; ++j)
      if (H.at(i, j)) {
        c = j;
        break;
      }
    if (c == H.cols) continue;
    unsigned v0 = valuation(H.at(i, c), H.p, H.n);
    u64 e = r[c];
    if (valuation(e, H.p, H.n) < v0) continue;
    u64 f = e / ipow(H.p, v0);
    if (!f) continue;
    for (std::size_t j = 0; j < H.cols; ++j)
      r[j] = (r[j] + (H.mod - f * H.at(i, j) % H.mod)) % H.mod;
  }
  return r;
}

bool in_span(const std::vector<u64>& v, const Mat& H) {
  auto r = reduce_mod(v, H);
  return std::all_of(r.begin(), r.end(), [](u64 x) { return x == 0; });
}

std::optional<std::vector<u64>> coords_in(const std::vector<u64>& v, const Mat& H) {
  return solve_left(H, v);
}

unsigned span_length(const Mat& H) {
  unsigned len = 0;
  for (std::size_t i = 0; i < H.rows; ++i)
    for (std::size_t j = 0; j < H.cols; ++j)
      if (H.at(i, j)) {
        len += H.n - valuation(H.at(i, j), H.p, H.n);
        break;
      }
  return len;
}

Mat lattice_sum(const Mat& A, const Mat& B) { return howell_form(vstack(A, B)); }

Mat lattice_intersect(const Mat& A, const Mat& B) {
  if (A.cols != B.cols || A.mod != B.mod) throw usage_error("lattice_intersect: shape mismatch");
  if (A.rows == 0 || B.rows == 0) return Mat(0, A.cols, A.p, A.n);
  // (u, v) with uA = vB: left kernel of [A; -B]
  Mat negB = mat_scale(B, A.mod - 1);
  Mat K = left_kernel(vstack(A, negB));
  Mat C(0, A.cols, A.p, A.n);
  for (std::size_t i = 0; i < K.rows; ++i) {
    std::vector<u64> u(A.rows);
    for (std::size_t j = 0; j < A.rows; ++j) u[j] = K.at(i, j);
    std::vector<u64> w(A.cols, 0);
    for (std::size_t j = 0; j < A.rows; ++j)
      if (u[j])
        for (std::size_t k = 0; k < A.cols; ++k)
          w[k] = (w[k] + u[j] * A.at(j, k)) % A.mod;
    C.append_row(w);
  }
  return howell_form(C);
}

}  // namespace esk
