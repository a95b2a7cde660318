#pragma once

#include <optional>
#include <vector>

#include "eskit/base.hpp"

// Exact linear algebra over Z/p^n (a chain ring).  Row spans are put into
// Howell normal form, which is a canonical representative: two matrices have
// equal row spans iff their Howell forms are identical.  All maps act on the
// right of row vectors: a matrix A with r rows and c columns is the map
// x |-> x*A from (Z/p^n)^r to (Z/p^n)^c.

namespace esk {

struct Mat {
  std::size_t rows = 0, cols = 0;
  u64 p = 0;
  unsigned n = 0;
  u64 mod = 0;  // p^n
  std::vector<u64> a;  // row-major, entries reduced mod p^n

  Mat() = default;
  Mat(std::size_t r, std::size_t c, u64 p_, unsigned n_)
      : rows(r), cols(c), p(p_), n(n_), mod(ipow(p_, n_)), a(r * c, 0) {}

  u64& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  u64 at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static Mat identity(std::size_t k, u64 p, unsigned n) {
    Mat m(k, k, p, n);
    for (std::size_t i = 0; i < k; ++i) m.at(i, i) = 1 % m.mod;
    return m;
  }

  bool operator==(const Mat& o) const {
    return rows == o.rows && cols == o.cols && mod == o.mod && a == o.a;
  }

  std::vector<u64> row(std::size_t i) const {
    return std::vector<u64>(a.begin() + static_cast<std::ptrdiff_t>(i * cols),
                            a.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols));
  }
  void set_row(std::size_t i, const std::vector<u64>& r) {
    for (std::size_t j = 0; j < cols; ++j) at(i, j) = r[j] % mod;
  }
  void append_row(const std::vector<u64>& r) {
    for (std::size_t j = 0; j < cols; ++j) a.push_back(r[j] % mod);
    ++rows;
  }
};

Mat mat_mul(const Mat& A, const Mat& B);
Mat mat_add(const Mat& A, const Mat& B);
Mat mat_scale(const Mat& A, u64 c);
Mat transpose(const Mat& A);
Mat hstack(const Mat& A, const Mat& B);
Mat vstack(const Mat& A, const Mat& B);
Mat submat_cols(const Mat& A, std::size_t c0, std::size_t c1);  // columns [c0, c1)

// Canonical Howell normal form of the row span of M.
Mat howell_form(const Mat& M);

// Rows generating the left kernel {x : x*M = 0}, in Howell form.
Mat left_kernel(const Mat& M);

// {x : x*A lies in the row span of L}; L must be over the same modulus and
// have L.cols == A.cols.  Result in Howell form, rows of length A.rows.
Mat ker_into(const Mat& A, const Mat& L);

// First solution of x*A = b in Howell elimination order, if any.
std::optional<std::vector<u64>> solve_left(const Mat& A, const std::vector<u64>& b);

// Reduce a row against a Howell basis H (canonical representative mod span).
std::vector<u64> reduce_mod(const std::vector<u64>& v, const Mat& H);
bool in_span(const std::vector<u64>& v, const Mat& H);

// Express v as x * H if possible (H need not be square); returns coordinates
// of length H.rows.
std::optional<std::vector<u64>> coords_in(const std::vector<u64>& v, const Mat& H);

// Z/p^n-length (composition length) of the row span of a Howell basis H.
unsigned span_length(const Mat& H);

Mat lattice_sum(const Mat& A, const Mat& B);
Mat lattice_intersect(const Mat& A, const Mat& B);

}  // namespace esk
