#pragma once

// Exact arithmetic over Q and Q(i), plus dense matrices with reduced row
// echelon form, canonical null-space bases, and row-space operations.
// Everything here is exact; floating point lives elsewhere.

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ellipsf {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

double to_double(const Rat& x);

// "p/q" with q omitted when it equals 1.
std::string rat_to_string(const Rat& x);

// Accepts "p", "-p", "p/q"; throws BadArguments on anything else.
Rat rat_from_string(std::string_view s);

// Element of Q(i).
struct GaussRat {
  Rat re;
  Rat im;

  GaussRat() = default;
  GaussRat(Rat r) : re(std::move(r)) {}  // NOLINT: implicit by design
  GaussRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}
  GaussRat(long long n) : re(n) {}  // NOLINT: implicit by design

  static GaussRat i() { return GaussRat(Rat(0), Rat(1)); }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }
  GaussRat conj() const { return GaussRat(re, -im); }
  Rat norm2() const { return re * re + im * im; }

  GaussRat& operator+=(const GaussRat& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GaussRat& operator-=(const GaussRat& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  GaussRat& operator*=(const GaussRat& o) {
    Rat r = re * o.re - im * o.im;
    Rat i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }
  GaussRat& operator/=(const GaussRat& o);

  friend GaussRat operator+(GaussRat a, const GaussRat& b) { return a += b; }
  friend GaussRat operator-(GaussRat a, const GaussRat& b) { return a -= b; }
  friend GaussRat operator*(GaussRat a, const GaussRat& b) { return a *= b; }
  friend GaussRat operator/(GaussRat a, const GaussRat& b) { return a /= b; }
  friend GaussRat operator-(const GaussRat& a) {
    return GaussRat(-a.re, -a.im);
  }
  friend bool operator==(const GaussRat& a, const GaussRat& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussRat& a, const GaussRat& b) {
    return !(a == b);
  }
};

// i^k and (-i)^k for any integer k (negative allowed).
GaussRat i_pow(long long k);
GaussRat neg_i_pow(long long k);

std::complex<double> to_complex(const GaussRat& z);
std::string gauss_to_string(const GaussRat& z);

// Dense row-major matrix over Q(i).
class RatMat {
 public:
  RatMat() = default;
  RatMat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}

  static RatMat identity(std::size_t n);
  static RatMat from_rows(std::vector<std::vector<GaussRat>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  GaussRat& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const GaussRat& at(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }

  RatMat transpose() const;
  RatMat conj() const;
  bool is_zero() const;

  RatMat operator*(const RatMat& o) const;
  RatMat operator+(const RatMat& o) const;
  RatMat operator-(const RatMat& o) const;
  RatMat scaled(const GaussRat& c) const;
  friend bool operator==(const RatMat& a, const RatMat& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }

  // Appends the rows of o (same column count required).
  void append_rows(const RatMat& o);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<GaussRat> a_;
};

struct RrefResult {
  RatMat R;
  std::vector<std::size_t> pivots;
};

// Unique reduced row echelon form; pivots lists pivot column indices.
RrefResult rref(RatMat M);

std::size_t rank(const RatMat& M);

// Canonical basis of {v : M v = 0}, one vector per row, derived from the
// RREF: free columns taken in ascending order, the vector for free column f
// has entry 1 there and -R(r, f) at each pivot column.
RatMat kernel_basis(const RatMat& M);

// Canonical basis of the span of the rows: the nonzero rows of the RREF.
RatMat row_basis(const RatMat& M);

bool subspace_equal(const RatMat& B1, const RatMat& B2);

// Canonical basis of span(rows of B1) ∩ span(rows of B2).
RatMat subspace_intersect(const RatMat& B1, const RatMat& B2);

// Membership of v in the row space of B.
bool in_row_space(const RatMat& B, const std::vector<GaussRat>& v);

// One solution of A x = b, if any.
std::optional<std::vector<GaussRat>> solve_linear(
    const RatMat& A, const std::vector<GaussRat>& b);

// Exact inverse of a square matrix; nullopt when singular.
std::optional<RatMat> inverse(const RatMat& M);

// Exact determinant of a square matrix.
GaussRat determinant(const RatMat& M);

}  // namespace ellipsf
