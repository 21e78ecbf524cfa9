#pragma once

// Exact multivariate polynomials over Q(i), differential-operator action
// P(-iD), the graded Pascal and derivative block matrices, and canonical
// polynomial spaces extracted from their null spaces.

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "ellipsf/multiindex.hpp"
#include "ellipsf/rational.hpp"

namespace ellipsf {

struct MultiPoly {
  int d = 0;
  std::map<MIdx, GaussRat> terms;  // zero coefficients never stored

  MultiPoly() = default;
  explicit MultiPoly(int dim) : d(dim) {}

  static MultiPoly zero(int d) { return MultiPoly(d); }
  static MultiPoly constant(int d, GaussRat c);
  static MultiPoly monomial(int d, const MIdx& a, GaussRat c);

  bool is_zero() const { return terms.empty(); }
  int degree() const;  // -1 for the zero polynomial
  GaussRat coeff(const MIdx& a) const;
  void set(const MIdx& a, GaussRat c);  // erases when c == 0
  void add_term(const MIdx& a, const GaussRat& c);

  MultiPoly operator+(const MultiPoly& o) const;
  MultiPoly operator-(const MultiPoly& o) const;
  MultiPoly operator*(const MultiPoly& o) const;
  MultiPoly scaled(const GaussRat& c) const;
  MultiPoly pow(int m) const;
  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    return a.d == b.d && a.terms == b.terms;
  }

  MultiPoly derivative(const MIdx& g) const;  // D^g
  MultiPoly homogeneous_part(int l) const;

  GaussRat eval(const std::vector<GaussRat>& pt) const;
  std::complex<double> eval(const std::vector<double>& pt) const;

  // P(M x) for an exact square matrix M (columns act on the variables).
  MultiPoly substitute_linear(const RatMat& M) const;

  // Human-readable form such as "x1^2 - x2^2" (graded order).
  std::string to_string() const;
};

// P(-iD) applied to Q: each monomial xi^a of P acts as (-i)^|a| D^a.
MultiPoly diff_apply(const MultiPoly& P, const MultiPoly& Q);

// P(. + h), exact.
MultiPoly translate(const MultiPoly& P, const std::vector<Rat>& h);

// Row vector of monomials y^a over the graded basis (the evaluation
// functional used with pascal_matrix).
std::vector<GaussRat> monomial_row(const std::vector<Rat>& y, const GradedBasis& g);

// Graded Pascal matrix: entry (row b, col a) = mbinom(a, b) y^(a-b) when
// b <= a, else 0.  Upper block triangular; identity at y = 0.
RatMat pascal_matrix(const std::vector<Rat>& y, int d, int L);

// Graded derivative matrix of S at 0: entry (row b, col a) =
// (-i)^|a-b| mbinom(a, b) (D^(a-b) S)(0).
RatMat bigD_matrix(const MultiPoly& S, int L);

// The d(l) x d(L) block with rows in layer l and columns in layer L.
RatMat bigD_block(const MultiPoly& S, int l, int L);

// Polynomial space with canonical coefficient rows over a graded basis.
// Rows store monomial coefficients: row v represents sum_a v[a] x^a.
struct PolynomialSpace {
  int d = 0;
  int L = 0;  // coefficient space is the graded basis of degree <= L
  RatMat rows;
  bool shift_invariant = false;
  bool scale_invariant = false;

  static PolynomialSpace from_polys(int d, const std::vector<MultiPoly>& ps);
  static PolynomialSpace from_rows(int d, int L, RatMat rows);

  std::size_t dim() const { return rows.rows(); }
  std::vector<MultiPoly> polys() const;
  MultiPoly poly(std::size_t i) const;
  bool contains(const MultiPoly& P) const;
  bool equals(const PolynomialSpace& o) const;  // pads to a common degree
  PolynomialSpace intersect(const PolynomialSpace& o) const;
  PolynomialSpace padded_to(int L2) const;

  // RREF rows rescaled to primitive integer vectors with positive leading
  // (graded-lex-first) coefficient.
  void canonicalize();
};

// Basis of polynomials of degree <= L annihilated by P(-iD): the null space
// of bigD_matrix(P, L) read off as monomial coefficients.  Every element is
// re-verified by diff_apply.
PolynomialSpace kernel_polynomials(const MultiPoly& P, int L);

}  // namespace ellipsf
