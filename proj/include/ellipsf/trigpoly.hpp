#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "ellipsf/multiindex.hpp"
#include "ellipsf/rational.hpp"

namespace ellipsf {

// Trigonometric polynomial with exact Gaussian-rational coefficients.
//
// A term keyed by the integer vector k represents c_k * exp(i k.xi / 2);
// keeping frequencies on this doubled lattice lets half-angle sines
// (needed for the quadratic-form lift) and integer-periodic masks share
// one exact ring.  A poly is integer-periodic exactly when its support
// consists of even keys.
class TrigPoly {
 public:
  using Key = std::vector<int>;

  TrigPoly() = default;
  explicit TrigPoly(int d) : d_(d) {}

  static TrigPoly zero(int d) { return TrigPoly(d); }
  static TrigPoly constant(int d, const GaussRat& c);
  static TrigPoly half_sin(int d, int i);  // sin(xi_i / 2)
  static TrigPoly full_sin(int d, int i);  // sin(xi_i)
  static TrigPoly full_cos(int d, int i);  // cos(xi_i)

  int dim() const { return d_; }
  bool is_zero() const { return c_.empty(); }
  const std::map<Key, GaussRat>& coeffs() const { return c_; }

  // Accumulates c into the coefficient at key k, erasing exact zeros.
  void add_term(const Key& k, const GaussRat& c);
  GaussRat coeff(const Key& k) const;

  TrigPoly operator+(const TrigPoly& o) const;
  TrigPoly operator-(const TrigPoly& o) const;
  TrigPoly operator*(const TrigPoly& o) const;
  TrigPoly scaled(const GaussRat& s) const;
  TrigPoly pow(int n) const;
  bool operator==(const TrigPoly& o) const { return d_ == o.d_ && c_ == o.c_; }

  // T(xi + 2*pi*s) for rational s.  Each coefficient picks up the phase
  // e^{i pi k.s}, which stays Gaussian-rational exactly when k.s is a
  // half-integer; anything else would leave the coefficient ring.
  // Throws UnsupportedShiftDenominator otherwise.
  TrigPoly shifted(const std::vector<Rat>& s) const;

  bool is_real() const;              // c_{-k} == conj(c_k) throughout
  bool is_integer_periodic() const;  // support on even keys only

  GaussRat value_at_zero() const;  // sum of coefficients
  // Exact value at the point 2*pi*t; same half-integer restriction on k.t
  // as shifted().
  GaussRat value_at(const std::vector<Rat>& t) const;
  std::complex<double> eval(const std::vector<double>& xi) const;

  // Exact Taylor coefficients about 2*pi*t through total degree L:
  // returns alpha -> coefficient of (xi - 2*pi*t)^alpha.
  std::map<MIdx, GaussRat> jet_at(const std::vector<Rat>& t, int L) const;
  // Floating-point Taylor coefficients about an arbitrary point.
  std::map<MIdx, std::complex<double>> jet_at_numeric(
      const std::vector<double>& xi0, int L) const;

  // Cosine/sine form for human consumption, e.g. "1/2 + 1/4*cos(x1)".
  std::string to_string() const;

 private:
  int d_ = 0;
  std::map<Key, GaussRat> c_;
};

}  // namespace ellipsf
