#include "ellipsf/polyops.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "ellipsf/errors.hpp"

namespace ellipsf {

namespace {

GaussRat rat_pow(const GaussRat& base, int e) {
  GaussRat p(1);
  for (int i = 0; i < e; ++i) p *= base;
  return p;
}

Rat rat_pow(const Rat& base, int e) {
  Rat p(1);
  for (int i = 0; i < e; ++i) p *= base;
  return p;
}

}  // namespace

MultiPoly MultiPoly::constant(int d, GaussRat c) {
  MultiPoly p(d);
  p.set(MIdx(d, 0), std::move(c));
  return p;
}

MultiPoly MultiPoly::monomial(int d, const MIdx& a, GaussRat c) {
  if (static_cast<int>(a.size()) != d) throw Error("monomial dimension mismatch");
  MultiPoly p(d);
  p.set(a, std::move(c));
  return p;
}

int MultiPoly::degree() const {
  int deg = -1;
  for (const auto& [a, c] : terms) deg = std::max(deg, total_degree(a));
  return deg;
}

GaussRat MultiPoly::coeff(const MIdx& a) const {
  auto it = terms.find(a);
  return it == terms.end() ? GaussRat(0) : it->second;
}

void MultiPoly::set(const MIdx& a, GaussRat c) {
  if (c.is_zero())
    terms.erase(a);
  else
    terms[a] = std::move(c);
}

void MultiPoly::add_term(const MIdx& a, const GaussRat& c) {
  auto it = terms.find(a);
  if (it == terms.end()) {
    if (!c.is_zero()) terms[a] = c;
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms.erase(it);
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
  if (d != o.d) throw Error("polynomial dimension mismatch");
  MultiPoly r = *this;
  for (const auto& [a, c] : o.terms) r.add_term(a, c);
  return r;
}

MultiPoly MultiPoly::operator-(const MultiPoly& o) const {
  return *this + o.scaled(GaussRat(-1));
}

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
  if (d != o.d) throw Error("polynomial dimension mismatch");
  MultiPoly r(d);
  for (const auto& [a, ca] : terms)
    for (const auto& [b, cb] : o.terms) r.add_term(midx_add(a, b), ca * cb);
  return r;
}

MultiPoly MultiPoly::scaled(const GaussRat& c) const {
  MultiPoly r(d);
  if (c.is_zero()) return r;
  for (const auto& [a, ca] : terms) r.terms[a] = ca * c;
  return r;
}

MultiPoly MultiPoly::pow(int m) const {
  if (m < 0) throw Error("negative polynomial power");
  MultiPoly r = constant(d, GaussRat(1));
  for (int i = 0; i < m; ++i) r = r * *this;
  return r;
}

MultiPoly MultiPoly::derivative(const MIdx& g) const {
  MultiPoly r(d);
  for (const auto& [a, c] : terms) {
    if (!midx_leq(g, a)) continue;
    // D^g x^a = a!/(a-g)! x^(a-g)
    MIdx rest = midx_sub(a, g);
    long long f = 1;
    for (int i = 0; i < d; ++i)
      for (int v = rest[i] + 1; v <= a[i]; ++v) f *= v;
    r.add_term(rest, c * GaussRat(f));
  }
  return r;
}

MultiPoly MultiPoly::homogeneous_part(int l) const {
  MultiPoly r(d);
  for (const auto& [a, c] : terms)
    if (total_degree(a) == l) r.terms[a] = c;
  return r;
}

GaussRat MultiPoly::eval(const std::vector<GaussRat>& pt) const {
  GaussRat acc(0);
  for (const auto& [a, c] : terms) {
    GaussRat t = c;
    for (int i = 0; i < d; ++i) t *= rat_pow(pt[i], a[i]);
    acc += t;
  }
  return acc;
}

std::complex<double> MultiPoly::eval(const std::vector<double>& pt) const {
  std::complex<double> acc(0.0);
  for (const auto& [a, c] : terms) {
    std::complex<double> t = to_complex(c);
    for (int i = 0; i < d; ++i)
      for (int e = 0; e < a[i]; ++e) t *= pt[i];
    acc += t;
  }
  return acc;
}

MultiPoly MultiPoly::substitute_linear(const RatMat& M) const {
  if (M.rows() != static_cast<std::size_t>(d) || M.cols() != static_cast<std::size_t>(d))
    throw Error("substitute_linear needs a d x d matrix");
  std::vector<MultiPoly> images;  // variable i maps to sum_j M(i,j) x_j
  for (int i = 0; i < d; ++i) {
    MultiPoly li(d);
    for (int j = 0; j < d; ++j) {
      MIdx e(d, 0);
      e[j] = 1;
      li.add_term(e, M.at(i, j));
    }
    images.push_back(std::move(li));
  }
  MultiPoly r(d);
  for (const auto& [a, c] : terms) {
    MultiPoly t = constant(d, c);
    for (int i = 0; i < d; ++i) t = t * images[i].pow(a[i]);
    r = r + t;
  }
  return r;
}

std::string MultiPoly::to_string() const {
  if (terms.empty()) return "0";
  std::vector<MIdx> keys;
  for (const auto& [a, c] : terms) keys.push_back(a);
  std::sort(keys.begin(), keys.end(), graded_less);
  std::ostringstream os;
  bool first = true;
  for (const auto& a : keys) {
    GaussRat c = coeff(a);
    std::string cs = gauss_to_string(c);
    bool negated = false;
    if (!first && !cs.empty() && cs[0] == '-' && c.im == 0) {
      cs = cs.substr(1);
      negated = true;
    }
    if (!first) os << (negated ? " - " : " + ");
    first = false;
    std::string vars;
    for (int i = 0; i < d; ++i) {
      if (a[i] == 0) continue;
      if (!vars.empty()) vars += "*";
      vars += "x" + std::to_string(i + 1);
      if (a[i] > 1) vars += "^" + std::to_string(a[i]);
    }
    if (vars.empty()) {
      os << (c.im != 0 ? "(" + cs + ")" : cs);
    } else if (c == GaussRat(1)) {
      os << vars;
    } else if (c == GaussRat(-1) && !negated) {
      os << "-" << vars;
    } else if (cs == "1") {
      os << vars;
    } else {
      os << (c.im != 0 && c.re != 0 ? "(" + cs + ")" : cs) << "*" << vars;
    }
  }
  return os.str();
}

MultiPoly diff_apply(const MultiPoly& P, const MultiPoly& Q) {
  if (P.d != Q.d) throw Error("polynomial dimension mismatch");
  MultiPoly r(P.d);
  for (const auto& [a, c] : P.terms) {
    MultiPoly da = Q.derivative(a);
    r = r + da.scaled(c * neg_i_pow(total_degree(a)));
  }
  return r;
}

MultiPoly translate(const MultiPoly& P, const std::vector<Rat>& h) {
  if (static_cast<int>(h.size()) != P.d) throw Error("translate dimension mismatch");
  MultiPoly r(P.d);
  for (const auto& [a, c] : P.terms) {
    // (x+h)^a = sum_{b<=a} mbinom(a,b) h^(a-b) x^b
    std::vector<MIdx> subs;
    MIdx b(P.d, 0);
    std::function<void(int)> rec = [&](int i) {
      if (i == P.d) {
        GaussRat f = c * GaussRat(mbinom(a, b));
        for (int j = 0; j < P.d; ++j) f *= GaussRat(rat_pow(h[j], a[j] - b[j]));
        r.add_term(b, f);
        return;
      }
      for (b[i] = 0; b[i] <= a[i]; ++b[i]) rec(i + 1);
      b[i] = 0;
    };
    rec(0);
  }
  return r;
}

std::vector<GaussRat> monomial_row(const std::vector<Rat>& y, const GradedBasis& g) {
  std::vector<GaussRat> row(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    Rat v(1);
    for (int j = 0; j < g.dim(); ++j) v *= rat_pow(y[j], g[i][j]);
    row[i] = GaussRat(v);
  }
  return row;
}

RatMat pascal_matrix(const std::vector<Rat>& y, int d, int L) {
  GradedBasis g(d, L);
  RatMat M(g.size(), g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    const MIdx& b = g[j];
    for (std::size_t k = 0; k < g.size(); ++k) {
      const MIdx& a = g[k];
      if (!midx_leq(b, a)) continue;
      Rat v(mbinom(a, b));
      for (int i = 0; i < d; ++i) v *= rat_pow(y[i], a[i] - b[i]);
      M.at(j, k) = GaussRat(v);
    }
  }
  return M;
}

RatMat bigD_matrix(const MultiPoly& S, int L) {
  GradedBasis g(S.d, L);
  RatMat M(g.size(), g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    const MIdx& b = g[j];
    for (std::size_t k = 0; k < g.size(); ++k) {
      const MIdx& a = g[k];
      if (!midx_leq(b, a)) continue;
      MIdx gam = midx_sub(a, b);
      GaussRat dval = S.coeff(gam) * GaussRat(mfact(gam));  // (D^gam S)(0)
      if (dval.is_zero()) continue;
      M.at(j, k) = neg_i_pow(total_degree(gam)) * GaussRat(mbinom(a, b)) * dval;
    }
  }
  return M;
}

RatMat bigD_block(const MultiPoly& S, int l, int L) {
  if (l < 0 || l > L) throw Error("bigD_block needs 0 <= l <= L");
  auto rows_idx = homogeneous_layer(S.d, l);
  auto cols_idx = homogeneous_layer(S.d, L);
  RatMat M(rows_idx.size(), cols_idx.size());
  for (std::size_t j = 0; j < rows_idx.size(); ++j)
    for (std::size_t k = 0; k < cols_idx.size(); ++k) {
      const MIdx& b = rows_idx[j];
      const MIdx& a = cols_idx[k];
      if (!midx_leq(b, a)) continue;
      MIdx gam = midx_sub(a, b);
      GaussRat dval = S.coeff(gam) * GaussRat(mfact(gam));
      if (dval.is_zero()) continue;
      M.at(j, k) = neg_i_pow(total_degree(gam)) * GaussRat(mbinom(a, b)) * dval;
    }
  return M;
}

PolynomialSpace PolynomialSpace::from_polys(int d, const std::vector<MultiPoly>& ps) {
  int L = 0;
  for (const auto& p : ps) L = std::max(L, p.degree());
  GradedBasis g(d, L);
  RatMat rows(ps.size(), g.size());
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (const auto& [a, c] : ps[i].terms) rows.at(i, g.position(a)) = c;
  return from_rows(d, L, std::move(rows));
}

PolynomialSpace PolynomialSpace::from_rows(int d, int L, RatMat rows) {
  PolynomialSpace s;
  s.d = d;
  s.L = L;
  s.rows = std::move(rows);
  if (s.rows.cols() != static_cast<std::size_t>(dim_g(d, L)))
    throw Error("coefficient row length does not match graded basis");
  s.canonicalize();
  return s;
}

std::vector<MultiPoly> PolynomialSpace::polys() const {
  std::vector<MultiPoly> ps;
  for (std::size_t i = 0; i < rows.rows(); ++i) ps.push_back(poly(i));
  return ps;
}

MultiPoly PolynomialSpace::poly(std::size_t i) const {
  GradedBasis g(d, L);
  MultiPoly p(d);
  for (std::size_t j = 0; j < rows.cols(); ++j)
    if (!rows.at(i, j).is_zero()) p.set(g[j], rows.at(i, j));
  return p;
}

bool PolynomialSpace::contains(const MultiPoly& P) const {
  if (P.d != d) return false;
  if (P.degree() > L) return false;
  GradedBasis g(d, L);
  std::vector<GaussRat> v(g.size());
  for (const auto& [a, c] : P.terms) v[g.position(a)] = c;
  return in_row_space(rows, v);
}

bool PolynomialSpace::equals(const PolynomialSpace& o) const {
  if (d != o.d) return false;
  int L2 = std::max(L, o.L);
  return subspace_equal(padded_to(L2).rows, o.padded_to(L2).rows);
}

PolynomialSpace PolynomialSpace::intersect(const PolynomialSpace& o) const {
  if (d != o.d) throw Error("space dimension mismatch");
  int L2 = std::max(L, o.L);
  PolynomialSpace r;
  r.d = d;
  r.L = L2;
  r.rows = subspace_intersect(padded_to(L2).rows, o.padded_to(L2).rows);
  r.canonicalize();
  return r;
}

PolynomialSpace PolynomialSpace::padded_to(int L2) const {
  if (L2 < L) throw Error("cannot pad to a smaller degree");
  if (L2 == L) return *this;
  // The graded basis of degree L is a prefix of the one of degree L2, so
  // padding appends zero columns.
  PolynomialSpace s;
  s.d = d;
  s.L = L2;
  s.shift_invariant = shift_invariant;
  s.scale_invariant = scale_invariant;
  s.rows = RatMat(rows.rows(), static_cast<std::size_t>(dim_g(d, L2)));
  for (std::size_t i = 0; i < rows.rows(); ++i)
    for (std::size_t j = 0; j < rows.cols(); ++j) s.rows.at(i, j) = rows.at(i, j);
  return s;
}

void PolynomialSpace::canonicalize() {
  rows = row_basis(rows);
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    // Clear denominators, then divide by the integer content.
    BigInt l = 1;
    for (std::size_t j = 0; j < rows.cols(); ++j) {
      const GaussRat& e = rows.at(i, j);
      l = lcm(l, BigInt(denominator(e.re)));
      l = lcm(l, BigInt(denominator(e.im)));
    }
    BigInt g = 0;
    for (std::size_t j = 0; j < rows.cols(); ++j) {
      const GaussRat& e = rows.at(i, j);
      g = gcd(g, BigInt(numerator(e.re * Rat(l))));
      g = gcd(g, BigInt(numerator(e.im * Rat(l))));
    }
    if (g == 0) continue;
    GaussRat f = GaussRat(Rat(l, g));
    for (std::size_t j = 0; j < rows.cols(); ++j) rows.at(i, j) *= f;
  }
}

PolynomialSpace kernel_polynomials(const MultiPoly& P, int L) {
  RatMat K = kernel_basis(bigD_matrix(P, L));
  PolynomialSpace s = PolynomialSpace::from_rows(P.d, L, std::move(K));
  for (const auto& q : s.polys())
    if (!diff_apply(P, q).is_zero())
      throw Error("internal: null-space polynomial not annihilated");
  s.shift_invariant = true;  // constant-coefficient operator kernel
  return s;
}

}  // namespace ellipsf
