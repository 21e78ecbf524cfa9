#include "ellipsf/isotropic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "ellipsf/errors.hpp"

namespace ellipsf {

namespace {

BigInt rat_floor(const Rat& x) {
  BigInt n = numerator(x), d = denominator(x);
  if (n >= 0) return n / d;
  return -((-n + d - 1) / d);
}

bool is_integer(const Rat& x) { return denominator(x) == 1; }

// --- univariate polynomial helpers over Q (coefficients ascending) ---

std::vector<Rat> poly_trim(std::vector<Rat> p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}

std::vector<Rat> poly_deriv(const std::vector<Rat>& p) {
  std::vector<Rat> r;
  for (std::size_t i = 1; i < p.size(); ++i) r.push_back(p[i] * Rat(static_cast<long long>(i)));
  return poly_trim(r);
}

// Remainder of a by b (b nonzero).
std::vector<Rat> poly_mod(std::vector<Rat> a, const std::vector<Rat>& b) {
  a = poly_trim(a);
  while (a.size() >= b.size() && !a.empty()) {
    Rat f = a.back() / b.back();
    std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
    a = poly_trim(a);
  }
  return a;
}

std::vector<Rat> poly_div_exact(std::vector<Rat> a, const std::vector<Rat>& b) {
  a = poly_trim(a);
  std::vector<Rat> q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, Rat(0));
  while (a.size() >= b.size() && !a.empty()) {
    Rat f = a.back() / b.back();
    std::size_t shift = a.size() - b.size();
    q[shift] = f;
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
    a = poly_trim(a);
  }
  if (!a.empty()) throw Error("internal: inexact polynomial division");
  return poly_trim(q);
}

std::vector<Rat> poly_gcd(std::vector<Rat> a, std::vector<Rat> b) {
  a = poly_trim(a);
  b = poly_trim(b);
  while (!b.empty()) {
    auto r = poly_mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {  // monic normalization
    Rat lead = a.back();
    for (auto& c : a) c /= lead;
  }
  return a;
}

RatMat poly_eval_matrix(const std::vector<Rat>& p, const RatMat& A) {
  const std::size_t n = A.rows();
  RatMat acc(n, n);
  for (std::size_t i = p.size(); i-- > 0;) {
    acc = acc * A;
    for (std::size_t r = 0; r < n; ++r) acc.at(r, r) += GaussRat(p[i]);
  }
  return acc;
}

bool is_positive_definite(const RatMat& X) {
  for (std::size_t k = 1; k <= X.rows(); ++k) {
    RatMat minor(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) minor.at(i, j) = X.at(i, j);
    GaussRat det = determinant(minor);
    if (det.im != 0 || det.re <= 0) return false;
  }
  return true;
}

// Scale a symmetric matrix so the attached quadratic form has coprime
// integer coefficients (diagonal entries and doubled off-diagonals).
RatMat normalize_form(const RatMat& X) {
  BigInt l = 1, g = 0;
  std::vector<Rat> coeffs;
  for (std::size_t i = 0; i < X.rows(); ++i)
    for (std::size_t j = i; j < X.cols(); ++j)
      coeffs.push_back(i == j ? X.at(i, j).re : X.at(i, j).re * 2);
  for (const auto& c : coeffs) l = lcm(l, BigInt(denominator(c)));
  for (const auto& c : coeffs) g = gcd(g, BigInt(numerator(c * Rat(l))));
  if (g == 0) throw Error("internal: zero form in normalization");
  return X.scaled(GaussRat(Rat(l, g)));
}

Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

// Integer r with r^d = v, if it exists.
std::optional<long long> integer_root(long long v, int d) {
  if (v <= 0) return std::nullopt;
  auto r = static_cast<long long>(std::llround(std::pow(static_cast<double>(v), 1.0 / d)));
  for (long long c = std::max<long long>(1, r - 2); c <= r + 2; ++c) {
    long long p = 1;
    bool of = false;
    for (int i = 0; i < d; ++i) {
      p *= c;
      if (p > v * 4) {
        of = true;
        break;
      }
    }
    if (!of && p == v) return c;
  }
  return std::nullopt;
}

DilationMatrix DilationMatrix::create(Eigen::MatrixXi A) {
  if (A.rows() != A.cols() || A.rows() < 1)
    throw BadArguments("dilation matrix must be square");
  DilationMatrix m;
  m.A = std::move(A);
  m.d = static_cast<int>(m.A.rows());
  GaussRat det = determinant(m.rat());
  if (det.re == 0) throw BadArguments("dilation matrix is singular");
  Rat qd = det.re < 0 ? -det.re : det.re;
  m.q = static_cast<long long>(numerator(qd));
  Eigen::EigenSolver<Eigen::MatrixXd> es(m.real());
  for (int i = 0; i < m.d; ++i)
    if (std::abs(es.eigenvalues()[i]) <= 1.0 + 1e-9)
      throw BadArguments("matrix is not expanding: eigenvalue of modulus <= 1");
  return m;
}

RatMat DilationMatrix::rat() const {
  RatMat M(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) M.at(i, j) = GaussRat(Rat(A(i, j)));
  return M;
}

RatMat DilationMatrix::rat_transpose() const {
  RatMat M(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) M.at(i, j) = GaussRat(Rat(A(j, i)));
  return M;
}

std::vector<Rat> char_poly(const RatMat& A) {
  const std::size_t n = A.rows();
  std::vector<Rat> c(n + 1, Rat(0));
  c[n] = 1;
  RatMat M = RatMat::identity(n);  // running Faddeev-LeVerrier term
  for (std::size_t k = 1; k <= n; ++k) {
    M = A * M;
    Rat tr(0);
    for (std::size_t i = 0; i < n; ++i) tr += M.at(i, i).re;
    c[n - k] = -tr / Rat(static_cast<long long>(k));
    for (std::size_t i = 0; i < n; ++i) M.at(i, i) += GaussRat(c[n - k]);
  }
  return c;
}

IsotropyReport is_isotropic(const DilationMatrix& A) {
  IsotropyReport rep;
  RatMat Ar = A.rat();
  auto p = char_poly(Ar);
  auto g = poly_gcd(p, poly_deriv(p));
  auto m = g.size() <= 1 ? p : poly_div_exact(p, g);  // squarefree part
  rep.diagonalizable = poly_eval_matrix(m, Ar).is_zero();

  Eigen::EigenSolver<Eigen::MatrixXd> es(A.real());
  double lo = 1e300, hi = 0;
  for (int i = 0; i < A.d; ++i) {
    double mod = std::abs(es.eigenvalues()[i]);
    rep.moduli.push_back(mod);
    lo = std::min(lo, mod);
    hi = std::max(hi, mod);
  }
  rep.modulus_spread = (hi - lo) / hi;
  rep.equal_moduli = rep.modulus_spread < 1e-9;
  rep.isotropic = rep.diagonalizable && rep.equal_moduli;
  return rep;
}

IsotropicDecomposition decompose(const DilationMatrix& A) {
  IsotropyReport rep = is_isotropic(A);
  if (!rep.isotropic) {
    std::ostringstream os;
    os << "matrix is not isotropic (diagonalizable=" << rep.diagonalizable
       << ", modulus spread=" << rep.modulus_spread << ")";
    throw NotIsotropic(os.str());
  }

  IsotropicDecomposition dec;
  dec.d = A.d;
  dec.q = A.q;
  dec.eigen_modulus = std::pow(static_cast<double>(A.q), 1.0 / A.d);

  auto root = integer_root(A.q * A.q, A.d);
  if (root) {
    // Exact route: solve A X A^T = c X over symmetric X.
    Rat c(*root);
    const int d = A.d;
    std::vector<std::pair<int, int>> unknowns;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) unknowns.emplace_back(i, j);
    RatMat Ar = A.rat();
    RatMat sys(unknowns.size(), unknowns.size());
    std::size_t row = 0;
    for (int r = 0; r < d; ++r)
      for (int cc = r; cc < d; ++cc, ++row)
        for (std::size_t u = 0; u < unknowns.size(); ++u) {
          RatMat E(d, d);
          E.at(unknowns[u].first, unknowns[u].second) = GaussRat(1);
          E.at(unknowns[u].second, unknowns[u].first) = GaussRat(1);
          RatMat lhs = Ar * E * Ar.transpose() - E.scaled(GaussRat(c));
          sys.at(row, u) = lhs.at(r, cc);
        }
    RatMat sols = kernel_basis(sys);
    auto unpack = [&](std::size_t srow) {
      RatMat X(d, d);
      for (std::size_t u = 0; u < unknowns.size(); ++u) {
        X.at(unknowns[u].first, unknowns[u].second) = sols.at(srow, u);
        X.at(unknowns[u].second, unknowns[u].first) = sols.at(srow, u);
      }
      return X;
    };
    if (sols.rows() == 0)
      throw NoPositiveDefiniteSolution("similarity system has only the zero solution");
    RatMat X(0, 0);
    if (sols.rows() == 1) {
      X = unpack(0);
      if (!is_positive_definite(X)) {
        X = X.scaled(GaussRat(-1));
        if (!is_positive_definite(X))
          throw NoPositiveDefiniteSolution(
              "one-dimensional solution ray is indefinite");
      }
    } else {
      // Degenerate case: prefer the identity when it solves the system.
      RatMat id_check = Ar * Ar.transpose();
      if (id_check == RatMat::identity(d).scaled(GaussRat(c))) {
        X = RatMat::identity(d);
        dec.ambiguous_warning = true;
        dec.note = "solution space dimension " + std::to_string(sols.rows()) +
                   "; identity selected";
      } else {
        throw AmbiguousSolution("solution space dimension " +
                                std::to_string(sols.rows()) +
                                " with no canonical representative");
      }
    }
    dec.Q2 = normalize_form(X);
  } else {
    // Numeric route (q^(2/d) irrational): Q^2 from eigenvectors, then
    // rationalize entry by entry.
    Eigen::EigenSolver<Eigen::MatrixXd> es(A.real());
    Eigen::MatrixXcd T = es.eigenvectors();
    Eigen::MatrixXd S = (T * T.adjoint()).real();
    S /= S(0, 0);
    RatMat X(A.d, A.d);
    for (int i = 0; i < A.d; ++i)
      for (int j = 0; j < A.d; ++j) {
        bool found = false;
        for (long long den = 1; den <= 64 && !found; ++den) {
          double scaled = S(i, j) * static_cast<double>(den);
          long long num = std::llround(scaled);
          if (std::abs(scaled - static_cast<double>(num)) < 1e-9 * den) {
            X.at(i, j) = GaussRat(Rat(num, den));
            found = true;
          }
        }
        if (!found)
          throw Error("Q^2 entry could not be rationalized on the numeric route");
      }
    if (!is_positive_definite(X))
      throw NoPositiveDefiniteSolution("numeric route produced an indefinite matrix");
    dec.Q2 = normalize_form(X);
    dec.note = "numeric eigenvector route; similarity identity holds only approximately";
  }

  Eigen::MatrixXd Q2d(A.d, A.d);
  for (int i = 0; i < A.d; ++i)
    for (int j = 0; j < A.d; ++j) Q2d(i, j) = to_double(dec.Q2.at(i, j).re);
  dec.Qsqrt = sym_sqrt(Q2d);
  Eigen::MatrixXd AinvT = A.real().inverse().transpose();
  dec.U = dec.eigen_modulus * dec.Qsqrt * AinvT * dec.Qsqrt.inverse();
  return dec;
}

MultiPoly quadratic_form(const IsotropicDecomposition& dec) {
  return quadratic_form(dec.Q2);
}

MultiPoly quadratic_form(const RatMat& Q2) {
  const int d = static_cast<int>(Q2.rows());
  MultiPoly W(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      MIdx a(d, 0);
      a[i] += 1;
      a[j] += 1;
      GaussRat coef = Q2.at(i, j);
      if (i != j) coef *= GaussRat(2);
      W.add_term(a, coef);
    }
  return W;
}

InvarianceReport invariance_check(const DilationMatrix& A,
                                  const IsotropicDecomposition& dec) {
  InvarianceReport rep;
  auto root = integer_root(A.q * A.q, A.d);
  if (root) {
    Rat c(*root);
    RatMat Ar = A.rat();
    rep.matrix_identity_exact =
        (Ar * dec.Q2 * Ar.transpose()) == dec.Q2.scaled(GaussRat(c));
    auto AinvT = inverse(A.rat_transpose());
    if (AinvT) {
      MultiPoly W = quadratic_form(dec);
      MultiPoly lhs = W.substitute_linear(*AinvT).scaled(GaussRat(c));
      rep.form_identity_exact = (lhs == W);
    }
  }
  Eigen::MatrixXd ortho = dec.U.transpose() * dec.U -
                          Eigen::MatrixXd::Identity(A.d, A.d);
  rep.orthogonality_error = ortho.cwiseAbs().maxCoeff();
  Eigen::MatrixXd recon = A.real().inverse().transpose() -
                          (1.0 / dec.eigen_modulus) * dec.Qsqrt.inverse() *
                              dec.U * dec.Qsqrt;
  rep.reconstruction_error = recon.cwiseAbs().maxCoeff();
  return rep;
}

CosetReps coset_reps(const Eigen::MatrixXi& A) {
  const int d = static_cast<int>(A.rows());
  RatMat Ar(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) Ar.at(i, j) = GaussRat(Rat(A(i, j)));
  auto Ainv = inverse(Ar);
  if (!Ainv) throw BadArguments("coset_reps: singular matrix");

  // Bounding box of the image parallelepiped A [0,1)^d.
  std::vector<long long> lo(d, 0), hi(d, 0);
  for (int corner = 0; corner < (1 << d); ++corner) {
    for (int i = 0; i < d; ++i) {
      long long v = 0;
      for (int j = 0; j < d; ++j)
        if (corner & (1 << j)) v += A(i, j);
      lo[i] = std::min(lo[i], v);
      hi[i] = std::max(hi[i], v);
    }
  }

  CosetReps out;
  std::vector<long long> z(d);
  std::function<void(int)> scan = [&](int i) {
    if (i == d) {
      std::vector<Rat> s(d, Rat(0));
      for (int r = 0; r < d; ++r) {
        Rat acc(0);
        for (int c = 0; c < d; ++c) acc += Ainv->at(r, c).re * Rat(z[c]);
        s[r] = acc;
      }
      for (int r = 0; r < d; ++r)
        if (s[r] < 0 || s[r] >= 1) return;
      out.reps.push_back(std::move(s));
      return;
    }
    for (z[i] = lo[i]; z[i] <= hi[i]; ++z[i]) scan(i + 1);
  };
  scan(0);
  std::sort(out.reps.begin(), out.reps.end());

  GaussRat det = determinant(Ar);
  Rat q = det.re < 0 ? -det.re : det.re;
  if (Rat(static_cast<long long>(out.reps.size())) != q)
    throw Error("internal: coset enumeration count mismatch");
  return out;
}

LatticeFactor factor_lattice_point(const Eigen::MatrixXi& A,
                                   const std::vector<long long>& n, int jmax) {
  const int d = static_cast<int>(A.rows());
  bool all_zero = true;
  for (auto v : n)
    if (v != 0) all_zero = false;
  if (all_zero) throw BadArguments("cannot factor the origin");

  RatMat Ar(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) Ar.at(i, j) = GaussRat(Rat(A(i, j)));
  auto Ainv = inverse(Ar);
  if (!Ainv) throw BadArguments("factor_lattice_point: singular matrix");

  std::vector<Rat> v(d);
  for (int i = 0; i < d; ++i) v[i] = Rat(n[i]);
  for (int j = 1; j <= jmax; ++j) {
    std::vector<Rat> w(d, Rat(0));
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) w[r] += Ainv->at(r, c).re * v[c];
    bool integral = true;
    for (int r = 0; r < d; ++r)
      if (!is_integer(w[r])) integral = false;
    if (!integral) {
      LatticeFactor f;
      f.j = j;
      f.s.resize(d);
      f.k.resize(d);
      for (int r = 0; r < d; ++r) {
        BigInt fl = rat_floor(w[r]);
        f.k[r] = fl.convert_to<long long>();
        f.s[r] = w[r] - Rat(fl);
      }
      return f;
    }
    v = std::move(w);
  }
  throw FactorizationGap("lattice point not factored within the shell bound");
}

PartitionReport partition_check(const Eigen::MatrixXi& A, int N) {
  const int d = static_cast<int>(A.rows());
  PartitionReport rep;
  CosetReps S = coset_reps(A);
  RatMat Ar(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) Ar.at(i, j) = GaussRat(Rat(A(i, j)));

  std::vector<long long> n(d, -N);
  std::function<bool(int)> scan = [&](int i) -> bool {
    if (i == d) {
      bool all_zero = true;
      for (auto v : n)
        if (v != 0) all_zero = false;
      if (all_zero) return true;
      LatticeFactor f = factor_lattice_point(A, n);
      // Reconstruct A^j (k + s) and compare with n exactly.
      std::vector<Rat> v(d);
      for (int r = 0; r < d; ++r) v[r] = Rat(f.k[r]) + f.s[r];
      for (int step = 0; step < f.j; ++step) {
        std::vector<Rat> w(d, Rat(0));
        for (int r = 0; r < d; ++r)
          for (int c = 0; c < d; ++c) w[r] += Ar.at(r, c).re * v[c];
        v = std::move(w);
      }
      for (int r = 0; r < d; ++r)
        if (v[r] != Rat(n[r])) {
          rep.detail = "reconstruction failed";
          return false;
        }
      // s must be a nonzero coset representative.
      bool s_zero = true;
      for (const auto& sc : f.s)
        if (sc != 0) s_zero = false;
      if (s_zero || std::find(S.reps.begin(), S.reps.end(), f.s) == S.reps.end()) {
        rep.detail = "fractional part is not a nonzero coset representative";
        return false;
      }
      rep.max_shell = std::max(rep.max_shell, f.j);
      ++rep.points_checked;
      return true;
    }
    for (n[i] = -N; n[i] <= N; ++n[i])
      if (!scan(i + 1)) return false;
    return true;
  };
  rep.ok = scan(0);
  return rep;
}

}  // namespace ellipsf
