#include "ellipsf/rational.hpp"

#include <sstream>

#include "ellipsf/errors.hpp"

namespace ellipsf {

double to_double(const Rat& x) { return x.convert_to<double>(); }

std::string rat_to_string(const Rat& x) {
  std::ostringstream os;
  os << numerator(x);
  if (denominator(x) != 1) os << '/' << denominator(x);
  return os.str();
}

Rat rat_from_string(std::string_view s) {
  auto bad = [&] { throw BadArguments("malformed rational: '" + std::string(s) + "'"); };
  if (s.empty()) bad();
  std::string num, den = "1";
  auto slash = s.find('/');
  if (slash == std::string_view::npos) {
    num = std::string(s);
  } else {
    num = std::string(s.substr(0, slash));
    den = std::string(s.substr(slash + 1));
  }
  auto check_int = [&](const std::string& t, bool sign_ok) {
    if (t.empty()) bad();
    std::size_t start = 0;
    if (sign_ok && (t[0] == '-' || t[0] == '+')) start = 1;
    if (start == t.size()) bad();
    for (std::size_t i = start; i < t.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) bad();
  };
  check_int(num, true);
  check_int(den, false);
  BigInt n(num), d(den);
  if (d == 0) bad();
  return Rat(n, d);
}

GaussRat& GaussRat::operator/=(const GaussRat& o) {
  if (o.is_zero()) throw Error("division by zero in Q(i)");
  Rat n = o.norm2();
  Rat r = (re * o.re + im * o.im) / n;
  Rat i = (im * o.re - re * o.im) / n;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

GaussRat i_pow(long long k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return GaussRat(1);
    case 1: return GaussRat::i();
    case 2: return GaussRat(-1);
    default: return -GaussRat::i();
  }
}

GaussRat neg_i_pow(long long k) { return i_pow(-k); }

std::complex<double> to_complex(const GaussRat& z) {
  return {to_double(z.re), to_double(z.im)};
}

std::string gauss_to_string(const GaussRat& z) {
  if (z.im == 0) return rat_to_string(z.re);
  std::string s;
  if (z.re != 0) s = rat_to_string(z.re) + (z.im > 0 ? "+" : "");
  if (z.im == 1)
    s += "i";
  else if (z.im == -1)
    s += "-i";
  else
    s += rat_to_string(z.im) + "i";
  return s;
}

RatMat RatMat::identity(std::size_t n) {
  RatMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = GaussRat(1);
  return m;
}

RatMat RatMat::from_rows(std::vector<std::vector<GaussRat>> rows) {
  if (rows.empty()) return RatMat(0, 0);
  RatMat m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw Error("ragged row list");
    for (std::size_t j = 0; j < m.cols(); ++j) m.at(i, j) = std::move(rows[i][j]);
  }
  return m;
}

RatMat RatMat::transpose() const {
  RatMat t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
  return t;
}

RatMat RatMat::conj() const {
  RatMat t(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t.at(i, j) = at(i, j).conj();
  return t;
}

bool RatMat::is_zero() const {
  for (const auto& e : a_)
    if (!e.is_zero()) return false;
  return true;
}

RatMat RatMat::operator*(const RatMat& o) const {
  if (cols_ != o.rows_) throw Error("matrix product shape mismatch");
  RatMat p(rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const GaussRat& aik = at(i, k);
      if (aik.is_zero()) continue;
      for (std::size_t j = 0; j < o.cols_; ++j)
        p.at(i, j) += aik * o.at(k, j);
    }
  return p;
}

RatMat RatMat::operator+(const RatMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw Error("matrix sum shape mismatch");
  RatMat r = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
  return r;
}

RatMat RatMat::operator-(const RatMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw Error("matrix diff shape mismatch");
  RatMat r = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
  return r;
}

RatMat RatMat::scaled(const GaussRat& c) const {
  RatMat r = *this;
  for (auto& e : r.a_) e *= c;
  return r;
}

void RatMat::append_rows(const RatMat& o) {
  if (rows_ == 0 && cols_ == 0) {
    *this = o;
    return;
  }
  if (o.cols_ != cols_) throw Error("append_rows column mismatch");
  a_.insert(a_.end(), o.a_.begin(), o.a_.end());
  rows_ += o.rows_;
}

RrefResult rref(RatMat M) {
  const std::size_t rows = M.rows(), cols = M.cols();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t sel = rows;
    for (std::size_t i = r; i < rows; ++i)
      if (!M.at(i, c).is_zero()) {
        sel = i;
        break;
      }
    if (sel == rows) continue;
    if (sel != r)
      for (std::size_t j = 0; j < cols; ++j) std::swap(M.at(sel, j), M.at(r, j));
    GaussRat inv = GaussRat(1) / M.at(r, c);
    for (std::size_t j = c; j < cols; ++j) M.at(r, j) *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || M.at(i, c).is_zero()) continue;
      GaussRat f = M.at(i, c);
      for (std::size_t j = c; j < cols; ++j) M.at(i, j) -= f * M.at(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(M), std::move(pivots)};
}

std::size_t rank(const RatMat& M) { return rref(M).pivots.size(); }

RatMat kernel_basis(const RatMat& M) {
  const std::size_t cols = M.cols();
  auto [R, pivots] = rref(M);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < cols; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  RatMat K(free_cols.size(), cols);
  for (std::size_t v = 0; v < free_cols.size(); ++v) {
    std::size_t f = free_cols[v];
    K.at(v, f) = GaussRat(1);
    for (std::size_t r = 0; r < pivots.size(); ++r)
      K.at(v, pivots[r]) = -R.at(r, f);
  }
  return K;
}

RatMat row_basis(const RatMat& M) {
  auto [R, pivots] = rref(M);
  RatMat B(pivots.size(), M.cols());
  for (std::size_t i = 0; i < pivots.size(); ++i)
    for (std::size_t j = 0; j < M.cols(); ++j) B.at(i, j) = R.at(i, j);
  return B;
}

bool subspace_equal(const RatMat& B1, const RatMat& B2) {
  if (B1.cols() != B2.cols()) return false;
  return row_basis(B1) == row_basis(B2);
}

RatMat subspace_intersect(const RatMat& B1, const RatMat& B2) {
  if (B1.cols() != B2.cols()) throw Error("subspace_intersect length mismatch");
  // Row space U satisfies U = ann(ann(U)) for the bilinear pairing x.y;
  // the intersection is the annihilator of the union of annihilators.
  RatMat ann = kernel_basis(B1);
  ann.append_rows(kernel_basis(B2));
  return row_basis(kernel_basis(ann));
}

bool in_row_space(const RatMat& B, const std::vector<GaussRat>& v) {
  if (v.size() != B.cols()) return false;
  RatMat with = B;
  RatMat vrow(1, v.size());
  for (std::size_t j = 0; j < v.size(); ++j) vrow.at(0, j) = v[j];
  with.append_rows(vrow);
  return rank(with) == rank(B);
}

std::optional<RatMat> inverse(const RatMat& M) {
  if (M.rows() != M.cols()) throw Error("inverse needs a square matrix");
  const std::size_t n = M.rows();
  RatMat aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = M.at(i, j);
    aug.at(i, n + i) = GaussRat(1);
  }
  auto [R, pivots] = rref(std::move(aug));
  if (pivots.size() != n || pivots.back() != n - 1) return std::nullopt;
  RatMat inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv.at(i, j) = R.at(i, n + j);
  return inv;
}

GaussRat determinant(const RatMat& M) {
  if (M.rows() != M.cols()) throw Error("determinant needs a square matrix");
  RatMat T = M;
  const std::size_t n = T.rows();
  GaussRat det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t sel = n;
    for (std::size_t i = c; i < n; ++i)
      if (!T.at(i, c).is_zero()) {
        sel = i;
        break;
      }
    if (sel == n) return GaussRat(0);
    if (sel != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(T.at(sel, j), T.at(c, j));
      det = -det;
    }
    det *= T.at(c, c);
    GaussRat inv = GaussRat(1) / T.at(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (T.at(i, c).is_zero()) continue;
      GaussRat f = T.at(i, c) * inv;
      for (std::size_t j = c; j < n; ++j) T.at(i, j) -= f * T.at(c, j);
    }
  }
  return det;
}

std::optional<std::vector<GaussRat>> solve_linear(
    const RatMat& A, const std::vector<GaussRat>& b) {
  if (b.size() != A.rows()) throw Error("solve_linear shape mismatch");
  RatMat aug(A.rows(), A.cols() + 1);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) aug.at(i, j) = A.at(i, j);
    aug.at(i, A.cols()) = b[i];
  }
  auto [R, pivots] = rref(std::move(aug));
  for (auto p : pivots)
    if (p == A.cols()) return std::nullopt;  // inconsistent system
  std::vector<GaussRat> x(A.cols());
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = R.at(r, A.cols());
  return x;
}

}  // namespace ellipsf
