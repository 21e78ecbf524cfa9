#include "ellipsf/trigpoly.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "ellipsf/errors.hpp"

namespace ellipsf {

namespace {

// e^{i pi r} as an exact Gaussian rational; defined only for half-integer r.
GaussRat exact_phase(const Rat& r) {
  Rat twice = r * 2;
  if (boost::multiprecision::denominator(twice) != 1)
    throw UnsupportedShiftDenominator(
        "phase e^{i pi r} with 2r = " + rat_to_string(twice) +
        " not representable over the Gaussian rationals");
  BigInt n = boost::multiprecision::numerator(twice) % 4;
  return i_pow(n.convert_to<long long>());
}

Rat dot(const TrigPoly::Key& k, const std::vector<Rat>& s) {
  Rat r = 0;
  for (std::size_t i = 0; i < k.size(); ++i) r += Rat(k[i]) * s[i];
  return r;
}

}  // namespace

TrigPoly TrigPoly::constant(int d, const GaussRat& c) {
  TrigPoly t(d);
  t.add_term(Key(d, 0), c);
  return t;
}

TrigPoly TrigPoly::half_sin(int d, int i) {
  // sin(x/2) = (e^{ix/2} - e^{-ix/2}) / (2i)
  TrigPoly t(d);
  Key k(d, 0);
  k[i] = 1;
  t.add_term(k, GaussRat(0, Rat(-1, 2)));
  k[i] = -1;
  t.add_term(k, GaussRat(0, Rat(1, 2)));
  return t;
}

TrigPoly TrigPoly::full_sin(int d, int i) {
  TrigPoly t(d);
  Key k(d, 0);
  k[i] = 2;
  t.add_term(k, GaussRat(0, Rat(-1, 2)));
  k[i] = -2;
  t.add_term(k, GaussRat(0, Rat(1, 2)));
  return t;
}

TrigPoly TrigPoly::full_cos(int d, int i) {
  TrigPoly t(d);
  Key k(d, 0);
  k[i] = 2;
  t.add_term(k, GaussRat(Rat(1, 2)));
  k[i] = -2;
  t.add_term(k, GaussRat(Rat(1, 2)));
  return t;
}

void TrigPoly::add_term(const Key& k, const GaussRat& c) {
  if (c.is_zero()) return;
  auto it = c_.find(k);
  if (it == c_.end()) {
    c_.emplace(k, c);
  } else {
    it->second += c;
    if (it->second.is_zero()) c_.erase(it);
  }
}

GaussRat TrigPoly::coeff(const Key& k) const {
  auto it = c_.find(k);
  return it == c_.end() ? GaussRat() : it->second;
}

TrigPoly TrigPoly::operator+(const TrigPoly& o) const {
  TrigPoly r = *this;
  for (const auto& [k, c] : o.c_) r.add_term(k, c);
  return r;
}

TrigPoly TrigPoly::operator-(const TrigPoly& o) const {
  TrigPoly r = *this;
  for (const auto& [k, c] : o.c_) r.add_term(k, GaussRat(0) - c);
  return r;
}

TrigPoly TrigPoly::operator*(const TrigPoly& o) const {
  TrigPoly r(d_);
  for (const auto& [ka, ca] : c_)
    for (const auto& [kb, cb] : o.c_) {
      Key k(d_);
      for (int i = 0; i < d_; ++i) k[i] = ka[i] + kb[i];
      r.add_term(k, ca * cb);
    }
  return r;
}

TrigPoly TrigPoly::scaled(const GaussRat& s) const {
  TrigPoly r(d_);
  for (const auto& [k, c] : c_) r.add_term(k, c * s);
  return r;
}

TrigPoly TrigPoly::pow(int n) const {
  TrigPoly r = constant(d_, GaussRat(1));
  for (int i = 0; i < n; ++i) r = r * (*this);
  return r;
}

TrigPoly TrigPoly::shifted(const std::vector<Rat>& s) const {
  TrigPoly r(d_);
  for (const auto& [k, c] : c_) r.add_term(k, c * exact_phase(dot(k, s)));
  return r;
}

bool TrigPoly::is_real() const {
  for (const auto& [k, c] : c_) {
    Key nk(d_);
    for (int i = 0; i < d_; ++i) nk[i] = -k[i];
    if (!(coeff(nk) == c.conj())) return false;
  }
  return true;
}

bool TrigPoly::is_integer_periodic() const {
  for (const auto& [k, c] : c_) {
    (void)c;
    for (int ki : k)
      if (ki % 2 != 0) return false;
  }
  return true;
}

GaussRat TrigPoly::value_at_zero() const {
  GaussRat v;
  for (const auto& [k, c] : c_) {
    (void)k;
    v += c;
  }
  return v;
}

GaussRat TrigPoly::value_at(const std::vector<Rat>& t) const {
  GaussRat v;
  for (const auto& [k, c] : c_) v += c * exact_phase(dot(k, t));
  return v;
}

std::complex<double> TrigPoly::eval(const std::vector<double>& xi) const {
  std::complex<double> v = 0.0;
  for (const auto& [k, c] : c_) {
    double arg = 0.0;
    for (int i = 0; i < d_; ++i) arg += k[i] * xi[i];
    v += to_complex(c) * std::polar(1.0, arg / 2.0);
  }
  return v;
}

std::map<MIdx, GaussRat> TrigPoly::jet_at(const std::vector<Rat>& t,
                                          int L) const {
  // Taylor coefficient of (xi - 2 pi t)^alpha in c_k e^{i k.xi/2} is
  // c_k e^{i pi k.t} (i k/2)^alpha / alpha!.
  GradedBasis basis(d_, L);
  std::map<MIdx, GaussRat> jet;
  for (const auto& [k, c] : c_) {
    GaussRat base = c * exact_phase(dot(k, t));
    for (const MIdx& a : basis.indices()) {
      BigInt kpow = 1, twopow = 1;
      int deg = 0;
      for (int i = 0; i < d_; ++i) {
        for (int p = 0; p < a[i]; ++p) kpow *= k[i];
        deg += a[i];
      }
      for (int p = 0; p < deg; ++p) twopow *= 2;
      GaussRat term = base * i_pow(deg) * GaussRat(Rat(kpow, twopow * mfact(a)));
      if (!term.is_zero()) {
        auto it = jet.find(a);
        if (it == jet.end())
          jet.emplace(a, term);
        else
          it->second += term;
      }
    }
  }
  for (auto it = jet.begin(); it != jet.end();)
    it = it->second.is_zero() ? jet.erase(it) : std::next(it);
  return jet;
}

std::map<MIdx, std::complex<double>> TrigPoly::jet_at_numeric(
    const std::vector<double>& xi0, int L) const {
  GradedBasis basis(d_, L);
  std::map<MIdx, std::complex<double>> jet;
  const std::complex<double> iu(0.0, 1.0);
  for (const auto& [k, c] : c_) {
    double arg = 0.0;
    for (int i = 0; i < d_; ++i) arg += k[i] * xi0[i];
    std::complex<double> base = to_complex(c) * std::polar(1.0, arg / 2.0);
    for (const MIdx& a : basis.indices()) {
      std::complex<double> f = 1.0;
      for (int i = 0; i < d_; ++i)
        for (int p = 0; p < a[i]; ++p) f *= iu * (0.5 * k[i]);
      f /= static_cast<double>(mfact(a));
      jet[a] += base * f;
    }
  }
  return jet;
}

namespace {

// Renders (k . x)/2 with the doubled key k, e.g. (2,0) -> "x1",
// (1,1) -> "(x1+x2)/2", (0,-4) -> "-2*x2".
std::string angle_string(const TrigPoly::Key& k) {
  bool all_even = true;
  for (int ki : k)
    if (std::abs(ki) % 2 == 1) all_even = false;
  std::ostringstream os;
  int written = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] == 0) continue;
    int c = all_even ? k[i] / 2 : k[i];
    if (written > 0) os << (c > 0 ? "+" : "-");
    else if (c < 0) os << "-";
    int ac = std::abs(c);
    if (ac != 1) os << ac << "*";
    os << "x" << (i + 1);
    ++written;
  }
  std::string body = os.str();
  if (!all_even) {
    if (written > 1) body = "(" + body + ")";
    body += "/2";
  } else if (written > 1) {
    body = "(" + body + ")";
  }
  return body;
}

bool lex_positive(const TrigPoly::Key& k) {
  for (int ki : k) {
    if (ki > 0) return true;
    if (ki < 0) return false;
  }
  return false;
}

void append_term(std::ostringstream& os, bool& first, const GaussRat& coef,
                 const std::string& fn) {
  if (coef.is_zero()) return;
  std::string c = gauss_to_string(coef);
  bool neg = !c.empty() && c[0] == '-' && c.find_first_of("+-", 1) == std::string::npos;
  if (first) {
    first = false;
    if (neg) {
      os << "-";
      c = c.substr(1);
    }
  } else {
    if (neg) {
      os << " - ";
      c = c.substr(1);
    } else {
      os << " + ";
    }
  }
  bool composite = c.find_first_of("+-", 1) != std::string::npos;
  if (composite) c = "(" + c + ")";
  if (fn.empty()) {
    os << c;
  } else if (c == "1") {
    os << fn;
  } else {
    os << c << "*" << fn;
  }
}

}  // namespace

std::string TrigPoly::to_string() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Constant part.
  append_term(os, first, coeff(Key(d_, 0)), "");
  for (const auto& [k, c] : c_) {
    if (!lex_positive(k)) continue;
    Key nk(d_);
    for (int i = 0; i < d_; ++i) nk[i] = -k[i];
    GaussRat cm = coeff(nk);
    GaussRat cosc = c + cm;
    GaussRat sinc = GaussRat::i() * (c - cm);
    std::string ang = angle_string(k);
    append_term(os, first, cosc, "cos(" + ang + ")");
    append_term(os, first, sinc, "sin(" + ang + ")");
  }
  if (first) return "0";
  return os.str();
}

}  // namespace ellipsf
