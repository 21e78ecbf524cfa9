#include "ellipsf/masks.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ellipsf/errors.hpp"

namespace ellipsf {

namespace {

constexpr double kPi = 3.14159265358979323846;

Rat pow2_rat(int p) {
  BigInt v = 1;
  v <<= p;
  return Rat(v);
}

RatMat rat_mat_pow(const RatMat& M, long long j) {
  RatMat r = RatMat::identity(M.rows());
  for (long long t = 0; t < j; ++t) r = r * M;
  return r;
}

// c with M == c * I, if M is a scalar matrix.
std::optional<Rat> scalar_matrix_factor(const RatMat& M) {
  GaussRat c = M.at(0, 0);
  if (!c.is_real()) return std::nullopt;
  for (std::size_t i = 0; i < M.rows(); ++i)
    for (std::size_t j = 0; j < M.cols(); ++j) {
      const GaussRat& v = M.at(i, j);
      if (i == j ? !(v == c) : !v.is_zero()) return std::nullopt;
    }
  return c.re;
}

MultiPoly jet_as_poly(const std::map<MIdx, GaussRat>& jet, int d) {
  MultiPoly P(d);
  for (const auto& [a, c] : jet) P.add_term(a, c);
  return P;
}

// Canonical lift of P corrected so its Maclaurin jet equals P through
// total degree R.
TrigPoly lift_with_clean_jet(const MultiPoly& P, int R) {
  const int d = P.d;
  TrigPoly T = trig_realize(P);
  std::vector<Rat> origin(d, Rat(0));
  for (int g = 0; g <= R; ++g) {
    MultiPoly excess = jet_as_poly(T.jet_at(origin, R), d) - P;
    MultiPoly Eg = excess.homogeneous_part(g);
    for (const auto& [a, c] : Eg.terms)
      T = T - trig_realize_monomial(d, a).scaled(c);
  }
  return T;
}

bool space_subset(const PolynomialSpace& inner, const PolynomialSpace& outer) {
  for (const MultiPoly& p : inner.polys())
    if (!outer.contains(p)) return false;
  return true;
}

std::string rat_point_string(const std::vector<Rat>& s) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < s.size(); ++i)
    os << (i ? "," : "") << rat_to_string(s[i]);
  os << ")";
  return os.str();
}

using CJet = std::map<MIdx, std::complex<double>>;

std::vector<MIdx> indices_up_to(int d, int L) {
  std::vector<MIdx> out;
  MIdx a(d, 0);
  while (true) {
    int deg = 0;
    for (int v : a) deg += v;
    if (deg <= L) out.push_back(a);
    int i = 0;
    while (i < d && ++a[i] > L) a[i++] = 0;
    if (i == d) break;
  }
  return out;
}

CJet cjet_mul_trunc(const CJet& a, const CJet& b, int L) {
  CJet out;
  for (const auto& [ka, va] : a)
    for (const auto& [kb, vb] : b) {
      MIdx k(ka.size());
      int deg = 0;
      for (std::size_t i = 0; i < k.size(); ++i) deg += k[i] = ka[i] + kb[i];
      if (deg <= L) out[k] += va * vb;
    }
  return out;
}

// Taylor jet of T about xi through total degree L, with the constant term
// computed as T(0) + sum_k c_k (e^{i k.xi/2} - 1).  The plain coefficient
// sum cancels catastrophically when the c_k are huge but T(xi) is moderate;
// anchoring to the exact value V0 = T(0) sidesteps that entirely.
CJet anchored_jet(const TrigPoly& T, const GaussRat& V0,
                  const std::vector<double>& xi, int L) {
  const int d = T.dim();
  const std::vector<MIdx> idx = indices_up_to(d, L);
  CJet out;
  const MIdx zero(d, 0);
  std::complex<double> c0 = to_complex(V0);
  for (const auto& [k, c] : T.coeffs()) {
    double theta = 0.0;
    for (int i = 0; i < d; ++i) theta += 0.5 * k[i] * xi[i];
    const double sh = std::sin(0.5 * theta);
    const std::complex<double> phase(std::cos(theta), std::sin(theta));
    const std::complex<double> phase_m1(-2.0 * sh * sh, std::sin(theta));
    const std::complex<double> cc = to_complex(c);
    c0 += cc * phase_m1;
    for (const MIdx& a : idx) {
      if (a == zero) continue;
      std::complex<double> w = cc * phase;
      for (int i = 0; i < d; ++i)
        for (int e = 0; e < a[i]; ++e) w *= std::complex<double>(0.0, 0.5 * k[i]);
      out[a] += w / static_cast<double>(mfact(a));
    }
  }
  out[zero] = c0;
  return out;
}

// prod_{s != 0} Gj(xi + 2 pi s) / Gj(2 pi s) as a jet about xi, one exact
// quotient factor per coset.
CJet coset_quotient_jet(const TrigPoly& Gj,
                        const std::vector<std::vector<Rat>>& reps,
                        const std::vector<double>& xi, int L) {
  const int d = Gj.dim();
  CJet out;
  out[MIdx(d, 0)] = 1.0;
  for (const auto& s : reps) {
    const TrigPoly Ts = Gj.shifted(s);
    const GaussRat V0 = Ts.value_at_zero();
    if (V0.is_zero())
      throw GVanishesAtCoset("G vanishes at 2*pi*" + rat_point_string(s));
    CJet jet = anchored_jet(Ts, V0, xi, L);
    const std::complex<double> den = to_complex(V0);
    for (auto& [a, v] : jet) v /= den;
    out = cjet_mul_trunc(out, jet, L);
  }
  return out;
}

}  // namespace

TrigPoly trig_realize_monomial(int d, const MIdx& alpha) {
  TrigPoly r = TrigPoly::constant(d, GaussRat(1));
  for (int i = 0; i < d; ++i) {
    int p = alpha[i];
    if (p == 0) continue;
    if (p % 2 == 0) {
      r = r * TrigPoly::half_sin(d, i).pow(p).scaled(GaussRat(pow2_rat(p)));
    } else {
      r = r * TrigPoly::full_sin(d, i) *
          TrigPoly::half_sin(d, i).pow(p - 1).scaled(GaussRat(pow2_rat(p - 1)));
    }
  }
  return r;
}

TrigPoly trig_realize(const MultiPoly& P) {
  TrigPoly r(P.d);
  for (const auto& [a, c] : P.terms)
    r = r + trig_realize_monomial(P.d, a).scaled(c);
  return r;
}

TrigPoly build_G(const RatMat& Q2) { return trig_realize(quadratic_form(Q2)); }

TrigPoly build_G_higher(const RatMat& Q2, int r,
                        const std::vector<SinMonomial>& corrections) {
  if (r < 4 || r % 2 != 0)
    throw BadArguments("target degree must be an even integer >= 4");
  const int d = static_cast<int>(Q2.rows());
  MultiPoly W = quadratic_form(Q2);
  TrigPoly G = build_G(Q2);
  std::vector<Rat> origin(d, Rat(0));

  if (!corrections.empty()) {
    for (const SinMonomial& sm : corrections) {
      if (static_cast<int>(sm.half.size()) != d ||
          static_cast<int>(sm.full.size()) != d)
        throw BadArguments("correction exponent vectors must have length d");
      TrigPoly term = TrigPoly::constant(d, GaussRat(sm.coeff));
      for (int i = 0; i < d; ++i) {
        if (sm.half[i] > 0) term = term * TrigPoly::half_sin(d, i).pow(sm.half[i]);
        if (sm.full[i] > 0) term = term * TrigPoly::full_sin(d, i).pow(sm.full[i]);
      }
      G = G + term;
    }
  } else {
    // Cancel the excess jet degree by degree; the canonical lift of a
    // degree-k monomial only perturbs degrees k+2 and up, so this is
    // triangular.
    for (int k = 4; k <= r - 2; k += 2) {
      MultiPoly excess = jet_as_poly(G.jet_at(origin, k), d) - W;
      MultiPoly Ek = excess.homogeneous_part(k);
      for (const auto& [a, c] : Ek.terms)
        G = G - trig_realize_monomial(d, a).scaled(c);
    }
  }

  if (!(jet_as_poly(G.jet_at(origin, r - 1), d) == W))
    throw UnderdeterminedCorrection(
        "corrections fail to reduce the Maclaurin jet to the quadratic form "
        "through degree " +
        std::to_string(r - 1));
  return G;
}

MaskSpec build_mask(const TrigPoly& G, const DilationMatrix& A) {
  const int d = A.d;
  CosetReps S = coset_reps(A.A.transpose());
  TrigPoly num = TrigPoly::constant(d, GaussRat(1));
  GaussRat den(1);
  for (const auto& s : S.reps) {
    bool zero = true;
    for (const Rat& si : s)
      if (si != 0) zero = false;
    if (zero) continue;
    GaussRat val = G.value_at(s);
    if (val.is_zero())
      throw GVanishesAtCoset("G vanishes at 2*pi*" + rat_point_string(s));
    den *= val;
    num = num * G.shifted(s);
  }
  TrigPoly m0 = num.scaled(GaussRat(1) / den);

  if (!m0.is_integer_periodic())
    throw Error("synthesized mask is not integer-periodic");
  if (G.is_real() && !m0.is_real())
    throw Error("synthesized mask lost real coefficients");
  if (!(m0.value_at_zero() == GaussRat(1)))
    throw Error("synthesized mask does not equal 1 at the origin");

  MaskSpec spec;
  spec.A = A.A;
  spec.q = A.q;
  spec.d = d;
  spec.order = 1;
  spec.m0 = m0;

  // Infer the annihilating symbol (quadratic jet of G) and how far the jet
  // of G stays purely quadratic; the mask reproduces polynomials up to one
  // degree below the first excess term.
  const int scan = 13;
  std::vector<Rat> origin(d, Rat(0));
  MultiPoly jet = jet_as_poly(G.jet_at(origin, scan), d);
  MultiPoly W2(d);
  for (int l = 0; l <= 2; ++l) W2 = W2 + jet.homogeneous_part(l);
  spec.symbol = W2;
  int excess = 0;
  for (int l = 3; l <= scan; ++l)
    if (!jet.homogeneous_part(l).is_zero()) {
      excess = l;
      break;
    }
  spec.analysis_degree = excess == 0 ? scan - 2 : excess - 1;
  return spec;
}

MaskSpec mask_power(const MaskSpec& spec, int m) {
  if (m < 1) throw BadArguments("mask power must be >= 1");
  MaskSpec out = spec;
  out.order = spec.order * m;
  out.m0 = spec.m0.pow(m);
  if (spec.family) {
    auto base = spec.family;
    out.family = [base, m](long long j) { return base(j).pow(m); };
  }
  if (spec.family_jet_numeric) {
    auto basej = spec.family_jet_numeric;
    out.family_jet_numeric = [basej, m](long long j,
                                        const std::vector<double>& xi, int L) {
      const auto b = basej(j, xi, L);
      auto acc = b;
      for (int t = 1; t < m; ++t) acc = cjet_mul_trunc(acc, b, L);
      return acc;
    };
  }
  out.symbol = spec.symbol.pow(m);
  out.analysis_degree = spec.analysis_degree + 2 * (out.order - spec.order);
  return out;
}

MultiPoly maclaurin_jet(const TrigPoly& T, int L) {
  std::vector<Rat> origin(T.dim(), Rat(0));
  return jet_as_poly(T.jet_at(origin, L), T.dim());
}

MaskSpec nonstationary_family(NonstatKind kind, const NonstatParams& params,
                              const DilationMatrix& A) {
  IsotropicDecomposition dec = decompose(A);
  const int d = dec.d;
  MultiPoly W = quadratic_form(dec);
  auto root = integer_root(A.q * A.q, d);
  if (!root)
    throw NotIsotropic("|det A|^2 admits no integer d-th root");
  const Rat c2(*root);  // W(A^T eta) = c2 * W(eta)

  std::function<TrigPoly(long long)> symbolG;
  // Per-scale coefficient normalizer: scaling G leaves the mask quotient
  // unchanged, so the stable evaluator divides scale j's G by norm_step^j to
  // keep to_double magnitudes bounded.
  Rat norm_step(1);
  MaskSpec out;

  if (kind == NonstatKind::sum_of_powers) {
    const auto& ks = params.powers;
    const auto& ws = params.weights;
    if (ks.empty() || ks.size() != ws.size())
      throw BadArguments("powers and weights must be nonempty and match");
    for (std::size_t t = 0; t < ks.size(); ++t) {
      if (ks[t] < 1 || (t > 0 && ks[t] <= ks[t - 1]))
        throw BadArguments("powers must be strictly increasing and >= 1");
      if (ws[t] <= 0) throw BadArguments("weights must be positive");
    }
    const int kmax = ks.back();
    // One lift of W whose jet is clean through 2*kmax+1 serves every power:
    // raising it to the k-th keeps the jet equal to W^k through that degree.
    TrigPoly Gh = build_G_higher(dec.Q2, 2 * kmax + 2);
    symbolG = [Gh, ks, ws, c2](long long j) {
      TrigPoly acc(Gh.dim());
      for (std::size_t t = 0; t < ks.size(); ++t) {
        Rat scale = ws[t];
        for (long long e = 0; e < (ks[t] - ks[0]) * j; ++e) scale *= c2;
        acc = acc + Gh.pow(ks[t]).scaled(GaussRat(scale));
      }
      return acc;
    };
    MultiPoly symbol(d);
    for (std::size_t t = 0; t < ks.size(); ++t)
      symbol = symbol + W.pow(ks[t]).scaled(GaussRat(ws[t]));
    out.symbol = symbol;
    out.order = ks.front();
    out.analysis_degree = 2 * ks.front() + 1;
    for (int e = 0; e < kmax - ks.front(); ++e) norm_step *= c2;
  } else {
    const MultiPoly& X = params.X;
    const int m = params.m;
    if (m < 1) throw BadArguments("order m must be >= 1");
    if (X.d != d || X.is_zero())
      throw BadArguments("X must be a nonzero polynomial in d variables");
    const int k = X.degree();
    if (!(X.homogeneous_part(k) == X))
      throw BadArguments("X must be homogeneous");
    if (k < 1) throw BadArguments("X must have degree >= 1");
    if (k == 2 * m)
      throw BadArguments("degree of X must differ from 2m");

    // The transported symbols X((A^T)^j eta) must cycle: A^T normalized by
    // q^(1/d) has to have multiplicative order 1 or 2.
    RatMat AT = A.rat_transpose();
    bool order1 = scalar_matrix_factor(AT).has_value();
    std::optional<Rat> sq = scalar_matrix_factor(AT * AT);
    bool order2 = sq.has_value() && *sq > 0;
    if (!order1 && !order2)
      throw UnsupportedGroupOrder(
          "normalized powers of A^T do not cycle with period 1 or 2");

    // Solvability: the target admits a nontrivial space only if one kernel
    // is not contained in the other (which side depends on deg X vs 2m).
    MultiPoly Wm = W.pow(m);
    const int Lc = std::max(2 * m, k) + 2;
    PolynomialSpace KX = kernel_polynomials(X, Lc);
    PolynomialSpace KW = kernel_polynomials(Wm, Lc);
    bool ok = (k < 2 * m) ? !space_subset(KX, KW) : !space_subset(KW, KX);
    if (!ok)
      throw ConditionFailed(
          "no polynomial separates ker X(-iD) from ker W(-iD)^m");

    const int R = std::max(2 * m, k);
    // W-part lift must stay clean through R as well.
    int r_need = R + 1 - 2 * (m - 1);
    int r = std::max(4, r_need + (r_need % 2));
    TrigPoly GW = build_G_higher(dec.Q2, r).pow(m);
    symbolG = [X, AT, GW, c2, m, R](long long j) {
      MultiPoly Xj = X.substitute_linear(rat_mat_pow(AT, j));
      Rat scale = 1;
      for (long long e = 0; e < m * j; ++e) scale *= c2;
      return lift_with_clean_jet(Xj, R) + GW.scaled(GaussRat(scale));
    };
    out.symbol = X + Wm;
    out.order = m;
    out.analysis_degree = R;
    for (int e = 0; e < m; ++e) norm_step *= c2;
  }

  MaskSpec base = build_mask(symbolG(0), A);
  out.A = base.A;
  out.q = base.q;
  out.d = base.d;
  out.m0 = base.m0;
  DilationMatrix Acopy = A;
  out.family = [symbolG, Acopy](long long j) {
    return build_mask(symbolG(j), Acopy).m0;
  };
  std::vector<std::vector<Rat>> nz_reps;
  for (const auto& s : coset_reps(A.A.transpose()).reps) {
    bool zero = true;
    for (const Rat& si : s)
      if (si != 0) zero = false;
    if (!zero) nz_reps.push_back(s);
  }
  out.family_jet_numeric = [symbolG, nz_reps, norm_step](
                               long long j, const std::vector<double>& xi,
                               int L) {
    Rat norm(1);
    for (long long e = 0; e < j; ++e) norm *= norm_step;
    const TrigPoly Gj = symbolG(j).scaled(GaussRat(Rat(1) / norm));
    return coset_quotient_jet(Gj, nz_reps, xi, L);
  };
  // Shake out construction problems at the first few scales right away.
  for (long long j = 1; j <= 4; ++j) (void)out.family(j);
  return out;
}

NonnegReport nonneg_check(const TrigPoly& G, int grid_density) {
  NonnegReport rep;
  rep.grid_density = grid_density;
  const int d = G.dim();
  rep.argmin.assign(d, 0.0);
  rep.min_value = std::numeric_limits<double>::infinity();
  rep.nonnegative = true;
  rep.zeros_only_at_lattice = true;
  const double cell = 2.0 * kPi / grid_density;
  const double zero_tol = cell * cell;
  const double near_dist = 2.0 * cell * std::sqrt(static_cast<double>(d));

  std::vector<int> idx(d, 0);
  std::vector<double> xi(d);
  while (true) {
    for (int i = 0; i < d; ++i) xi[i] = -kPi + cell * idx[i];
    double v = G.eval(xi).real();
    if (v < rep.min_value) {
      rep.min_value = v;
      rep.argmin = xi;
    }
    if (v < -1e-12) rep.nonnegative = false;
    if (v < zero_tol) {
      double dist2 = 0.0;
      for (int i = 0; i < d; ++i) {
        double r = xi[i] - 2.0 * kPi * std::round(xi[i] / (2.0 * kPi));
        dist2 += r * r;
      }
      if (std::sqrt(dist2) > near_dist) rep.zeros_only_at_lattice = false;
    }
    int i = 0;
    while (i < d && ++idx[i] == grid_density) idx[i++] = 0;
    if (i == d) break;
  }
  return rep;
}

}  // namespace ellipsf
