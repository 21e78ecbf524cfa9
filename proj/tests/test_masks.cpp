#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "ellipsf/errors.hpp"
#include "ellipsf/masks.hpp"

using namespace ellipsf;

namespace {

const double PI = 3.14159265358979323846;

Eigen::MatrixXi mat2(int a, int b, int c, int d) {
  Eigen::MatrixXi M(2, 2);
  M << a, b, c, d;
  return M;
}

DilationMatrix quincunx() { return DilationMatrix::create(mat2(1, 1, 1, -1)); }
DilationMatrix skewed() { return DilationMatrix::create(mat2(1, -2, 1, 0)); }
DilationMatrix diag2() { return DilationMatrix::create(mat2(2, 0, 0, 2)); }

TrigPoly cosf1(int i) { return TrigPoly::full_cos(2, i); }
TrigPoly sinf1(int i) { return TrigPoly::full_sin(2, i); }

TrigPoly const2(const Rat& r) { return TrigPoly::constant(2, GaussRat(r)); }

// cos(2 xi_i) on the doubled lattice: keys +-4 e_i with coefficient 1/2.
TrigPoly cos2x(int i) {
  TrigPoly t(2);
  TrigPoly::Key k(2, 0);
  k[i] = 4;
  t.add_term(k, GaussRat(Rat(1, 2)));
  k[i] = -4;
  t.add_term(k, GaussRat(Rat(1, 2)));
  return t;
}

TrigPoly cos3x(int i) {
  TrigPoly t(2);
  TrigPoly::Key k(2, 0);
  k[i] = 6;
  t.add_term(k, GaussRat(Rat(1, 2)));
  k[i] = -6;
  t.add_term(k, GaussRat(Rat(1, 2)));
  return t;
}

MultiPoly mono(const MIdx& a, GaussRat c) { return MultiPoly::monomial(2, a, c); }

// Reference evaluation through <cmath>, used as the numeric oracle.
double eval_quincunx_G(double x, double y) {
  auto s = [](double t) { return std::sin(t / 2); };
  return 4 * (s(x) * s(x) + s(y) * s(y));
}

}  // namespace

TEST_CASE("trig ring constructors match cmath evaluation") {
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int t = 0; t < 20; ++t) {
    double x = U(rng), y = U(rng);
    std::vector<double> xi{x, y};
    CHECK(TrigPoly::half_sin(2, 0).eval(xi).real() == doctest::Approx(std::sin(x / 2)).epsilon(1e-12));
    CHECK(TrigPoly::full_sin(2, 1).eval(xi).real() == doctest::Approx(std::sin(y)).epsilon(1e-12));
    CHECK(TrigPoly::full_cos(2, 0).eval(xi).real() == doctest::Approx(std::cos(x)).epsilon(1e-12));
    CHECK(TrigPoly::half_sin(2, 0).eval(xi).imag() == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("ring identities hold exactly") {
  // sin^2(x/2) + cos^2(x/2) = 1; build cos(x/2) by shifting sin((x+pi)/2)... easier:
  // verify 2 sin^2(x/2) = 1 - cos(x).
  TrigPoly lhs = TrigPoly::half_sin(2, 0).pow(2).scaled(GaussRat(2));
  TrigPoly rhs = const2(1) - cosf1(0);
  CHECK(lhs == rhs);

  // sin(x1) sin(x2) expands into four exponential terms +-1/4.
  TrigPoly ss = sinf1(0) * sinf1(1);
  CHECK(ss.coeffs().size() == 4);
  CHECK(ss.coeff({2, 2}) == GaussRat(Rat(-1, 4)));
  CHECK(ss.coeff({2, -2}) == GaussRat(Rat(1, 4)));
  CHECK(ss.coeff({-2, 2}) == GaussRat(Rat(1, 4)));
  CHECK(ss.coeff({-2, -2}) == GaussRat(Rat(-1, 4)));

  // power vs repeated product, numerically
  TrigPoly p = (const2(Rat(1, 2)) + sinf1(0)).pow(3);
  std::vector<double> xi{0.7, -1.3};
  double direct = std::pow(0.5 + std::sin(0.7), 3);
  CHECK(p.eval(xi).real() == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("shift by half-integer multiples of 2pi is exact") {
  // sin^2((x+pi)/2) = cos^2(x/2)
  TrigPoly sin2 = TrigPoly::half_sin(2, 0).pow(2);
  TrigPoly shifted = sin2.shifted({Rat(1, 2), Rat(0)});
  // cos^2(x/2) = (1 + cos x)/2
  TrigPoly cos2 = (const2(1) + cosf1(0)).scaled(GaussRat(Rat(1, 2)));
  CHECK(shifted == cos2);

  // sin(x + 2pi*1/2) = -sin(x)
  CHECK(sinf1(0).shifted({Rat(1, 2), Rat(0)}) == sinf1(0).scaled(GaussRat(-1)));

  // full period: no change
  CHECK(sinf1(0).shifted({Rat(1), Rat(0)}) == sinf1(0));

  // a denominator-3 shift of a half-angle term leaves the coefficient ring
  CHECK_THROWS_AS((void)TrigPoly::half_sin(2, 0).shifted({Rat(1, 3), Rat(0)}),
                  UnsupportedShiftDenominator);

  // ...but integer-periodic polynomials admit quarter shifts exactly:
  // sin(x + pi/2) = cos(x)
  CHECK(sinf1(0).shifted({Rat(1, 4), Rat(0)}) == cosf1(0));

  // numeric agreement for a random shiftable example
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  TrigPoly T = const2(Rat(1, 3)) + sinf1(0) * cosf1(1) + TrigPoly::half_sin(2, 1).pow(2);
  TrigPoly Ts = T.shifted({Rat(1, 2), Rat(3, 2)});
  for (int t = 0; t < 10; ++t) {
    std::vector<double> xi{U(rng), U(rng)};
    std::vector<double> xs{xi[0] + PI, xi[1] + 3 * PI};
    CHECK(std::abs(Ts.eval(xi) - T.eval(xs)) < 1e-12);
  }
}

TEST_CASE("exact jets at lattice-compatible points") {
  // jet of 4 sin^2(x/2) at 0 through degree 3 is x^2
  TrigPoly t = TrigPoly::half_sin(2, 0).pow(2).scaled(GaussRat(4));
  auto jet = t.jet_at({Rat(0), Rat(0)}, 3);
  CHECK(jet.size() == 1);
  CHECK(jet.at({2, 0}) == GaussRat(1));

  // numeric jets agree with exact jets at the origin
  TrigPoly p = sinf1(0) * sinf1(1) + TrigPoly::half_sin(2, 0).pow(2).scaled(GaussRat(8));
  auto je = p.jet_at({Rat(0), Rat(0)}, 4);
  auto jn = p.jet_at_numeric({0.0, 0.0}, 4);
  for (const auto& [a, c] : jn) {
    GaussRat ec;
    auto it = je.find(a);
    if (it != je.end()) ec = it->second;
    CHECK(std::abs(c - to_complex(ec)) < 1e-12);
  }

  // value_at agrees with eval
  TrigPoly G = build_G(RatMat::identity(2));
  CHECK(G.value_at({Rat(1, 2), Rat(1, 2)}) == GaussRat(8));
  CHECK(G.eval({PI, PI}).real() == doctest::Approx(8.0));
  CHECK(G.value_at({Rat(0), Rat(0)}) == GaussRat(0));
}

TEST_CASE("canonical lift leads with the requested monomial") {
  // jet(realize(xi^a), |a|+1) == xi^a for a spread of exponents
  for (const MIdx& a : std::vector<MIdx>{{1, 0}, {0, 2}, {1, 1}, {2, 1}, {3, 0}, {2, 2}, {4, 1}, {0, 5}}) {
    TrigPoly t = trig_realize_monomial(2, a);
    int deg = a[0] + a[1];
    auto jet = t.jet_at({Rat(0), Rat(0)}, deg + 1);
    CHECK(jet.size() == 1);
    CHECK(jet.at(a) == GaussRat(1));
  }
}

TEST_CASE("quadratic lift structure") {
  // quincunx: G = 4(sin^2(x1/2) + sin^2(x2/2))
  TrigPoly G = build_G(RatMat::identity(2));
  TrigPoly expect = TrigPoly::half_sin(2, 0).pow(2).scaled(GaussRat(4)) +
                    TrigPoly::half_sin(2, 1).pow(2).scaled(GaussRat(4));
  CHECK(G == expect);

  // second fixture: Q2 = [[2,1/2],[1/2,1]]
  RatMat Q2(2, 2);
  Q2.at(0, 0) = GaussRat(2);
  Q2.at(0, 1) = GaussRat(Rat(1, 2));
  Q2.at(1, 0) = GaussRat(Rat(1, 2));
  Q2.at(1, 1) = GaussRat(1);
  TrigPoly G2 = build_G(Q2);
  TrigPoly expect2 = TrigPoly::half_sin(2, 0).pow(2).scaled(GaussRat(8)) +
                     TrigPoly::half_sin(2, 1).pow(2).scaled(GaussRat(4)) +
                     sinf1(0) * sinf1(1);
  CHECK(G2 == expect2);

  // Maclaurin jet through 3 equals the quadratic form, for random PD matrices
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> off(-2, 2);
  std::uniform_int_distribution<int> diag(3, 7);
  for (int t = 0; t < 10; ++t) {
    RatMat Q(2, 2);
    int b = off(rng);
    Q.at(0, 0) = GaussRat(diag(rng));
    Q.at(1, 1) = GaussRat(diag(rng));
    Q.at(0, 1) = GaussRat(Rat(b, 2));
    Q.at(1, 0) = GaussRat(Rat(b, 2));
    CHECK(maclaurin_jet(build_G(Q), 3) == quadratic_form(Q));
  }
}

TEST_CASE("higher-order lift: solved corrections match the closed forms") {
  RatMat I2 = RatMat::identity(2);
  // r = 6: derived correction is +4/3 (sin^4(x1/2) + sin^4(x2/2))
  TrigPoly G6 = build_G_higher(I2, 6);
  TrigPoly expect = build_G(I2) +
                    TrigPoly::half_sin(2, 0).pow(4).scaled(GaussRat(Rat(4, 3))) +
                    TrigPoly::half_sin(2, 1).pow(4).scaled(GaussRat(Rat(4, 3)));
  CHECK(G6 == expect);

  // the same fixture given explicitly reproduces the identical result
  std::vector<SinMonomial> corr{{Rat(4, 3), {4, 0}, {0, 0}}, {Rat(4, 3), {0, 4}, {0, 0}}};
  CHECK(build_G_higher(I2, 6, corr) == G6);

  // r = 8 jet is clean through degree 7
  TrigPoly G8 = build_G_higher(I2, 8);
  CHECK(maclaurin_jet(G8, 7) == quadratic_form(I2));
  // and the solver's extra correction is +32/45 sin^6 on each axis
  TrigPoly extra = G8 - G6;
  TrigPoly expect8 = TrigPoly::half_sin(2, 0).pow(6).scaled(GaussRat(Rat(32, 45))) +
                     TrigPoly::half_sin(2, 1).pow(6).scaled(GaussRat(Rat(32, 45)));
  CHECK(extra == expect8);

  // a wrong explicit correction is rejected
  std::vector<SinMonomial> badc{{Rat(1), {4, 0}, {0, 0}}};
  CHECK_THROWS_AS((void)build_G_higher(I2, 6, badc), UnderdeterminedCorrection);
  CHECK_THROWS_AS((void)build_G_higher(I2, 5), BadArguments);
}

TEST_CASE("quincunx mask") {
  MaskSpec spec = build_mask(build_G(RatMat::identity(2)), quincunx());
  TrigPoly expect = const2(Rat(1, 2)) + cosf1(0).scaled(GaussRat(Rat(1, 4))) +
                    cosf1(1).scaled(GaussRat(Rat(1, 4)));
  CHECK(spec.m0 == expect);
  CHECK(spec.m0.is_real());
  CHECK(spec.m0.is_integer_periodic());
  CHECK(spec.m0.value_at_zero() == GaussRat(1));
  CHECK(spec.q == 2);
  CHECK(spec.analysis_degree == 3);
  CHECK(spec.symbol == quadratic_form(RatMat::identity(2)));
}

TEST_CASE("mask for the shear-like matrix") {
  DilationMatrix A = skewed();
  IsotropicDecomposition dec = decompose(A);
  MaskSpec spec = build_mask(build_G(dec.Q2), A);
  TrigPoly expect = const2(Rat(1, 2)) + cosf1(0).scaled(GaussRat(Rat(1, 3))) +
                    cosf1(1).scaled(GaussRat(Rat(1, 6))) +
                    (sinf1(0) * sinf1(1)).scaled(GaussRat(Rat(1, 12)));
  CHECK(spec.m0 == expect);
  CHECK(spec.m0.is_real());
  CHECK(spec.analysis_degree == 3);
}

TEST_CASE("mask for diag(2,2) equals the cosine product form") {
  MaskSpec spec = build_mask(build_G(RatMat::identity(2)), diag2());
  TrigPoly c1 = cosf1(0), c2 = cosf1(1), two = const2(2);
  TrigPoly expect =
      ((two + c1 + c2) * (two + c1 - c2) * (two - c1 + c2)).scaled(GaussRat(Rat(1, 16)));
  CHECK(spec.m0 == expect);
  CHECK(spec.m0.value_at_zero() == GaussRat(1));
}

TEST_CASE("higher-order masks match the closed-form coefficients") {
  RatMat I2 = RatMat::identity(2);
  MaskSpec s6 = build_mask(build_G_higher(I2, 6), quincunx());
  TrigPoly expect6 = const2(Rat(15, 32)) +
                     (cosf1(0) + cosf1(1)).scaled(GaussRat(Rat(1, 4))) +
                     (cos2x(0) + cos2x(1)).scaled(GaussRat(Rat(1, 64)));
  CHECK(s6.m0 == expect6);
  CHECK(s6.analysis_degree == 5);

  MaskSpec s8 = build_mask(build_G_higher(I2, 8), quincunx());
  TrigPoly expect8 = const2(Rat(245, 544)) +
                     (cosf1(0) + cosf1(1)).scaled(GaussRat(Rat(135, 544))) +
                     (cos2x(0) + cos2x(1)).scaled(GaussRat(Rat(27, 1088))) +
                     (cos3x(0) + cos3x(1)).scaled(GaussRat(Rat(1, 544)));
  CHECK(s8.m0 == expect8);
  CHECK(s8.m0.coeff({0, 0}) == GaussRat(Rat(245, 544)));
  CHECK(s8.analysis_degree == 7);
}

TEST_CASE("mask is invariant under positive scaling of G") {
  for (Rat lambda : {Rat(2), Rat(3, 5)}) {
    TrigPoly Gq = build_G(RatMat::identity(2));
    CHECK(build_mask(Gq.scaled(GaussRat(lambda)), quincunx()).m0 ==
          build_mask(Gq, quincunx()).m0);
    IsotropicDecomposition dec = decompose(skewed());
    TrigPoly Gs = build_G(dec.Q2);
    CHECK(build_mask(Gs.scaled(GaussRat(lambda)), skewed()).m0 ==
          build_mask(Gs, skewed()).m0);
  }
}

TEST_CASE("mask powers") {
  MaskSpec base = build_mask(build_G(RatMat::identity(2)), quincunx());
  CHECK(mask_power(base, 1).m0 == base.m0);

  MaskSpec sq = mask_power(base, 2);
  CHECK(sq.order == 2);
  CHECK(sq.analysis_degree == 5);
  // direct expansion oracle: constant term of m0^2 is 5/16
  CHECK(sq.m0.coeff({0, 0}) == GaussRat(Rat(5, 16)));
  CHECK(sq.m0 == base.m0 * base.m0);
  CHECK(sq.symbol == base.symbol * base.symbol);
  CHECK_THROWS_AS((void)mask_power(base, 0), BadArguments);
}

TEST_CASE("masks vanish at the nonzero cosets to order exactly 2*order") {
  struct Fixture {
    DilationMatrix A;
    TrigPoly G;
  };
  IsotropicDecomposition ds = decompose(skewed());
  std::vector<Fixture> fixtures;
  fixtures.push_back({quincunx(), build_G(RatMat::identity(2))});
  fixtures.push_back({skewed(), build_G(ds.Q2)});
  fixtures.push_back({diag2(), build_G(RatMat::identity(2))});

  for (const auto& f : fixtures) {
    for (int order = 1; order <= 2; ++order) {
      MaskSpec spec = mask_power(build_mask(f.G, f.A), order);
      CosetReps S = coset_reps(f.A.A.transpose());
      for (const auto& s : S.reps) {
        bool zero = true;
        for (const Rat& si : s)
          if (si != 0) zero = false;
        if (zero) continue;
        auto jet = spec.m0.jet_at(s, 2 * order);
        bool low_zero = true, top_nonzero = false;
        for (const auto& [a, c] : jet) {
          int deg = a[0] + a[1];
          if (deg < 2 * order && !c.is_zero()) low_zero = false;
          if (deg == 2 * order && !c.is_zero()) top_nonzero = true;
        }
        CHECK(low_zero);
        CHECK(top_nonzero);
      }
    }
  }
}

TEST_CASE("G vanishing at a coset is rejected") {
  // sin^2(x1) vanishes at 2pi(1/2,1/2), so the quincunx denominator is zero.
  TrigPoly bad = sinf1(0).pow(2);
  CHECK_THROWS_AS((void)build_mask(bad, quincunx()), GVanishesAtCoset);
}

TEST_CASE("scale-dependent family: quincunx drift target") {
  NonstatParams p;
  p.X = mono({1, 0}, GaussRat(0, 2));  // 2i*x1
  p.m = 1;
  MaskSpec fam = nonstationary_family(NonstatKind::X_plus_Wm, p, quincunx());
  CHECK(fam.nonstationary());
  CHECK(fam.analysis_degree == 2);
  CHECK(fam.order == 1);
  CHECK(fam.symbol ==
        mono({1, 0}, GaussRat(0, 2)) + mono({2, 0}, GaussRat(1)) + mono({0, 2}, GaussRat(1)));

  TrigPoly m0 = build_mask(build_G(RatMat::identity(2)), quincunx()).m0;
  for (long long j : {0LL, 1LL, 2LL, 3LL, 4LL, 5LL}) {
    TrigPoly got = fam.mask_at(j);
    TrigPoly correction =
        (j % 2 == 0)
            ? sinf1(0).scaled(GaussRat(0, -Rat(1, 4) * Rat(1, BigInt(1) << (j / 2))))
            : (sinf1(0) + sinf1(1))
                  .scaled(GaussRat(0, -Rat(1, 4) * Rat(1, BigInt(1) << ((j + 1) / 2))));
    CHECK(got == m0 + correction);
    CHECK(got.is_integer_periodic());
    CHECK_FALSE(got.is_real());
    CHECK(got.value_at_zero() == GaussRat(1));
  }
}

TEST_CASE("scale-dependent family: diag(2,2) cubic target") {
  NonstatParams p;
  p.X = mono({3, 0}, GaussRat::i()) + mono({0, 3}, GaussRat::i());  // i(x1^3+x2^3)
  p.m = 1;
  MaskSpec fam = nonstationary_family(NonstatKind::X_plus_Wm, p, diag2());
  CHECK(fam.analysis_degree == 3);

  // The family mask at scale j must agree with the mask built directly from
  // 2^{-j} G + lift(X); mask construction ignores overall scaling.
  TrigPoly G = build_G(RatMat::identity(2));
  TrigPoly liftX = trig_realize(p.X);
  for (long long j : {0LL, 1LL, 2LL}) {
    TrigPoly jG = G.scaled(GaussRat(Rat(1, BigInt(1) << j))) + liftX;
    CHECK(fam.mask_at(j) == build_mask(jG, diag2()).m0);
    CHECK(fam.mask_at(j).is_integer_periodic());
    CHECK_FALSE(fam.mask_at(j).is_real());
  }
  // masks genuinely differ between scales
  CHECK_FALSE(fam.mask_at(0) == fam.mask_at(1));
}

TEST_CASE("transported family symbols stay proportional to the target") {
  // Composing the scale-j mask data back through (A^-T)^j must reproduce the
  // X + W target up to scale.  Verified through the mask jets: the scale-j
  // numerator is built from jG, so check jG's jet directly via the family's
  // defining identity using an independently constructed jG.
  NonstatParams p;
  p.X = mono({1, 0}, GaussRat(0, 2));
  p.m = 1;
  DilationMatrix A = quincunx();
  RatMat AT = A.rat_transpose();
  MultiPoly W = quadratic_form(RatMat::identity(2));
  for (long long j : {0LL, 1LL, 2LL, 3LL}) {
    // (A^T)^j
    RatMat ATj = RatMat::identity(2);
    for (long long t = 0; t < j; ++t) ATj = ATj * AT;
    MultiPoly Xj = p.X.substitute_linear(ATj);
    TrigPoly jG = trig_realize(Xj) +
                  build_G(RatMat::identity(2)).scaled(GaussRat(Rat(BigInt(1) << j)));
    // transported jet: substitute xi -> (A^-T)^j xi into the Maclaurin jet
    MultiPoly jet = maclaurin_jet(jG, 2).substitute_linear(*inverse(ATj));
    // expected: proportional to X + W; the X part of the transported jet is
    // X((A^T)^j (A^-T)^j xi) = X and the W part is 2^j W(2^{-j/2}...)
    // -> both carry the same factor, leaving exactly X + W after normalizing
    // by the coefficient of x1.
    GaussRat lead = jet.coeff({1, 0});
    CHECK_FALSE(lead.is_zero());
    GaussRat target_lead = GaussRat(0, 2);
    MultiPoly normalized = jet.scaled(target_lead / lead);
    CHECK(normalized == p.X + W);
  }
}

TEST_CASE("family construction rejects unsupported inputs") {
  NonstatParams p;
  p.X = mono({1, 0}, GaussRat(0, 2));
  p.m = 1;
  // A^T powers for the shear-like matrix never become scalar: unsupported.
  CHECK_THROWS_AS((void)nonstationary_family(NonstatKind::X_plus_Wm, p, skewed()),
                  UnsupportedGroupOrder);

  // ker X inside ker W^m: no reproduced space beyond the stationary one.
  NonstatParams bad;
  bad.X = mono({2, 0}, GaussRat(1)) + mono({0, 2}, GaussRat(1));
  bad.m = 2;
  CHECK_THROWS_AS((void)nonstationary_family(NonstatKind::X_plus_Wm, bad, quincunx()),
                  ConditionFailed);

  // degree k == 2m is ill-posed for this construction
  NonstatParams even;
  even.X = mono({2, 0}, GaussRat(1));
  even.m = 1;
  CHECK_THROWS_AS((void)nonstationary_family(NonstatKind::X_plus_Wm, even, quincunx()),
                  BadArguments);

  // inhomogeneous X
  NonstatParams inhom;
  inhom.X = mono({1, 0}, GaussRat(1)) + mono({0, 2}, GaussRat(1));
  inhom.m = 2;
  CHECK_THROWS_AS((void)nonstationary_family(NonstatKind::X_plus_Wm, inhom, quincunx()),
                  BadArguments);

  NonstatParams sp;
  sp.powers = {2, 1};
  sp.weights = {Rat(1), Rat(1)};
  CHECK_THROWS_AS((void)nonstationary_family(NonstatKind::sum_of_powers, sp, quincunx()),
                  BadArguments);
  sp.powers = {1, 2};
  sp.weights = {Rat(1), Rat(-1)};
  CHECK_THROWS_AS((void)nonstationary_family(NonstatKind::sum_of_powers, sp, quincunx()),
                  BadArguments);
}

TEST_CASE("scale-dependent family: sum of form powers") {
  NonstatParams p;
  p.powers = {1, 2};
  p.weights = {Rat(1), Rat(1)};
  MaskSpec fam = nonstationary_family(NonstatKind::sum_of_powers, p, quincunx());
  CHECK(fam.nonstationary());
  CHECK(fam.order == 1);
  CHECK(fam.analysis_degree == 3);
  MultiPoly W = quadratic_form(RatMat::identity(2));
  CHECK(fam.symbol == W + W * W);

  // plumbing: scale j equals the mask of Gh + 2^j Gh^2
  TrigPoly Gh = build_G_higher(RatMat::identity(2), 6);
  for (long long j : {0LL, 1LL, 3LL}) {
    TrigPoly jG = Gh + Gh.pow(2).scaled(GaussRat(Rat(BigInt(1) << j)));
    CHECK(fam.mask_at(j) == build_mask(jG, quincunx()).m0);
    CHECK(fam.mask_at(j).is_real());
    CHECK(fam.mask_at(j).is_integer_periodic());
  }
}

TEST_CASE("grid nonnegativity scan") {
  TrigPoly Gq = build_G(RatMat::identity(2));
  NonnegReport rq = nonneg_check(Gq, 64);
  CHECK(rq.nonnegative);
  CHECK(rq.zeros_only_at_lattice);
  CHECK(rq.min_value >= -1e-12);

  IsotropicDecomposition ds = decompose(skewed());
  NonnegReport rs = nonneg_check(build_G(ds.Q2), 128);
  CHECK(rs.nonnegative);
  CHECK(rs.zeros_only_at_lattice);
}

TEST_CASE("readable rendering") {
  MaskSpec spec = build_mask(build_G(RatMat::identity(2)), quincunx());
  std::string s = spec.m0.to_string();
  CHECK(s.find("cos(x1)") != std::string::npos);
  CHECK(s.find("1/2") != std::string::npos);
  CHECK(TrigPoly(2).to_string() == "0");
}
