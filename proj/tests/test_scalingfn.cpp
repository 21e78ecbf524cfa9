#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <limits>

#include "doctest.h"
#include "ellipsf/errors.hpp"
#include "ellipsf/masks.hpp"
#include "ellipsf/scalingfn.hpp"

using namespace ellipsf;

namespace {

Eigen::MatrixXi mat2(int a, int b, int c, int d) {
  Eigen::MatrixXi M(2, 2);
  M << a, b, c, d;
  return M;
}

DilationMatrix quincunx() { return DilationMatrix::create(mat2(1, 1, 1, -1)); }
DilationMatrix skewed() { return DilationMatrix::create(mat2(1, -2, 1, 0)); }
DilationMatrix diag2() { return DilationMatrix::create(mat2(2, 0, 0, 2)); }

ScalingFunctionSpec quincunx_spec() {
  return scaling_spec(build_mask(build_G(RatMat::identity(2)), quincunx()));
}

ScalingFunctionSpec skewed_spec() {
  RatMat Q(2, 2);
  Q.at(0, 0) = GaussRat(2);
  Q.at(0, 1) = Q.at(1, 0) = GaussRat(Rat(1, 2));
  Q.at(1, 1) = GaussRat(1);
  return scaling_spec(build_mask(build_G(Q), skewed()));
}

ScalingFunctionSpec diag_spec() {
  return scaling_spec(build_mask(build_G(RatMat::identity(2)), diag2()));
}

ScalingFunctionSpec nonstat_quincunx_spec() {
  NonstatParams p;
  p.X = MultiPoly::monomial(2, {1, 0}, GaussRat(Rat(0), Rat(2)));  // 2i x
  p.m = 1;
  return scaling_spec(
      nonstationary_family(NonstatKind::X_plus_Wm, p, quincunx()));
}

ScalingFunctionSpec nonstat_diag_spec() {
  NonstatParams p;
  p.X = MultiPoly::monomial(2, {3, 0}, GaussRat::i()) +
        MultiPoly::monomial(2, {0, 3}, GaussRat::i());  // i (x^3 + y^3)
  p.m = 1;
  return scaling_spec(nonstationary_family(NonstatKind::X_plus_Wm, p, diag2()));
}

ScalingFunctionSpec sum_powers_spec() {
  NonstatParams p;
  p.powers = {1, 2};
  p.weights = {Rat(1), Rat(1)};
  return scaling_spec(
      nonstationary_family(NonstatKind::sum_of_powers, p, quincunx()));
}

MultiPoly mono(const MIdx& a, GaussRat c) { return MultiPoly::monomial(2, a, c); }

MultiPoly quadratic(const Rat& cxx, const Rat& cxy, const Rat& cyy) {
  return mono({2, 0}, GaussRat(cxx)) + mono({1, 1}, GaussRat(cxy)) +
         mono({0, 2}, GaussRat(cyy));
}

// Harmonic basis reproduced by the order-1 isotropic masks with W = |xi|^2.
std::vector<MultiPoly> harmonic_deg3() {
  return {mono({0, 0}, 1),
          mono({1, 0}, 1),
          mono({0, 1}, 1),
          mono({2, 0}, 1) + mono({0, 2}, -1),
          mono({1, 1}, 1),
          mono({3, 0}, 1) + mono({1, 2}, -3),
          mono({0, 3}, 1) + mono({2, 1}, -3)};
}

std::complex<double> jet_coeff(const NumericJet& jet, const MIdx& a) {
  auto it = jet.find(a);
  return it == jet.end() ? std::complex<double>(0.0) : it->second;
}

// Both routes determine the jet only up to the scalar carried by the dropped
// tail of the product, so compare directions: normalize each side by its
// entry at the symbolic route's largest coefficient.  Any non-finite value
// (overflow, 0/0) propagates as +inf and fails the caller's bound loudly.
double jet_direction_diff(const NumericJet& num, const MultiPoly& sym,
                          int deg) {
  MIdx ref;
  double best = -1.0;
  for (const auto& [a, c] : sym.terms)
    if (total_degree(a) <= deg && std::abs(to_complex(c)) > best) {
      best = std::abs(to_complex(c));
      ref = a;
    }
  if (best <= 0.0) return std::numeric_limits<double>::infinity();
  const std::complex<double> dn = jet_coeff(num, ref);
  const std::complex<double> ds = to_complex(sym.coeff(ref));
  std::vector<MIdx> keys;
  for (const auto& [a, c] : num)
    if (total_degree(a) <= deg) keys.push_back(a);
  for (const auto& [a, c] : sym.terms)
    if (total_degree(a) <= deg) keys.push_back(a);
  double worst = 0.0;
  for (const auto& a : keys) {
    const double v =
        std::abs(jet_coeff(num, a) / dn - to_complex(sym.coeff(a)) / ds);
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, v);
  }
  return worst;
}

Box square_box(double r) { return Box{{-r, -r}, {r, r}}; }

}  // namespace

TEST_CASE("numeric jet: quincunx n=(1,0) vanishes to first order") {
  const auto spec = quincunx_spec();
  const auto r = phihat_jet_numeric(spec, {1, 0}, 3, 30);
  CHECK(std::abs(jet_coeff(r.jet, {0, 0})) < 1e-12);
  CHECK(std::abs(jet_coeff(r.jet, {1, 0})) < 1e-12);
  CHECK(std::abs(jet_coeff(r.jet, {0, 1})) < 1e-12);
  // degree-2 part proportional to x^2 + y^2
  const auto c20 = jet_coeff(r.jet, {2, 0});
  CHECK(std::abs(c20) > 1e-3);
  CHECK(std::abs(jet_coeff(r.jet, {0, 2}) - c20) < 1e-12);
  CHECK(std::abs(jet_coeff(r.jet, {1, 1})) < 1e-12);
  CHECK(r.error_estimate < 1e-8);
}

TEST_CASE("numeric jet: value of phi-hat vanishes on the punctured window") {
  const auto spec = quincunx_spec();
  for (int n1 = -3; n1 <= 3; ++n1)
    for (int n2 = -3; n2 <= 3; ++n2) {
      if (n1 == 0 && n2 == 0) continue;
      const auto r = phihat_jet_numeric(spec, {n1, n2}, 0, 30);
      CHECK(std::abs(jet_coeff(r.jet, {0, 0})) < 1e-12);
    }
}

TEST_CASE("numeric jet: error estimate flags insufficient factor count") {
  const auto spec = quincunx_spec();
  CHECK(phihat_jet_numeric(spec, {1, 0}, 2, 3).error_estimate > 1e-2);
  CHECK(phihat_jet_numeric(spec, {32, 17}, 2, 3).error_estimate > 1e-2);
  CHECK(phihat_jet_numeric(spec, {32, 17}, 2, 40).error_estimate < 1e-4);
}

TEST_CASE("numeric jet: argument validation") {
  const auto spec = quincunx_spec();
  CHECK_THROWS_AS(phihat_jet_numeric(spec, {0, 0}, 2, 10), BadArguments);
  CHECK_THROWS_AS(phihat_jet_numeric(spec, {1, 0}, 2, 0), BadArguments);
  CHECK_THROWS_AS(phihat_jet_numeric(spec, {1}, 2, 10), BadArguments);
}

TEST_CASE("symbolic jet: quincunx n=(1,0) equals (x^2+y^2)/16 exactly") {
  const auto spec = quincunx_spec();
  const auto r = phihat_jet_symbolic(spec, {1, 0}, 3);
  CHECK(r.vanishing_index == 1);
  REQUIRE(r.coset_shift.size() == 2);
  CHECK(r.coset_shift[0] == Rat(1, 2));
  CHECK(r.coset_shift[1] == Rat(1, 2));
  const MultiPoly expected =
      quadratic(Rat(1, 16), Rat(0), Rat(1, 16));
  CHECK(r.jet == expected);
  CHECK(std::abs(r.tail_scale) > 0.01);
}

TEST_CASE("symbolic jet: deeper shell picks up exact unit prefactors") {
  // n = (2,0) sits three shells in; the two earlier factors are evaluated at
  // integer points and contribute 1 + O(deg 2) exactly.
  const auto spec = quincunx_spec();
  const auto r = phihat_jet_symbolic(spec, {2, 0}, 3);
  CHECK(r.vanishing_index == 3);
  const MultiPoly expected =
      quadratic(Rat(1, 64), Rat(0), Rat(1, 64));
  CHECK(r.jet == expected);
}

TEST_CASE("symbolic jet: squared mask gives the squared form") {
  const auto spec2 = scaling_spec(
      mask_power(build_mask(build_G(RatMat::identity(2)), quincunx()), 2));
  const auto r = phihat_jet_symbolic(spec2, {1, 0}, 5);
  const MultiPoly expected =
      quadratic(Rat(1, 16), Rat(0), Rat(1, 16)).pow(2);
  CHECK(r.jet == expected);
}

TEST_CASE("symbolic jet: skewed degree-2 part transports the quadratic form") {
  const auto spec = skewed_spec();
  const auto r = phihat_jet_symbolic(spec, {1, 0}, 3);
  CHECK(r.vanishing_index == 2);
  // Degree-2 part must be proportional to W(xi) = 2 x^2 + x y + y^2 (the
  // transported form is a scalar multiple of W by invariance).
  const MultiPoly deg2 = r.jet.homogeneous_part(2);
  const GaussRat lead = deg2.coeff({2, 0});
  CHECK(lead != GaussRat(0));
  const MultiPoly W = quadratic(Rat(2), Rat(1), Rat(1));
  CHECK(deg2.scaled(GaussRat(2) / lead) == W);
  CHECK(r.jet.coeff({0, 0}) == GaussRat(0));
  CHECK(r.jet.coeff({1, 0}) == GaussRat(0));
  CHECK(r.jet.coeff({0, 1}) == GaussRat(0));
}

TEST_CASE("symbolic jet: sixth-order mask still vanishes to second order") {
  const auto spec =
      scaling_spec(build_mask(build_G_higher(RatMat::identity(2), 6), quincunx()));
  const auto r = phihat_jet_symbolic(spec, {1, 0}, 5);
  CHECK(r.jet.coeff({0, 0}) == GaussRat(0));
  CHECK(r.jet.coeff({1, 0}) == GaussRat(0));
  CHECK(r.jet.coeff({0, 1}) == GaussRat(0));
  const MultiPoly deg2 = r.jet.homogeneous_part(2);
  const GaussRat lead = deg2.coeff({2, 0});
  CHECK(lead != GaussRat(0));
  CHECK(deg2.coeff({1, 1}) == GaussRat(0));
  CHECK(deg2.coeff({0, 2}) == lead);
}

TEST_CASE("symbolic jet: nonstationary quincunx leading form 2i x + x^2 + y^2") {
  const auto spec = nonstat_quincunx_spec();
  const auto r = phihat_jet_symbolic(spec, {1, 0}, 2);
  const MultiPoly expected = mono({1, 0}, GaussRat(Rat(0), Rat(1, 8))) +
                             quadratic(Rat(1, 16), Rat(0), Rat(1, 16));
  CHECK(r.jet == expected);
}

TEST_CASE("jet providers agree through the exactly-known degrees") {
  // The numeric product carries convergent tail factors whose linear terms
  // multiply the leading form; those first show up one degree above the
  // vanishing order, where the exact route (by design) stops tracking.
  struct Fixture {
    ScalingFunctionSpec spec;
    int exact_degree;
  };
  const std::vector<Fixture> fixtures = {
      {quincunx_spec(), 2},
      {skewed_spec(), 2},
      {diag_spec(), 2},
      {scaling_spec(build_mask(build_G_higher(RatMat::identity(2), 6), quincunx())), 2},
      {nonstat_quincunx_spec(), 1},
      {nonstat_diag_spec(), 2},
      {sum_powers_spec(), 2},
  };
  const std::vector<std::vector<long long>> pts = {
      {1, 0}, {0, 1}, {1, 1}, {2, 1}, {2, 0}};
  for (const auto& f : fixtures) {
    for (const auto& n : pts) {
      const auto num = phihat_jet_numeric(f.spec, n, 3, 40);
      const auto sym = phihat_jet_symbolic(f.spec, n, 3);
      CHECK(jet_direction_diff(num.jet, sym.jet, f.exact_degree) < 1e-7);
    }
  }
}

TEST_CASE("jet providers: the tail scalar matches the numeric product when "
          "the factors converge") {
  const auto spec = quincunx_spec();
  const auto num = phihat_jet_numeric(spec, {1, 0}, 3, 40);
  const auto sym = phihat_jet_symbolic(spec, {1, 0}, 3);
  const auto ratio = jet_coeff(num.jet, {2, 0}) /
                     (to_complex(sym.jet.coeff({2, 0})) * sym.tail_scale);
  CHECK(std::abs(ratio - 1.0) < 1e-6);
}

TEST_CASE("stable family evaluator matches the expanded masks at small "
          "scales") {
  // At small j the expanded coefficients are still moderate, so the plain
  // trig-poly jet is trustworthy and the factored quotient form must agree.
  const std::vector<ScalingFunctionSpec> specs = {
      nonstat_quincunx_spec(), nonstat_diag_spec(), sum_powers_spec()};
  const std::vector<std::vector<double>> pts = {{0.37, -1.21}, {2.04, 0.55}};
  for (const auto& spec : specs) {
    REQUIRE(static_cast<bool>(spec.masks.family_jet_numeric));
    for (long long j = 1; j <= 3; ++j) {
      for (const auto& xi : pts) {
        const auto fast = spec.masks.family_jet_numeric(j, xi, 3);
        const auto ref = spec.masks.mask_at(j).jet_at_numeric(xi, 3);
        for (const auto& [a, c] : ref)
          CHECK(std::abs(jet_coeff(fast, a) - c) < 1e-10);
      }
    }
  }
}

TEST_CASE("cubic-over-quadratic family: factors approach a fixed non-unital "
          "limit") {
  // With a degree-3 target over order 1, the scale-j masks develop coset
  // gradients that grow with the scale; the factors of the truncated
  // transform product then approach prod_s (1 + grad(2 pi s) . xi / value)
  // instead of 1.  At n = e1 that limit is (1 - 2 pi i)(1 - pi i); the
  // product diverges in overall scale while its direction converges, which
  // is why the jet consumers below work scale-free.
  const auto spec = nonstat_diag_spec();
  const double two_pi = 2.0 * 3.14159265358979323846;
  const std::complex<double> limit =
      (std::complex<double>(1.0, -two_pi)) *
      (std::complex<double>(1.0, -0.5 * two_pi));
  for (int t : {16, 24, 32}) {
    const auto jet = spec.masks.family_jet_numeric(
        t, {two_pi / std::pow(2.0, t), 0.0}, 0);
    CHECK(std::abs(jet.at(MIdx{0, 0}) - limit) < 1e-4);
  }
  // The numeric route reports the non-convergence honestly.
  const auto num = phihat_jet_numeric(spec, {1, 0}, 3, 30);
  CHECK(num.error_estimate > 1.0);
}

TEST_CASE("jet providers: the numeric tail genuinely perturbs degree 3") {
  const auto spec = quincunx_spec();
  const auto num = phihat_jet_numeric(spec, {1, 0}, 3, 40);
  const auto sym = phihat_jet_symbolic(spec, {1, 0}, 3);
  // Exact route has no degree-3 term at this point; the infinite product
  // does (a converged cross term, not truncation noise).
  CHECK(sym.jet.coeff({3, 0}) == GaussRat(0));
  const auto ratio =
      jet_coeff(num.jet, {3, 0}) / jet_coeff(num.jet, {2, 0});
  CHECK(std::abs(ratio) > 0.1);
}

TEST_CASE("cascade: quincunx subdivision is interpolating and conservative") {
  const auto spec = quincunx_spec();
  const auto grid = cascade_eval(spec, 8, square_box(4.0));
  CHECK(grid.level == 8);
  CHECK(std::abs(grid.mass - 1.0) < 1e-4);
  CHECK(grid.level_diff < 1e-6);
  CHECK(grid.refinement_residual < 1e-6);
  CHECK(grid.support_radius == doctest::Approx(1.875).epsilon(1e-9));
  CHECK(grid.points.size() == grid.support.size());  // box covers the support
  // Interpolating scheme: the impulse survives at the origin.
  const auto it = grid.support.find({0, 0});
  REQUIRE(it != grid.support.end());
  CHECK(it->second == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cascade: partition of unity holds on the refined lattice") {
  const auto spec = quincunx_spec();
  const auto grid = cascade_eval(spec, 8, square_box(4.0));
  // A^8 = 16 I for the quincunx matrix.
  int checked = 0;
  std::size_t step = 0;
  for (const auto& [n, v] : grid.support) {
    if (++step % 61 != 0) continue;
    double sum = 0.0;
    for (int k1 = -4; k1 <= 4; ++k1)
      for (int k2 = -4; k2 <= 4; ++k2) {
        const auto jt = grid.support.find({n[0] - 16 * k1, n[1] - 16 * k2});
        if (jt != grid.support.end()) sum += jt->second;
      }
    CHECK(std::abs(sum - 1.0) < 1e-6);
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("cascade: rejects nonstationary specs and diverging masks") {
  CHECK_THROWS_AS(cascade_eval(nonstat_quincunx_spec(), 4, square_box(4.0)),
                  BadArguments);
  // A legal mask (value 1 at zero, real, integer-periodic) whose subdivision
  // weights blow up: m0 = -3 + 4 cos(x1).
  MaskSpec bad;
  bad.A = mat2(1, 1, 1, -1);
  bad.q = 2;
  bad.d = 2;
  bad.m0 = TrigPoly::constant(2, GaussRat(-3)) +
           TrigPoly::full_cos(2, 0).scaled(GaussRat(4));
  CHECK(bad.m0.value_at_zero() == GaussRat(1));
  CHECK_THROWS_AS(cascade_eval(scaling_spec(bad), 8, square_box(8.0)),
                  Divergence);
}

TEST_CASE("reproduction: quincunx shifts reproduce the computed space") {
  const auto spec = quincunx_spec();
  const auto grid = cascade_eval(spec, 8, square_box(4.0));
  const MultiPoly xy = mono({1, 1}, 1);
  const MultiPoly diff2 = mono({2, 0}, 1) + mono({0, 2}, -1);
  CHECK(verify_reproduction(grid, xy, 4).sup_residual < 1e-6);
  CHECK(verify_reproduction(grid, diff2, 4).sup_residual < 1e-6);

  const auto ones = verify_reproduction(grid, mono({0, 0}, 1), 4);
  CHECK(ones.sup_residual < 1e-6);
  int central = 0;
  for (std::size_t i = 0; i < ones.shift_list.size(); ++i) {
    const auto& k = ones.shift_list[i];
    if (std::abs(k[0]) <= 2 && std::abs(k[1]) <= 2) {
      CHECK(std::abs(ones.coefficients[i] - 1.0) < 1e-6);
      ++central;
    }
  }
  CHECK(central == 25);
}

TEST_CASE("reproduction: x^2 is rejected") {
  const auto spec = quincunx_spec();
  const auto grid = cascade_eval(spec, 8, square_box(4.0));
  const auto rep = verify_reproduction(grid, mono({2, 0}, 1), 4);
  CHECK(rep.sup_residual > 1e-2);
}

TEST_CASE("reproduction: window must clear the support margin") {
  const auto spec = quincunx_spec();
  const auto grid = cascade_eval(spec, 6, square_box(4.0));
  CHECK_THROWS_AS(verify_reproduction(grid, mono({1, 1}, 1), 1), BadArguments);
}

TEST_CASE("annihilation: stationary fixtures kill their spaces") {
  const auto space = PolynomialSpace::from_polys(2, harmonic_deg3());
  for (const auto& spec : {quincunx_spec(), diag_spec()}) {
    const auto rep = verify_annihilation(spec, space, 2, 30);
    CHECK(rep.max_abs < 1e-8);
  }
  const auto skew_space = PolynomialSpace::from_polys(
      2, {mono({0, 0}, 1), mono({1, 0}, 1), mono({0, 1}, 1),
          mono({2, 0}, 1) + mono({1, 1}, -4),
          mono({0, 2}, 1) + mono({1, 1}, -2),
          mono({3, 0}, 1) + mono({2, 1}, 6) + mono({1, 2}, -12),
          mono({0, 3}, 1) + mono({2, 1}, -3) + mono({1, 2}, 3)});
  CHECK(verify_annihilation(skewed_spec(), skew_space, 2, 30).max_abs < 1e-8);
}

TEST_CASE("annihilation: nonstationary fixtures kill their spaces") {
  const auto q_space = PolynomialSpace::from_polys(
      2, {mono({0, 0}, 1), mono({0, 1}, 1),
          mono({1, 0}, 1) + mono({0, 2}, 1)});
  CHECK(verify_annihilation(nonstat_quincunx_spec(), q_space, 2, 30).max_abs <
        1e-8);

  const auto d_space = PolynomialSpace::from_polys(
      2, {mono({0, 0}, 1), mono({1, 0}, 1), mono({0, 1}, 1),
          mono({2, 0}, 1) + mono({0, 2}, -1), mono({1, 1}, 1),
          mono({2, 0}, 3) + mono({3, 0}, -1) + mono({1, 2}, 3),
          mono({0, 2}, 3) + mono({0, 3}, -1) + mono({2, 1}, 3)});
  CHECK(verify_annihilation(nonstat_diag_spec(), d_space, 2, 30).max_abs <
        1e-8);

  const auto sp_space = PolynomialSpace::from_polys(2, harmonic_deg3());
  CHECK(verify_annihilation(sum_powers_spec(), sp_space, 2, 30).max_abs < 1e-8);
}

TEST_CASE("annihilation: negative controls") {
  const auto spec = quincunx_spec();
  // Span {1, x^2}: the constant row reads off phi-hat's lattice zeros, while
  // x^2 pairs with the nonzero second derivative and must stand out.
  const auto mixed =
      PolynomialSpace::from_polys(2, {mono({0, 0}, 1), mono({2, 0}, 1)});
  const auto rep = verify_annihilation(spec, mixed, 2, 30);
  REQUIRE(rep.per_poly.size() == 2);
  CHECK(rep.per_poly[0] < 1e-12);
  CHECK(rep.per_poly[1] > 1e-3);
  // The x^2 value is exactly twice the unit-normalized second jet entry.
  double expect = 0.0;
  for (int n1 = -2; n1 <= 2; ++n1)
    for (int n2 = -2; n2 <= 2; ++n2) {
      if (n1 == 0 && n2 == 0) continue;
      const auto jr = phihat_jet_numeric(spec, {n1, n2}, 2, 30);
      double scale = 0.0;
      for (const auto& [a, c] : jr.jet) scale = std::max(scale, std::abs(c));
      expect =
          std::max(expect, 2.0 * std::abs(jet_coeff(jr.jet, {0, 2})) / scale);
    }
  CHECK(rep.max_abs == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("scaling_spec validates the mask normalization") {
  MaskSpec bad;
  bad.A = mat2(1, 1, 1, -1);
  bad.q = 2;
  bad.d = 2;
  bad.m0 = TrigPoly::constant(2, GaussRat(Rat(1, 2)));
  CHECK_THROWS_AS(scaling_spec(bad), BadArguments);
}
