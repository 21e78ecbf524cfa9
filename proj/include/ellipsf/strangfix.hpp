#pragma once

// Shift-invariant polynomial space analysis for refinable functions.  The
// integer shifts of phi reproduce exactly the polynomials whose coefficient
// vectors annihilate every derivative block of phi-hat taken at the nonzero
// lattice points 2 pi n.  This module stacks those blocks over a finite
// window, extracts null spaces (exactly over Q(i), or by SVD from floating
// jets), locates the top reproduced degree, and classifies the resulting
// space by scale and affine invariance.

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <vector>

#include "ellipsf/polyops.hpp"
#include "ellipsf/rational.hpp"
#include "ellipsf/scalingfn.hpp"

namespace ellipsf {

// Source of Taylor jets of phi-hat about the points 2 pi n, n != 0, with up
// to two routes.
//
// `exact` returns the Gaussian-rational jet of the significant factor of the
// infinite mask product (shell factorization).  The dropped analytic tail
// multiplies the true jet by a nonzero scalar and perturbs coefficients
// above the factor's vanishing order; at the analysis degree of each mask
// the null spaces still agree with the full product (route_agreement below
// measures this), but at higher degrees the missing tail derivatives can
// leave extra vectors in the kernel.
//
// `numeric` returns the floating jet of a J-factor truncation of the full
// product, tail included.  Its overall scale is truncation-dependent for
// families whose factors do not approach 1; consumers therefore normalize
// per point.
//
// Callbacks must be safe for concurrent read-only use.
struct JetProvider {
  int d = 0;
  std::function<MultiPoly(const std::vector<long long>& n, int L)> exact;
  std::function<NumericJet(const std::vector<long long>& n, int L)> numeric;

  bool is_exact() const { return static_cast<bool>(exact); }
};

// Shell-factorization route only; results are cached per (n, L).
JetProvider exact_jet_provider(const ScalingFunctionSpec& spec);

// Truncated-product route only, with J factors.
JetProvider numeric_jet_provider(const ScalingFunctionSpec& spec, int J);

// Both routes: exact jets for the order and the null spaces, truncated-
// product jets for numeric cross-checks.  This is what the analysis entry
// points want.
JetProvider jet_provider(const ScalingFunctionSpec& spec, int J = 30);

// The lattice points 0 < ||n||_inf <= N in lexicographic order; every
// stacked matrix enumerates its row blocks in this order.
std::vector<std::vector<long long>> lattice_window(int d, int N);

// Stacked derivative conditions through degree L: one dim_g(d, L)-square
// block per window point, row block b = derivative matrix of the jet at
// 2 pi n_b.  A polynomial sum_a v_a x^a is reproduced by the integer shifts
// of phi exactly when its coefficient vector v annihilates every block.
//
// A provider with the exact route fills `rat`; a numeric-only provider
// fills `num` with each block rescaled to unit max-abs entry.  Rescaling
// rows changes neither null space nor row space, but it keeps blocks of
// families with scale-divergent products comparable inside one SVD.
struct DeltaMatrix {
  int d = 0;
  int L = 0;
  std::vector<std::vector<long long>> window;
  bool exact = false;
  RatMat rat;
  Eigen::MatrixXcd num;

  // Rows per window point = dim_g(d, L).
  std::size_t block_rows() const;
};

DeltaMatrix delta_matrix(const JetProvider& jp, int L, int N);

// Canonical basis of {v : M v = 0} for the exact route, read off as
// monomial coefficient rows of degree <= L.
PolynomialSpace exact_kernel(const DeltaMatrix& dm);

// Null space of the numeric route: right singular vectors whose singular
// value falls below rel_tol times the largest one, returned as rows.
Eigen::MatrixXcd numeric_kernel(const DeltaMatrix& dm, double rel_tol = 1e-9);

// Rows of a RatMat as a complex floating matrix.
Eigen::MatrixXcd to_complex_matrix(const RatMat& M);

// Sine of the largest principal angle between the row spans of A and B.
// Returns 0 when both spans are trivial and 1 when exactly one is; a
// dimension mismatch always shows up as a value >= 1/sqrt(max dim).
double max_principal_angle_sin(const Eigen::MatrixXcd& A,
                               const Eigen::MatrixXcd& B);

// Exact kernel at degree L over windows of doubling radius N, 2N, 4N, ...
// until the kernel repeats across two consecutive radii; a widened window
// can only cut the kernel further, so the repeat is verified by checking
// that every block of the wider window already annihilates the current
// basis.  Throws NoStabilization (message lists the dimension sequence)
// when new conditions keep appearing past max_radius.
struct StabilizedKernel {
  PolynomialSpace space;
  int window_used = 0;                // smaller radius of the stable pair
  std::vector<std::size_t> dims;      // kernel dimension per radius tried
};

StabilizedKernel stabilized_kernel(const JetProvider& jp, int L, int N,
                                   int max_radius = 16);

// Analysis order L = 1 + the vanishing order of phi-hat on the punctured
// lattice (the minimum over window points of the lowest jet degree with a
// nonzero coefficient, accepted once doubling the window radius stops
// lowering it).  Below that vanishing order every derivative block is
// identically zero, so the kernels at degrees 0..L all have guaranteed new
// content, and L is the last degree whose kernel slices cannot gap; the
// graded slices of the exact kernel at L are cross-checked and a missing
// one throws DefinitionMismatch.  Returns -1 when some lattice value
// survives (nothing is reproduced).  Throws OrderExceedsBound when the
// vanishing order pushes L past l_max and NoStabilization when widening
// the window keeps lowering the minimum.
//
// Deliberately NOT "the degree where the kernel stops growing": the kernel
// can pick up isolated lattice-symmetric extras above L (for the quincunx
// mask the harmonic x^3 y - x y^3 joins at degree 4 and the growth stops
// only there), so that reading names a larger degree for several masks.
// The reported space is the kernel at L.
int strang_fix_order(const JetProvider& jp, int l_max, int N);

// Full analysis result.  `space` holds the canonical basis; its rows are
// the kernel vectors.  `graded[l]` spans the degree-l slices of the basis
// (kept over the common degree-L coefficient space).  For scale-invariant
// results the slices themselves lie in the space and the basis decomposes
// through them.
struct SFResult {
  int order = -1;           // top degree present in the space
  int analysis_degree = -1; // L the kernel was computed at
  PolynomialSpace space;
  std::vector<PolynomialSpace> graded;
  bool scale_invariant = false;
  int window_used = 0;
  std::vector<std::size_t> dims;  // stabilization dimension sequence
};

// Extracts the polynomial space reproduced by the integer shifts of phi.
// The space itself always comes from the exact route (required), computed
// at the analysis degree over a stabilized window.  With forced_degree < 0
// the degree comes from strang_fix_order (bounded by l_max); passing
// forced_degree >= 0 skips the search.  Shift-invariance is not taken on
// faith: every basis element is translated by three fixed rational shifts
// and membership of the translate is checked exactly.
SFResult shift_invariant_space(const JetProvider& jp, int N, int l_max,
                               int forced_degree = -1);

// True exactly when every graded slice of every basis vector lies back in
// the space; records the answer on the result and its space.
bool scale_invariance_flag(SFResult& result);

// Largest subspace that is spanned by homogeneous elements of the space and
// closed under partial derivatives -- hence invariant under dilations about
// any center and under translations.  Equals the full space when the result
// is scale-invariant.
PolynomialSpace largest_affine_subspace(const SFResult& result);

// Exact and numeric null spaces of the same analysis, compared as
// subspaces.  The exact kernel is authoritative; max_sin far above zero or
// a dimension mismatch flags a route discrepancy.
struct RouteAgreement {
  double max_sin = 1.0;
  std::size_t exact_dim = 0;
  std::size_t numeric_dim = 0;
};

RouteAgreement route_agreement(const ScalingFunctionSpec& spec, int L,
                               int N = 2, int J = 30,
                               double rel_tol = 1e-9);

// Full-rank check of a single derivative block.  The (l, L) block of the
// derivative matrix of S sees only the homogeneous degree-(L-l) part of S:
// the block has full row rank dim_h(d, l) when that part is nonzero and
// rank 0 when it vanishes.  `passed` reports whether the computed rank
// matches this dichotomy.
struct RankCheck {
  int l = 0;
  int L = 0;
  std::size_t rank = 0;
  std::size_t expected = 0;
  bool jet_has_term = false;  // S has a nonzero term of degree L - l
  bool passed = false;
};

RankCheck rank_property_check(const MultiPoly& S, int l, int L);

// One-call analysis used by the command-line front end.
//
// The analysis degree is resolved in this order: forced_degree if >= 0,
// else the degree the mask construction declares (MaskSpec::analysis_degree),
// else the lattice-zero-order search of strang_fix_order.  The declaration
// is preferred because it sees the whole construction: a mask whose symbol
// tracks the quadratic form past degree 4 reproduces polynomials of higher
// degree than the vanishing order of its lattice zeros certifies.
struct AnalyzeOptions {
  int window = 1;          // starting window radius
  int l_max = -1;          // order search bound; -1 = 2 * mask order + 6
  int forced_degree = -1;  // analyze at this degree; -1 = resolve as above
  int truncation = 30;     // J for the numeric route
  bool check_routes = true;
};

struct Analysis {
  SFResult sf;
  PolynomialSpace affine;
  RouteAgreement routes;  // populated when check_routes
};

Analysis analyze(const ScalingFunctionSpec& spec,
                 const AnalyzeOptions& opt = {});

}  // namespace ellipsf
