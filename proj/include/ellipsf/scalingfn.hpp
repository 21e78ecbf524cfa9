#pragma once

// Concrete machinery for the scaling function phi attached to a mask:
// Taylor jets of the Fourier transform phi-hat at lattice points 2*pi*n
// (truncated-product numeric route and exact factorized route), cascade
// evaluation of phi on refined lattices, and numeric verification that the
// integer shifts of phi reproduce / annihilate what they should.

#include <Eigen/Core>

#include <complex>
#include <map>
#include <vector>

#include "ellipsf/isotropic.hpp"
#include "ellipsf/masks.hpp"
#include "ellipsf/polyops.hpp"

namespace ellipsf {

// A mask family together with its dilation matrix.  phi-hat is the infinite
// product of masks transported through powers of A^-T; everything in this
// module consumes the pair rather than the raw mask.
struct ScalingFunctionSpec {
  DilationMatrix A;
  MaskSpec masks;
  int order = 1;
};

// Packages a mask into a spec after checking that the mask (each scale's
// mask, for families) takes the value 1 at the origin.
ScalingFunctionSpec scaling_spec(const MaskSpec& masks);

using NumericJet = std::map<MIdx, std::complex<double>>;

struct JetNumericResult {
  NumericJet jet;         // coefficients of (xi - 2 pi n)^alpha, |alpha| <= L
  double error_estimate = 0.0;  // sup deviation of factor J's jet from 1
  int factors = 0;              // J
};

// Jet about 2*pi*n of the J-factor truncation prod_{j=1..J} of the scale-j
// mask evaluated at (A^-T)^j xi.  Each factor's jet at its transported point
// is computed in closed form and composed exactly; rounding enters only
// through the floating-point phases.  The error estimate reports how far the
// final factor is from the constant 1: a large value means either that J
// factors do not yet reach the shell of n, or that the family's factors do
// not approach 1 at all -- then the product diverges in overall scale while
// its direction still converges, and only direction-level consumers (kernel
// extraction, normalized annihilation) remain meaningful.  Throws Divergence
// if the product overflows double range.
JetNumericResult phihat_jet_numeric(const ScalingFunctionSpec& spec,
                                    const std::vector<long long>& n, int L,
                                    int J);

struct JetSymbolicResult {
  // Exact jet of the finite significant part of the product: the shells
  // before the vanishing factor (all sitting at integer points, hence
  // exactly periodic) times the vanishing factor itself at its coset point.
  MultiPoly jet;
  // Value of the dropped tail of the product at 2*pi*n; the full jet is
  // tail_scale * jet up to terms the tail perturbs (degree at least
  // vanishing order + 1).  For families whose factors do not approach 1 the
  // tail has no limit; it is then truncated at a magnitude cap and only
  // meaningful as "the leading jet is exact up to some scalar".
  std::complex<double> tail_scale;
  int vanishing_index = 0;    // shell j0 with n = (A^T)^{j0} (k + s)
  std::vector<Rat> coset_shift;  // the nonzero representative s
};

// Exact leading jet of phi-hat at 2*pi*n via the shell factorization of n.
// Exactly one factor of the product vanishes at the transported point; its
// jet and the finitely many earlier factors are exact, the rest contribute
// the scalar tail.  Throws FactorizationGap if n admits no factorization
// within the shell bound.
JetSymbolicResult phihat_jet_symbolic(const ScalingFunctionSpec& spec,
                                      const std::vector<long long>& n, int L);

// Axis-aligned box in x-space.
struct Box {
  std::vector<double> lo, hi;
};

struct CascadeGrid {
  int level = 0;  // number of subdivision rounds J
  Eigen::MatrixXi A;
  long long q = 1;
  Box box;
  Eigen::MatrixXd to_x;  // A^-J: maps a stored lattice index to its point

  // Points A^-J n inside the box, with the cascade value at each.
  std::vector<std::vector<int>> points;
  std::vector<double> values;

  // Full-support data (independent of the box) used by the verifiers.
  std::map<std::vector<int>, double> support;
  std::vector<std::pair<std::vector<int>, double>> weights;  // (k, q c_k)

  double mass = 0.0;                 // q^-J * sum of all values
  double level_diff = 0.0;           // sup |C_J[A m] - C_{J-1}[m]|
  double refinement_residual = 0.0;  // sup defect of the two-scale relation
  double support_radius = 0.0;       // sup-norm radius where |phi| > 1e-9

  Eigen::VectorXd coords(const std::vector<int>& n) const;
};

// Iterated subdivision from the unit impulse: J rounds of upsample-by-A
// followed by convolution with the weights q c_k.  The result samples phi
// (normalized to unit mean) on A^-J Z^d.  Stationary real masks only.
// Throws Divergence when the level-to-level sup difference grows three
// times in a row.
CascadeGrid cascade_eval(const ScalingFunctionSpec& spec, int J,
                         const Box& box);

struct ReproductionReport {
  double sup_residual = 0.0;  // on interior points
  int interior_points = 0;
  int shifts = 0;
  double margin = 0.0;  // excluded boundary width = support radius
  std::vector<std::vector<int>> shift_list;
  std::vector<double> coefficients;  // least-squares c_k, same order
};

// Least-squares fit of sum_k c_k phi(x - k) to P over the shifts
// ||k||_inf <= window, evaluated at grid points with ||x||_inf <=
// window - support_radius so that no contributing shift is truncated.
// Small residual demonstrates that P lies in the span of the shifts.
ReproductionReport verify_reproduction(const CascadeGrid& grid,
                                       const MultiPoly& P, int window);

struct AnnihilationReport {
  double max_abs = 0.0;            // over all basis polys and points
  std::vector<double> per_poly;    // max over points, per basis element
  int window = 0;
  int factors = 0;
};

// Evaluates P(-iD) phi-hat at 2*pi*n for every basis element P of the space
// and every 0 < ||n||_inf <= N, by contracting coefficients against the
// J-factor numeric jet normalized to unit max-abs per point (the product's
// overall scalar is truncation-dependent and cancels out of the kernel
// property being checked).  All values should be tiny exactly when the
// space is reproduced by the integer shifts of phi.
AnnihilationReport verify_annihilation(const ScalingFunctionSpec& spec,
                                       const PolynomialSpace& space, int N,
                                       int J);

}  // namespace ellipsf
