#pragma once

#include <Eigen/Core>
#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ellipsf/isotropic.hpp"
#include "ellipsf/polyops.hpp"
#include "ellipsf/trigpoly.hpp"

namespace ellipsf {

// Canonical trigonometric lift of a polynomial: each monomial xi^alpha maps
// to a product of per-variable factors whose Maclaurin expansion starts with
// xi^alpha (next term two degrees up).  Even power p uses (2 sin(xi/2))^p,
// odd power p uses sin(xi) (2 sin(xi/2))^{p-1}.
TrigPoly trig_realize_monomial(int d, const MIdx& alpha);
TrigPoly trig_realize(const MultiPoly& P);

// G(xi) = 4 sum_i q_ii sin^2(xi_i/2) + 2 sum_{i<j} q_ij sin(xi_i) sin(xi_j);
// equivalently the canonical lift of W(xi) = xi^T Q2 xi.  The Maclaurin jet
// of the result through degree 3 is exactly W.
TrigPoly build_G(const RatMat& Q2);

// coeff * prod_i sin(xi_i/2)^half[i] * prod_i sin(xi_i)^full[i]
struct SinMonomial {
  Rat coeff;
  MIdx half;
  MIdx full;
};

// A lift of W that agrees with W through degree r-1 (r even, >= 4).  With no
// explicit corrections the unwanted jet terms of build_G are cancelled
// degree by degree using canonical lifts of the excess monomials; explicit
// corrections are taken verbatim and verified.  Throws
// UnderdeterminedCorrection if the target jet cannot be reached.
TrigPoly build_G_higher(const RatMat& Q2, int r,
                        const std::vector<SinMonomial>& corrections = {});

// A refinement mask together with the data needed to analyze it.
struct MaskSpec {
  Eigen::MatrixXi A;   // dilation matrix
  long long q = 0;     // |det A|
  int d = 0;
  int order = 1;       // power applied on top of the base construction
  TrigPoly m0;         // scale-0 mask
  // Scale-dependent masks for nonstationary constructions; null when the
  // same mask repeats at every scale.
  std::function<TrigPoly(long long)> family;
  // Stable floating evaluator for scale-dependent masks: returns the Taylor
  // jet of mask_at(j) about xi through total degree L, computed from the
  // quotient construction without expanding the coset product.  Expanded
  // coefficients can grow exponentially in j while the mask's values stay
  // moderate, so mask_at(j).jet_at_numeric loses all precision at large
  // scales; the factored form anchors each factor's constant term to an
  // exact coset value and does not.  Null for stationary masks.
  std::function<std::map<MIdx, std::complex<double>>(
      long long, const std::vector<double>&, int)>
      family_jet_numeric;
  MultiPoly symbol;         // differential symbol annihilating the target space
  int analysis_degree = 3;  // top polynomial degree the mask is built to reproduce

  bool nonstationary() const { return static_cast<bool>(family); }
  TrigPoly mask_at(long long j) const { return family ? family(j) : m0; }
};

// m0(xi) = prod_{s in S(A^T), s != 0} G(xi + 2 pi s) / G(2 pi s).
// The result is integer-periodic with m0(0) = 1 (both asserted), and has
// real coefficients whenever G does.  Throws GVanishesAtCoset when some
// denominator factor is zero.
MaskSpec build_mask(const TrigPoly& G, const DilationMatrix& A);

// Raises the mask (and, for families, every scale's mask) to the m-th power.
MaskSpec mask_power(const MaskSpec& spec, int m);

// Exact Taylor polynomial of T at the origin through total degree L.
MultiPoly maclaurin_jet(const TrigPoly& T, int L);

enum class NonstatKind {
  sum_of_powers,  // sum_t C_t W^{k_t}
  X_plus_Wm,      // X + W^m with X homogeneous
};

struct NonstatParams {
  // sum_of_powers: strictly increasing exponents with positive weights.
  std::vector<int> powers;
  std::vector<Rat> weights;
  // X_plus_Wm:
  MultiPoly X;
  int m = 1;
};

// Builds the scale-dependent mask family whose scale-j symbol, transported
// back through (A^T)^j, is proportional to the requested target.  Performs
// the solvability test for X_plus_Wm (throws ConditionFailed when the target
// admits no nontrivial reproduced space) and requires the normalized powers
// of A^T to cycle with period 1 or 2 (throws UnsupportedGroupOrder).
MaskSpec nonstationary_family(NonstatKind kind, const NonstatParams& params,
                              const DilationMatrix& A);

struct NonnegReport {
  double min_value = 0.0;
  std::vector<double> argmin;
  bool nonnegative = false;         // min >= -1e-12 over the grid
  bool zeros_only_at_lattice = false;  // small values only near 2 pi Z^d
  int grid_density = 0;
};

// Samples G over [-pi, pi]^d on a uniform grid and reports where it is
// small or negative.  Diagnostic only; never throws.
NonnegReport nonneg_check(const TrigPoly& G, int grid_density);

}  // namespace ellipsf
