#pragma once

// Error taxonomy for the whole library.  Every failure that a caller can
// meaningfully react to gets its own type; the CLI maps these to exit codes.

#include <stdexcept>
#include <string>

namespace ellipsf {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input matrix is not isotropic (eigenvalue moduli differ, or the matrix is
// not diagonalizable).
struct NotIsotropic : Error {
  using Error::Error;
};

// The symmetric solution space of A X A^T = c X contains no positive
// definite ray.
struct NoPositiveDefiniteSolution : Error {
  using Error::Error;
};

// The symmetric solution space has dimension > 1 and no canonical pick
// applies.
struct AmbiguousSolution : Error {
  using Error::Error;
};

// A frequency shift would need roots of unity outside Q(i).
struct UnsupportedShiftDenominator : Error {
  using Error::Error;
};

// G vanishes at a nonzero coset representative, so the mask quotient is
// undefined.
struct GVanishesAtCoset : Error {
  using Error::Error;
};

// The higher-order correction solver could not cancel a required Taylor
// term, or explicitly supplied corrections fail to do so.
struct UnderdeterminedCorrection : Error {
  using Error::Error;
};

// Requested nonstationary construction needs a normalized-power cyclic group
// of unsupported order.
struct UnsupportedGroupOrder : Error {
  using Error::Error;
};

// The degree-k symbol X admits no polynomial separating ker X(-iD) from
// ker W(-iD)^m, so the nonstationary construction cannot produce a
// non-scale-invariant space.
struct ConditionFailed : Error {
  using Error::Error;
};

// A lattice point could not be factored as A^j (s + k) within the iteration
// bound.
struct FactorizationGap : Error {
  using Error::Error;
};

// Kernel dimensions kept growing up to the analysis bound; no stable order
// exists below it.
struct OrderExceedsBound : Error {
  using Error::Error;
};

// The window-doubling kernel search still found new conditions at the radius
// bound; the message carries the sequence of kernel dimensions seen.
struct NoStabilization : Error {
  using Error::Error;
};

// The two characterizations of the analysis order disagree: the per-degree
// top slices of the kernels vanish at some degree but reappear later, so
// "first degree with empty top slice" and "last degree with new kernel
// content" name different numbers.
struct DefinitionMismatch : Error {
  using Error::Error;
};

// Cascade iteration diverged (level differences grew three times in a row).
struct Divergence : Error {
  using Error::Error;
};

// Malformed user input (CLI arguments, parse failures).
struct BadArguments : Error {
  using Error::Error;
};

}  // namespace ellipsf
