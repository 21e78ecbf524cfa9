#pragma once

// Isotropy test and decomposition of integer dilation matrices, the attached
// positive definite quadratic form, coset representatives of the quotient
// lattice, and the shell factorization of nonzero lattice points.

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "ellipsf/polyops.hpp"
#include "ellipsf/rational.hpp"

namespace ellipsf {

struct DilationMatrix {
  Eigen::MatrixXi A;
  int d = 0;
  long long q = 0;  // |det A|

  // Validates: square, nonsingular, every eigenvalue of modulus > 1
  // (numeric check, tolerance 1e-9).
  static DilationMatrix create(Eigen::MatrixXi A);

  RatMat rat() const;            // exact copy
  RatMat rat_transpose() const;  // exact A^T
  Eigen::MatrixXd real() const { return A.cast<double>(); }
};

// Exact characteristic polynomial det(x I - A), coefficients by ascending
// degree (Faddeev-LeVerrier).
std::vector<Rat> char_poly(const RatMat& A);

struct IsotropyReport {
  bool isotropic = false;
  bool diagonalizable = false;
  bool equal_moduli = false;
  std::vector<double> moduli;
  double modulus_spread = 0.0;  // relative
};

IsotropyReport is_isotropic(const DilationMatrix& A);

struct IsotropicDecomposition {
  int d = 0;
  long long q = 0;
  RatMat Q2;               // normalized symmetric PD solution of A X A^T = q^(2/d) X
  Eigen::MatrixXd Qsqrt;   // numeric symmetric square root of Q2
  Eigen::MatrixXd U;       // numeric orthogonal factor
  double eigen_modulus = 0.0;  // q^(1/d)
  bool ambiguous_warning = false;
  std::string note;
};

// Errors: NotIsotropic, NoPositiveDefiniteSolution, AmbiguousSolution.
IsotropicDecomposition decompose(const DilationMatrix& A);

// W(xi) = xi^T Q2 xi as an exact quadratic polynomial.
MultiPoly quadratic_form(const IsotropicDecomposition& dec);
MultiPoly quadratic_form(const RatMat& Q2);

// Exact d-th root of a nonnegative integer, when it exists.
std::optional<long long> integer_root(long long v, int d);

struct InvarianceReport {
  bool matrix_identity_exact = false;   // A Q2 A^T = q^(2/d) Q2
  bool form_identity_exact = false;     // W(A^-T xi) q^(2/d) = W(xi)
  double orthogonality_error = 0.0;     // ||U^T U - I||_inf
  double reconstruction_error = 0.0;    // ||A^-T - q^(-1/d) Q^-1 U Q||_inf
};

InvarianceReport invariance_check(const DilationMatrix& A,
                                  const IsotropicDecomposition& dec);

struct CosetReps {
  std::vector<std::vector<Rat>> reps;  // sorted; reps[0] = 0
};

// S(A) = A^-1 (Z^d ∩ A [0,1)^d); |reps| = |det A|.
CosetReps coset_reps(const Eigen::MatrixXi& A);

struct LatticeFactor {
  int j = 0;                 // shell index >= 1
  std::vector<Rat> s;        // nonzero coset representative
  std::vector<long long> k;  // integer part: n = A^j (k + s)
};

// Factors n != 0 as A^j (k + s); throws FactorizationGap beyond jmax.
LatticeFactor factor_lattice_point(const Eigen::MatrixXi& A,
                                   const std::vector<long long>& n,
                                   int jmax = 64);

struct PartitionReport {
  bool ok = false;
  int points_checked = 0;
  int max_shell = 0;
  std::string detail;
};

// Checks that every 0 < ||n||_inf <= N is hit by exactly one (j, s) pair.
PartitionReport partition_check(const Eigen::MatrixXi& A, int N);

}  // namespace ellipsf
