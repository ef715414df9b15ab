#pragma once

#include "son/core_math.hpp"
#include "son/sparse_vec.hpp"

namespace son {

/// sgn(y)·max(|y| − C, 0)
double tau_c(double y, double c);

struct ProjectionResult {
  Vector w;
  double gamma = 0.0;
  bool clipped = false;
  // The correction direction had numerically zero A-norm; w == u and the
  // caller is expected to clamp the prediction.
  bool degenerate = false;
};

/// How to pick among the minimizers when x lies outside range(A) and every
/// point on the line through u along (I − A⁺A)x is at A-distance zero.
enum class NullSpaceRule {
  kClip,            // move u·x to the nearest of ±C
  kZeroPrediction,  // move u·x to 0; keeps the α = 0 learner linear-invariant
};

/// argmin_{|wᵀx| <= C} ‖w − u‖_A for PSD A, through its pseudoinverse.
/// Throws InvalidInput for x = 0 or mismatched dimensions.
ProjectionResult project_full(const Vector& u, const Vector& x, const SymMatrix& a, double c,
                              NullSpaceRule rule = NullSpaceRule::kClip);

/// Same projection with A⁺ and A·A⁺ already available.
ProjectionResult project_pinv(const Vector& u, const Vector& x, const PseudoInverse& pa, double c,
                              NullSpaceRule rule = NullSpaceRule::kClip);

/// Same projection for positive-definite A given A⁻¹ directly.
ProjectionResult project_inverse(const Vector& u, const Vector& x, const Matrix& a_inv, double c);

/// Projection in the norm of A = αI + SᵀS with H = (αI + SSᵀ)⁻¹. α cancels
/// from the closed form. A denominator xᵀx − x̂ᵀHx̂ at or below 1e-12·xᵀx
/// returns w = u flagged degenerate.
ProjectionResult project_sketched(const Vector& u, const SparseVec& x, const Matrix& s, const Matrix& h, double c);

/// Threshold below which a sketched projection denominator counts as zero.
inline double degenerate_denominator(double xx) { return 1e-12 * xx; }

}  // namespace son
