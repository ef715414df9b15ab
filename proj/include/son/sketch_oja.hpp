#pragma once

#include "son/sketch.hpp"

#include <cstdint>
#include <functional>
#include <optional>

namespace son {

/// Diagonal of the Oja stepsize matrix Γ_t for round t >= 1.
using GammaSchedule = std::function<Vector(long t, Index m)>;

/// Γ_t = (1/t)·I
GammaSchedule inverse_t_schedule();

struct OjaOptions {
  GammaSchedule gamma;                 // empty means inverse_t_schedule()
  std::optional<std::uint64_t> seed;   // random orthonormal start instead of e₁..e_m
  bool block = false;                  // apply the eigenvector step once every m rounds
};

/// Orthonormalizes the rows of v in order with two-pass Gram-Schmidt. A row
/// that vanishes is replaced by the first standard basis vector orthogonal
/// to the rows before it. Returns the number of replaced rows.
int orthonormalize_rows(Matrix& v);

/// Oja's streaming eigenvector estimate used as a sketch: S = (tΛ)^{1/2}·V,
/// H = diag(1/(α + tΛᵢ)).
class OjaSketch final : public Sketch {
 public:
  /// Throws InvalidConfig unless alpha > 0 and 1 <= m <= d.
  OjaSketch(double alpha, Index m, Index d, OjaOptions opt = {});

  void update(const SparseVec& ghat) override;
  const Matrix& sketch() const override { return s_; }
  const Matrix& inverse_core() const override { return h_; }
  Index dim() const override { return v_.cols(); }
  double alpha() const override { return alpha_; }

  long t() const { return t_; }
  const Vector& lambda() const { return lambda_; }
  const Matrix& basis() const { return v_; }
  int repairs() const { return repairs_; }

 private:
  void refresh();

  double alpha_;
  OjaOptions opt_;
  long t_ = 0;
  Vector lambda_;
  Matrix v_;
  Matrix s_;
  Matrix h_;
  Matrix pending_;  // block mode: Σ Γ·(Vĝ)ĝᵀ since the last eigenvector step
  int repairs_ = 0;
};

}  // namespace son
