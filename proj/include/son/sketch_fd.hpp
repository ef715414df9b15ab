#pragma once

#include "son/core_math.hpp"
#include "son/sketch.hpp"

#include <vector>

namespace son {

struct FdDiagnostics {
  double cumulative_shrink = 0.0;
  std::vector<double> rho;

  void record(double r) {
    rho.push_back(r);
    cumulative_shrink += r;
  }
};

/// Frequent Directions, one eigendecomposition per inserted row.
/// The last row of S is zero between updates and the rows are orthogonal,
/// so H is diagonal.
class FdSketch final : public Sketch {
 public:
  /// Throws InvalidConfig unless alpha > 0 and m >= 2.
  FdSketch(double alpha, Index m, Index d);

  void update(const SparseVec& ghat) override;
  const Matrix& sketch() const override { return s_; }
  const Matrix& inverse_core() const override { return h_; }
  Index dim() const override { return s_.cols(); }
  double alpha() const override { return alpha_; }
  Index m() const { return s_.rows(); }
  const FdDiagnostics& diagnostics() const { return diag_; }

 private:
  double alpha_;
  Matrix s_;
  Matrix h_;
  FdDiagnostics diag_;
};

struct EigenSystem {
  Matrix v;      // m x d, orthonormal rows
  Vector sigma;  // m, descending
};

/// Top-m eigenpairs of SᵀS for S = [diag(D)·V; G] through an (m+r)×(m+r)
/// reduced problem, r = rank of G − GVᵀV. Rows of V must be orthonormal.
EigenSystem compute_eigensystem(const Vector& dvals, const Matrix& v, const Matrix& g);

/// Frequent Directions with a doubled sketch [DV; G]: rows are buffered in G
/// for m rounds with rank-two Woodbury updates of H, and the shrink step runs
/// once per m rounds.
class EpochFdSketch final : public Sketch {
 public:
  /// Throws InvalidConfig unless alpha > 0 and m >= 1.
  EpochFdSketch(double alpha, Index m, Index d);

  void update(const SparseVec& ghat) override;
  /// 2m x d; top half is diag(D)·V, bottom half is G.
  const Matrix& sketch() const override { return s_; }
  const Matrix& inverse_core() const override { return h_; }
  Index dim() const override { return s_.cols(); }
  double alpha() const override { return alpha_; }
  Index m() const { return m_; }
  /// 1-based slot the next row goes into.
  Index tau() const { return tau_; }
  const Vector& d_values() const { return dvals_; }
  const Matrix& basis() const { return v_; }
  const FdDiagnostics& diagnostics() const { return diag_; }

 private:
  double alpha_;
  Index m_;
  Index tau_ = 1;
  Vector dvals_;
  Matrix v_;
  Matrix s_;
  Matrix h_;
  FdDiagnostics diag_;
};

}  // namespace son
