#pragma once

#include "son/core_math.hpp"
#include "son/sketch_oja.hpp"
#include "son/son.hpp"

#include <cstdint>
#include <vector>

namespace son {

/// Oja-SON whose per-round cost depends on nnz(x) rather than d.
/// Eigenvectors are kept as V = FZ with K = ZZᵀ, and the weights as
/// w = w̄ + Zᵀb, so only the columns of Z and w̄ on supp(x) change.
struct SparseOjaOptions {
  GammaSchedule gamma;          // empty means Γ_t = (1/t)I
  long gram_refresh_every = 0;  // recompute K = ZZᵀ densely every N rounds; 0 = never
  /// Above this condition number of K = ZZᵀ after an update, V = FZ is
  /// materialized and orthonormalized densely (Z ← V, F ← I).
  double gram_cond_limit = 1e6;
};

class SparseOjaNewton final : public Learner {
 public:
  using Options = SparseOjaOptions;

  /// Throws InvalidConfig unless alpha > 0 and 0 <= m <= d.
  SparseOjaNewton(Index d, Index m, const SonConfig& cfg, Options opt = {});

  /// Dense-equivalent weights w̄ + Zᵀb (O(md), for inspection only).
  Vector dense_weights() const;
  /// FZ, the current eigenvector estimates (O(m²d), for inspection only).
  Matrix eigenvectors() const;

  const Vector& lambda() const { return lambda_; }
  const Matrix& f() const { return f_; }
  const Matrix& z() const { return z_; }
  const Matrix& gram() const { return k_; }
  const Vector& last_delta() const { return delta_; }
  /// Reads and writes of d-indexed storage (w̄ and columns of Z), summed
  /// over all rounds.
  std::uint64_t coordinate_touches() const { return touches_; }
  long rebases() const { return rebases_; }

 protected:
  double do_predict(const SparseVec& x) override;
  void do_update(const SparseVec& x, double y, const LossValue& lv) override;

 private:
  /// Returns true if Z was rebuilt; b is then zero and folded into ū.
  bool sketch_update(const SparseVec& ghat, const Vector& zghat);

  SonConfig cfg_;
  Options opt_;
  double sigma_;
  Index m_;
  long t_ = 0;  // sketch updates so far
  Vector lambda_;
  Matrix f_;
  Matrix z_;  // m x d; column j is the j-th coordinate of every row
  Matrix k_;
  Vector h_;
  Vector ubar_;  // holds ū between rounds and w̄ within a round
  Vector b_;
  Vector delta_;
  Vector zx_;
  bool degenerate_ = false;
  std::uint64_t touches_ = 0;
  long rebases_ = 0;
};

struct SparseEigenSystem {
  Matrix n1;     // m x m, coefficients on Z
  Matrix n2;     // m x m, coefficients on G
  Vector sigma;  // m, descending
};

/// Top-m eigenpairs of SᵀS for S = [diag(D)·F·Z; G] as rows of N₁Z + N₂G,
/// using only K = ZZᵀ and products of Z with the sparse rows of G.
/// g may hold fewer than m rows; missing rows are zero.
SparseEigenSystem compute_sparse_eigensystem(const Vector& dvals, const Matrix& f, const Matrix& z,
                                             const std::vector<SparseVec>& g, const Matrix& k,
                                             double abs_floor = 0.0);

struct SparseFdOptions {
  /// Below this smallest eigenvalue of (N₁Z)(N₁Z)ᵀ the factorization is
  /// rebuilt densely instead of solving for Δ.
  double rebase_floor = 1e-4;
  /// Above this condition number of K = ZZᵀ after an update, the same
  /// rebuild runs instead.
  double gram_cond_limit = 1e8;
};

/// FD-SON with the epoch sketch [DFZ; G] and the split w = w̄ + Zᵀb.
class SparseFdNewton final : public Learner {
 public:
  using Options = SparseFdOptions;

  /// Throws InvalidConfig unless alpha > 0 and 0 <= m <= d.
  SparseFdNewton(Index d, Index m, const SonConfig& cfg, Options opt = {});

  Vector dense_weights() const;
  /// [diag(D)·F·Z; G] materialized (O(md), for inspection only).
  Matrix dense_sketch() const;
  const Matrix& inverse_core() const { return h_; }
  const Vector& d_values() const { return dvals_; }
  const Matrix& f() const { return f_; }
  const Matrix& z() const { return z_; }
  const Matrix& gram() const { return k_; }
  const Matrix& last_delta() const { return delta_; }
  Index tau() const { return tau_; }
  long rebases() const { return rebases_; }
  double cumulative_shrink() const { return shrink_; }

 protected:
  double do_predict(const SparseVec& x) override;
  void do_update(const SparseVec& x, double y, const LossValue& lv) override;

 private:
  Vector sketch_times(const SparseVec& v, const Vector& zv) const;
  void sketch_update(const SparseVec& ghat);
  void epoch_step();

  SonConfig cfg_;
  Options opt_;
  double sigma_;
  Index m_;
  Index tau_ = 1;
  Vector dvals_;
  Matrix f_;
  Matrix z_;
  std::vector<SparseVec> g_;
  std::vector<SparseVec> g_prev_;  // buffer consumed by the last epoch step
  Matrix h_;
  Matrix k_;
  Matrix delta_;
  Vector ubar_;
  Vector b_;
  bool degenerate_ = false;
  long rebases_ = 0;
  double shrink_ = 0.0;
};

}  // namespace son
