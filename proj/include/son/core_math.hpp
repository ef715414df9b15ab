#pragma once

#include "son/sparse_vec.hpp"

#include <cmath>
#include <vector>

namespace son {

/// Dense symmetric matrix. Every write mirrors across the diagonal, so
/// B(i,j) == B(j,i) holds exactly.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Index n) : a_(Matrix::Zero(n, n)) {}
  /// Stores (M + Mᵀ)/2. Throws InvalidInput if M is not square.
  explicit SymMatrix(const Matrix& m);
  static SymMatrix identity(Index n);

  Index n() const { return a_.rows(); }
  double operator()(Index i, Index j) const { return a_(i, j); }
  void set(Index i, Index j, double v) {
    a_(i, j) = v;
    a_(j, i) = v;
  }
  void add(Index i, Index j, double v) {
    a_(i, j) += v;
    if (i != j) a_(j, i) += v;
  }
  const Matrix& matrix() const { return a_; }

 private:
  Matrix a_;
};

/// values descending; vectors.row(i) is the unit eigenvector for values[i].
struct EigPairs {
  Vector values;
  Matrix vectors;
};

/// Top-k eigenpairs of a small symmetric matrix by cyclic Jacobi sweeps.
/// Ties keep the solver's column order; each vector's first entry with
/// |v| > 1e-12 is nonnegative.
EigPairs top_k_eig(const SymMatrix& b, Index k);

/// P·R = L·Q·R with (QR)(QR)ᵀ = I_r, given only K = RRᵀ.
struct Decomposition {
  Matrix l;  // m x r
  Matrix q;  // r x n
  Index rank() const { return q.rows(); }
};

struct DecomposeOptions {
  /// A row whose K-residual c satisfies c <= max(rel_tol * |p|_K, abs_floor)
  /// adds no direction.
  double rel_tol = 1e-10;
  double abs_floor = 0.0;
};

/// Gram-Schmidt of the rows of P in the inner product <a,b> = aᵀKb,
/// with one re-orthogonalization pass. Throws InvalidInput if K shows a
/// negative quadratic form on the data it is applied to.
Decomposition decompose(const Matrix& p, const SymMatrix& k, const DecomposeOptions& opt = {});

/// Euclidean special case (K = I) without materializing K: rows of R are
/// factored as R = L·Q with orthonormal rows of Q.
Decomposition decompose_euclidean(const Matrix& r, const DecomposeOptions& opt = {});

struct PseudoInverse {
  Matrix pinv;
  Matrix range;  // orthogonal projector onto range(A), equal to A·A⁺
};

/// Moore-Penrose pseudoinverse of a PSD matrix; eigenvalues at or below
/// cutoff_rel * λ_max are treated as zero.
PseudoInverse pseudo_inverse(const SymMatrix& a, double cutoff_rel = 1e-10);

}  // namespace son
