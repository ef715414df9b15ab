#include "son/sketch_fd.hpp"

#include "son/errors.hpp"

#include <algorithm>
#include <cmath>

namespace son {

FdSketch::FdSketch(double alpha, Index m, Index d) : alpha_(alpha) {
  if (!(alpha > 0.0)) throw InvalidConfig("FD sketch: alpha must be > 0");
  if (m < 2) throw InvalidConfig("FD sketch: m must be >= 2");
  if (d < 1) throw InvalidConfig("FD sketch: d must be >= 1");
  s_ = Matrix::Zero(m, d);
  h_ = Matrix::Identity(m, m) / alpha;
}

void FdSketch::update(const SparseVec& ghat) {
  if (ghat.dim() != dim()) throw InvalidInput("FD sketch: dimension mismatch");
  const Index m = s_.rows();
  s_.row(m - 1).setZero();
  for (std::size_t k = 0; k < ghat.nnz(); ++k) s_(m - 1, ghat.index(k)) = ghat.value(k);

  // Eigenvectors of SᵀS are uᵢᵀS/√σᵢ for eigenpairs (σᵢ, uᵢ) of SSᵀ.
  const EigPairs e = top_k_eig(SymMatrix(Matrix(s_ * s_.transpose())), m);
  const double rho = std::max(e.values[m - 1], 0.0);
  const double top = std::max(e.values[0], 0.0);
  Matrix next = Matrix::Zero(m, s_.cols());
  h_.setZero();
  for (Index i = 0; i < m; ++i) {
    const double sigma = e.values[i];
    const double kept = sigma - rho;
    if (sigma > 0.0 && kept > 1e-14 * top) {
      next.row(i) = std::sqrt(kept / sigma) * (e.vectors.row(i) * s_);
      h_(i, i) = 1.0 / (alpha_ + kept);
    } else {
      h_(i, i) = 1.0 / alpha_;
    }
  }
  s_.swap(next);
  diag_.record(rho);
}

EigenSystem compute_eigensystem(const Vector& dvals, const Matrix& v, const Matrix& g) {
  const Index m = v.rows();
  if (dvals.size() != m || g.cols() != v.cols()) throw InvalidInput("compute_eigensystem: shape mismatch");
  Matrix mm = g * v.transpose();
  Matrix resid = g - mm * v;
  // Second pass keeps the residual orthogonal to V in floating point.
  const Matrix corr = resid * v.transpose();
  resid.noalias() -= corr * v;
  mm += corr;

  double scale = dvals.cwiseAbs().maxCoeff();
  for (Index i = 0; i < g.rows(); ++i) scale = std::max(scale, g.row(i).norm());
  const Decomposition lq = decompose_euclidean(resid, {1e-10, 1e-10 * scale});
  const Index r = lq.rank();

  Matrix ml(g.rows(), m + r);
  ml << mm, lq.l;
  Matrix c = ml.transpose() * ml;
  for (Index i = 0; i < m; ++i) c(i, i) += dvals[i] * dvals[i];
  const EigPairs e = top_k_eig(SymMatrix(c), m);

  Matrix basis(m + r, v.cols());
  basis << v, lq.q;
  return {e.vectors * basis, e.values};
}

EpochFdSketch::EpochFdSketch(double alpha, Index m, Index d) : alpha_(alpha), m_(m) {
  if (!(alpha > 0.0)) throw InvalidConfig("epoch FD sketch: alpha must be > 0");
  if (m < 1) throw InvalidConfig("epoch FD sketch: m must be >= 1");
  if (m > d) throw InvalidConfig("epoch FD sketch: m must not exceed d");
  dvals_ = Vector::Zero(m);
  v_ = Matrix::Identity(m, d);
  s_ = Matrix::Zero(2 * m, d);
  h_ = Matrix::Identity(2 * m, 2 * m) / alpha;
}

void EpochFdSketch::update(const SparseVec& ghat) {
  if (ghat.dim() != dim()) throw InvalidInput("epoch FD sketch: dimension mismatch");
  const Index row = m_ + tau_ - 1;
  for (std::size_t k = 0; k < ghat.nnz(); ++k) s_(row, ghat.index(k)) = ghat.value(k);

  if (tau_ < m_) {
    Vector q = times_sparse(s_, ghat);
    q[row] -= 0.5 * ghat.squared_norm();
    // H ← H − Hq eᵀH/(1 + eᵀHq), then H ← H − He qᵀH/(1 + qᵀHe).
    {
      const Vector hq = h_ * q;
      const Vector eh = h_.row(row).transpose();
      h_.noalias() -= (hq * eh.transpose()) / (1.0 + hq[row]);
    }
    {
      const Vector he = h_.col(row);
      const Vector qh = h_.transpose() * q;
      h_.noalias() -= (he * qh.transpose()) / (1.0 + qh[row]);
    }
    ++tau_;
    return;
  }

  const EigenSystem es = compute_eigensystem(dvals_, v_, s_.bottomRows(m_));
  const double rho = std::max(es.sigma[m_ - 1], 0.0);
  v_ = es.v;
  h_ = Matrix::Identity(2 * m_, 2 * m_) / alpha_;
  for (Index i = 0; i < m_; ++i) {
    dvals_[i] = std::sqrt(std::max(es.sigma[i] - rho, 0.0));
    h_(i, i) = 1.0 / (alpha_ + dvals_[i] * dvals_[i]);
    s_.row(i) = dvals_[i] * v_.row(i);
  }
  s_.bottomRows(m_).setZero();
  tau_ = 1;
  diag_.record(rho);
}

}  // namespace son
