#include "son/errors.hpp"
#include "son/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace son {

namespace {

// Z·vᵀ for a sparse v.
Vector z_times(const Matrix& z, const SparseVec& v) { return times_sparse(z, v); }

}  // namespace

SparseEigenSystem compute_sparse_eigensystem(const Vector& dvals, const Matrix& f, const Matrix& z,
                                             const std::vector<SparseVec>& g, const Matrix& k,
                                             double abs_floor) {
  const Index m = f.rows();
  if (dvals.size() != m || z.rows() != m || k.rows() != m || static_cast<Index>(g.size()) > m)
    throw InvalidInput("compute_sparse_eigensystem: shape mismatch");
  // ZGᵀ and GGᵀ from the sparse rows; absent rows of G are zero.
  Matrix zgt = Matrix::Zero(m, m);
  Matrix ggt = Matrix::Zero(m, m);
  for (std::size_t i = 0; i < g.size(); ++i) {
    zgt.col(static_cast<Index>(i)) = z_times(z, g[i]);
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = dot(g[i], g[j]);
      ggt(static_cast<Index>(i), static_cast<Index>(j)) = v;
      ggt(static_cast<Index>(j), static_cast<Index>(i)) = v;
    }
  }
  const Matrix mm = zgt.transpose() * f.transpose();  // M = GZᵀFᵀ
  Matrix p(m, 2 * m);
  p << -mm * f, Matrix::Identity(m, m);
  Matrix kk(2 * m, 2 * m);
  kk << k, zgt, zgt.transpose(), ggt;
  const Decomposition lq = decompose(p, SymMatrix(kk), {1e-10, abs_floor});
  const Index r = lq.rank();

  Matrix ml(m, m + r);
  ml << mm, lq.l;
  Matrix c = ml.transpose() * ml;
  for (Index i = 0; i < m; ++i) c(i, i) += dvals[i] * dvals[i];
  const EigPairs e = top_k_eig(SymMatrix(c), m);
  const Matrix u1 = e.vectors.leftCols(m);
  const Matrix u2 = e.vectors.rightCols(r);
  SparseEigenSystem out;
  out.n1 = u1 * f + u2 * lq.q.leftCols(m);
  out.n2 = u2 * lq.q.rightCols(m);
  out.sigma = e.values;
  return out;
}

SparseFdNewton::SparseFdNewton(Index d, Index m, const SonConfig& cfg, Options opt)
    : Learner(d, cfg.loss), cfg_(cfg), opt_(opt), sigma_(curvature_sigma(cfg.loss)), m_(m) {
  if (!(cfg.alpha > 0.0)) throw InvalidConfig("sparse FD-SON: alpha must be > 0");
  if (m < 0 || m > d) throw InvalidConfig("sparse FD-SON: need 0 <= m <= d");
  dvals_ = Vector::Zero(m);
  f_ = Matrix::Identity(m, m);
  z_ = Matrix::Identity(m, d);
  k_ = Matrix::Identity(m, m);
  h_ = Matrix::Identity(2 * m, 2 * m) / cfg.alpha;
  delta_ = Matrix::Zero(m, m);
  ubar_ = Vector::Zero(d);
  b_ = Vector::Zero(m);
  g_.reserve(static_cast<std::size_t>(m));
}

// S·v = [D∘(F·Zv); G·v] given zv = Z·v.
Vector SparseFdNewton::sketch_times(const SparseVec& v, const Vector& zv) const {
  Vector out = Vector::Zero(2 * m_);
  out.head(m_) = dvals_.cwiseProduct(f_ * zv);
  for (std::size_t i = 0; i < g_.size(); ++i) out[m_ + static_cast<Index>(i)] = dot(g_[i], v);
  return out;
}

double SparseFdNewton::do_predict(const SparseVec& x) {
  const double c = cfg_.loss.c;
  const Vector zx = z_times(z_, x);
  double z = x.dot(ubar_) + b_.dot(zx);
  degenerate_ = false;
  const double tau = tau_c(z, c);
  if (tau == 0.0) return z;
  const double xx = x.squared_norm();
  const Vector xhat = sketch_times(x, zx);
  const Vector hx = h_ * xhat;
  const double den = xx - xhat.dot(hx);
  if (den <= degenerate_denominator(xx)) {
    degenerate_ = true;
    return clamp_prediction(z, c);
  }
  const double gamma = tau / den;
  // w̄ = ū + γ(GᵀH₂x̂ − x), b += γFᵀD·H₁x̂
  x.add_to(ubar_, -gamma);
  for (std::size_t i = 0; i < g_.size(); ++i) g_[i].add_to(ubar_, gamma * hx[m_ + static_cast<Index>(i)]);
  b_.noalias() += gamma * (f_.transpose() * dvals_.cwiseProduct(hx.head(m_)));
  return x.dot(ubar_) + b_.dot(zx);
}

void SparseFdNewton::sketch_update(const SparseVec& ghat) {
  g_.push_back(ghat);
  if (tau_ < m_) {
    const Index row = m_ + tau_ - 1;
    Vector q = sketch_times(ghat, z_times(z_, ghat));
    q[row] -= 0.5 * ghat.squared_norm();
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
    delta_.setZero();
    ++tau_;
    return;
  }
  epoch_step();
}

void SparseFdNewton::epoch_step() {
  double scale = dvals_.size() > 0 ? dvals_.maxCoeff() : 0.0;
  for (const SparseVec& gi : g_) scale = std::max(scale, std::sqrt(gi.squared_norm()));
  const SparseEigenSystem es = compute_sparse_eigensystem(dvals_, f_, z_, g_, k_, 1e-7 * scale);
  const double rho = std::max(es.sigma[m_ - 1], 0.0);
  shrink_ += rho;
  const double live_tol = 1e-10 * std::max(es.sigma[0], 0.0);

  std::vector<Index> live;
  Vector dnew = Vector::Zero(m_);
  for (Index i = 0; i < m_; ++i) {
    const double kept = es.sigma[i] - rho;
    if (kept > live_tol) {
      live.push_back(i);
      dnew[i] = std::sqrt(kept);
    }
  }
  const Index nl = static_cast<Index>(live.size());
  Matrix n1l(nl, m_), n2l(nl, m_);
  for (Index a = 0; a < nl; ++a) {
    n1l.row(a) = es.n1.row(live[a]);
    n2l.row(a) = es.n2.row(live[a]);
  }

  // Live rows need N₁(Z + ΔG) = N₁Z + N₂G. Among the solutions of N₁Δ = N₂
  // take Δ = K N₁ᵀ W⁻¹ N₂ with W = (N₁Z)(N₁Z)ᵀ.
  const Matrix w = n1l * k_ * n1l.transpose();
  bool rebase = false;
  Matrix delta = Matrix::Zero(m_, m_);
  if (nl > 0) {
    const EigPairs we = top_k_eig(SymMatrix(w), nl);
    rebase = we.values[nl - 1] < opt_.rebase_floor;
    if (!rebase) delta = k_ * n1l.transpose() * Eigen::LDLT<Matrix>(w).solve(n2l);
  }

  g_prev_.swap(g_);
  g_.clear();
  Matrix k_next;
  if (!rebase) {
    // K ← K + ΔGZᵀ + ZGᵀΔᵀ + ΔGGᵀΔᵀ
    Matrix zgt = Matrix::Zero(m_, m_);
    Matrix ggt = Matrix::Zero(m_, m_);
    for (std::size_t i = 0; i < g_prev_.size(); ++i) {
      zgt.col(static_cast<Index>(i)) = z_times(z_, g_prev_[i]);
      for (std::size_t j = 0; j < g_prev_.size(); ++j)
        ggt(static_cast<Index>(i), static_cast<Index>(j)) = dot(g_prev_[i], g_prev_[j]);
    }
    const Matrix dzg = delta * zgt.transpose();
    k_next = k_ + dzg + dzg.transpose() + delta * ggt * delta.transpose();
    k_next = 0.5 * (k_next + k_next.transpose()).eval();
    const Vector kev = top_k_eig(SymMatrix(k_next), m_).values;
    rebase = !(kev[m_ - 1] > kev[0] / opt_.gram_cond_limit);
  }
  if (rebase) {
    // Materialize the eigenvectors as the new Z and move b into w̄.
    Matrix vnew = es.n1 * z_;
    for (std::size_t i = 0; i < g_prev_.size(); ++i) {
      const Vector col = es.n2.col(static_cast<Index>(i));
      const SparseVec& gi = g_prev_[i];
      for (std::size_t kk = 0; kk < gi.nnz(); ++kk) vnew.col(gi.index(kk)) += gi.value(kk) * col;
    }
    ubar_.noalias() += z_.transpose() * b_;
    b_.setZero();
    z_ = std::move(vnew);
    k_ = z_ * z_.transpose();
    f_ = Matrix::Zero(m_, m_);
    for (Index i : live) f_(i, i) = 1.0;
    delta_.setZero();
    ++rebases_;
  } else {
    // Z ← Z + ΔG
    k_ = std::move(k_next);
    for (std::size_t i = 0; i < g_prev_.size(); ++i) {
      const Vector col = delta.col(static_cast<Index>(i));
      const SparseVec& gi = g_prev_[i];
      for (std::size_t kk = 0; kk < gi.nnz(); ++kk) z_.col(gi.index(kk)) += gi.value(kk) * col;
    }
    f_ = Matrix::Zero(m_, m_);
    for (Index a = 0; a < nl; ++a) f_.row(live[a]) = n1l.row(a);
    delta_ = delta;
  }
  dvals_ = dnew;
  h_ = Matrix::Identity(2 * m_, 2 * m_) / cfg_.alpha;
  for (Index i = 0; i < m_; ++i) h_(i, i) = 1.0 / (cfg_.alpha + dvals_[i] * dvals_[i]);
  tau_ = 1;
}

void SparseFdNewton::do_update(const SparseVec& x, double, const LossValue& lv) {
  const double eta = eta_schedule(rounds(), cfg_.eta_mode, cfg_.loss.c, cfg_.loss.lipschitz(), dim());
  const double inv_alpha = 1.0 / cfg_.alpha;
  const SparseVec g = x.scaled(lv.dloss);
  if (m_ == 0) {
    g.add_to(ubar_, -inv_alpha);
    return;
  }
  const bool boundary = tau_ == m_;
  sketch_update(g.scaled(std::sqrt(sigma_ + eta)));

  // ū = w̄ + (1/α)(GᵀH₂Sg − g) − G_oldᵀΔᵀb, b += (1/α)FᵀD·H₁Sg
  if (boundary) {
    const Vector db = delta_.transpose() * b_;
    for (std::size_t i = 0; i < g_prev_.size(); ++i) g_prev_[i].add_to(ubar_, -db[static_cast<Index>(i)]);
  }
  const Vector sg = sketch_times(g, z_times(z_, g));
  const Vector hsg = h_ * sg;
  g.add_to(ubar_, -inv_alpha);
  for (std::size_t i = 0; i < g_.size(); ++i) g_[i].add_to(ubar_, inv_alpha * hsg[m_ + static_cast<Index>(i)]);
  b_.noalias() += inv_alpha * (f_.transpose() * dvals_.cwiseProduct(hsg.head(m_)));
}

Vector SparseFdNewton::dense_weights() const {
  Vector w = ubar_;
  if (m_ > 0) w.noalias() += z_.transpose() * b_;
  return w;
}

Matrix SparseFdNewton::dense_sketch() const {
  Matrix s = Matrix::Zero(2 * m_, dim());
  if (m_ == 0) return s;
  s.topRows(m_) = dvals_.asDiagonal() * (f_ * z_);
  for (std::size_t i = 0; i < g_.size(); ++i) s.row(m_ + static_cast<Index>(i)) = g_[i].to_dense().transpose();
  return s;
}

}  // namespace son
