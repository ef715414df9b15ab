#include "son/errors.hpp"
#include "son/sparse.hpp"

#include <cmath>

namespace son {

SparseOjaNewton::SparseOjaNewton(Index d, Index m, const SonConfig& cfg, Options opt)
    : Learner(d, cfg.loss), cfg_(cfg), opt_(std::move(opt)), sigma_(curvature_sigma(cfg.loss)), m_(m) {
  if (!(cfg.alpha > 0.0)) throw InvalidConfig("sparse Oja-SON: alpha must be > 0");
  if (m < 0 || m > d) throw InvalidConfig("sparse Oja-SON: need 0 <= m <= d");
  if (!opt_.gamma) opt_.gamma = inverse_t_schedule();
  lambda_ = Vector::Zero(m);
  f_ = Matrix::Identity(m, m);
  z_ = Matrix::Identity(m, d);
  k_ = Matrix::Identity(m, m);
  h_ = Vector::Constant(m, 1.0 / cfg.alpha);
  ubar_ = Vector::Zero(d);
  b_ = Vector::Zero(m);
  delta_ = Vector::Zero(m);
}

double SparseOjaNewton::do_predict(const SparseVec& x) {
  const auto nnz = static_cast<std::uint64_t>(x.nnz());
  zx_ = times_sparse(z_, x);
  touches_ += nnz * static_cast<std::uint64_t>(m_);
  const double c = cfg_.loss.c;
  const double xx = x.squared_norm();
  degenerate_ = false;
  double z = x.dot(ubar_) + b_.dot(zx_);
  touches_ += nnz;
  const double tau = tau_c(z, c);
  if (tau != 0.0) {
    const Vector xhat = f_ * zx_;
    const double tt = static_cast<double>(t_);
    const Vector lhx = tt * lambda_.cwiseProduct(h_).cwiseProduct(xhat);
    const double den = xx - xhat.dot(lhx);
    if (den > degenerate_denominator(xx)) {
      const double gamma = tau / den;
      x.add_to(ubar_, -gamma);
      b_.noalias() += gamma * (f_.transpose() * lhx);
      touches_ += 2 * nnz;
      z = x.dot(ubar_) + b_.dot(zx_);
    } else {
      degenerate_ = true;
    }
  }
  return degenerate_ ? clamp_prediction(z, c) : z;
}

bool SparseOjaNewton::sketch_update(const SparseVec& ghat, const Vector& zghat) {
  ++t_;
  const Vector gamma = opt_.gamma(t_, m_);
  const Vector y = f_ * zghat;
  for (Index i = 0; i < m_; ++i) lambda_[i] = (1.0 - gamma[i]) * lambda_[i] + gamma[i] * y[i] * y[i];

  // δ = F⁻¹ΓF·Zĝ
  const bool uniform = m_ == 0 || (gamma.array() == gamma[0]).all();
  if (uniform) {
    delta_ = m_ == 0 ? Vector() : Vector(gamma[0] * zghat);
  } else {
    Eigen::PartialPivLU<Matrix> lu(f_);
    if (lu.rcond() < 1e-12) throw NumericalDegeneracy("sparse Oja: F is singular");
    delta_ = lu.solve(gamma.cwiseProduct(y));
  }

  const double tt = static_cast<double>(t_);
  for (Index i = 0; i < m_; ++i) h_[i] = 1.0 / (cfg_.alpha + tt * lambda_[i]);
  if (m_ == 0) return false;

  const double gg = ghat.squared_norm();
  Matrix k_next = k_ + delta_ * zghat.transpose() + zghat * delta_.transpose() + gg * delta_ * delta_.transpose();
  const Vector kev = top_k_eig(SymMatrix(k_next), m_).values;
  if (!(kev[m_ - 1] > kev[0] / opt_.gram_cond_limit)) {
    // w̄ = ū + Zᵀb with the pre-update Z; then V = orthonormalized F(Z + δĝᵀ).
    ubar_.noalias() += z_.transpose() * b_;
    b_.setZero();
    for (std::size_t j = 0; j < ghat.nnz(); ++j) z_.col(ghat.index(j)) += ghat.value(j) * delta_;
    Matrix v = f_ * z_;
    if (orthonormalize_rows(v) > 0) throw NumericalDegeneracy("sparse Oja: eigenvector estimates lost rank");
    z_ = std::move(v);
    f_ = Matrix::Identity(m_, m_);
    k_ = z_ * z_.transpose();
    touches_ += 2 * static_cast<std::uint64_t>(dim()) * static_cast<std::uint64_t>(m_);
    ++rebases_;
    return true;
  }
  k_ = std::move(k_next);
  for (std::size_t j = 0; j < ghat.nnz(); ++j) z_.col(ghat.index(j)) += ghat.value(j) * delta_;
  touches_ += static_cast<std::uint64_t>(ghat.nnz()) * static_cast<std::uint64_t>(m_);

  if (opt_.gram_refresh_every > 0 && t_ % opt_.gram_refresh_every == 0) k_ = z_ * z_.transpose();

  const Decomposition lq = decompose(f_, SymMatrix(k_));
  if (lq.rank() < m_) throw NumericalDegeneracy("sparse Oja: eigenvector estimates lost rank");
  f_ = lq.q;
  return false;
}

void SparseOjaNewton::do_update(const SparseVec& x, double, const LossValue& lv) {
  const double eta = eta_schedule(rounds(), cfg_.eta_mode, cfg_.loss.c, cfg_.loss.lipschitz(), dim());
  const double scale = std::sqrt(sigma_ + eta);
  const double dl = lv.dloss;
  const SparseVec ghat = x.scaled(scale * dl);
  const auto nnz = static_cast<std::uint64_t>(x.nnz());

  const bool rebased = sketch_update(ghat, (scale * dl) * zx_);

  // ū = w̄ − g/α − (δᵀb)ĝ
  const double db = m_ == 0 ? 0.0 : delta_.dot(b_);
  x.add_to(ubar_, -dl / cfg_.alpha - db * scale * dl);
  touches_ += nnz;
  if (m_ == 0) return;

  // b += (1/α)·t·FᵀΛHF·(Z_new g), with Z_new g = Z_old g + δ(ĝᵀg)
  const Vector zg = rebased ? Vector(times_sparse(z_, x) * dl)
                            : Vector(dl * zx_ + (scale * dl * dl * x.squared_norm()) * delta_);
  if (rebased) touches_ += nnz * static_cast<std::uint64_t>(m_);
  const double tt = static_cast<double>(t_);
  const Vector fzg = f_ * zg;
  b_.noalias() += (tt / cfg_.alpha) * (f_.transpose() * lambda_.cwiseProduct(h_).cwiseProduct(fzg));
}

Vector SparseOjaNewton::dense_weights() const {
  Vector w = ubar_;
  if (m_ > 0) w.noalias() += z_.transpose() * b_;
  return w;
}

Matrix SparseOjaNewton::eigenvectors() const { return f_ * z_; }

}  // namespace son
