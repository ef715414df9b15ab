#include "son/son.hpp"

#include "son/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace son {

double eta_schedule(long t, EtaMode mode, double c, double lipschitz, Index d) {
  if (t < 1) throw InvalidInput("eta_schedule: t must be >= 1");
  if (mode == EtaMode::kCurvature) return 0.0;
  return std::sqrt(static_cast<double>(d) / (c * c * lipschitz * lipschitz * static_cast<double>(t)));
}

double clamp_prediction(double z, double c) { return std::clamp(z, -c, c); }

Learner::Learner(Index d, LossSpec loss) : d_(d), loss_(loss) {
  if (d < 1) throw InvalidConfig("learner: dimension must be >= 1");
}

double Learner::predict(const SparseVec& x) {
  if (pending_) throw std::logic_error("predict called twice without update");
  if (x.dim() != d_) {
    throw InvalidInput("example dimension " + std::to_string(x.dim()) + " does not match learner dimension " +
                       std::to_string(d_));
  }
  x_ = x;
  prediction_ = do_predict(x_);
  pending_ = true;
  return prediction_;
}

RoundOutcome Learner::update(double y) {
  if (!pending_) throw std::logic_error("update called before predict");
  pending_ = false;
  ++t_;
  const LossValue lv = eval(loss_, prediction_, y);
  do_update(x_, y, lv);
  return {prediction_, lv.loss, lv.dloss};
}

SketchedNewton::SketchedNewton(Index d, const SonConfig& cfg, std::unique_ptr<Sketch> sketch)
    : Learner(d, cfg.loss), cfg_(cfg), sigma_(curvature_sigma(cfg.loss)), sketch_(std::move(sketch)) {
  if (!(cfg.alpha > 0.0)) throw InvalidConfig("sketched Newton: alpha must be > 0");
  if (sketch_ && sketch_->dim() != d) throw InvalidConfig("sketched Newton: sketch dimension mismatch");
  empty_s_ = Matrix::Zero(0, d);
  empty_h_ = Matrix::Zero(0, 0);
  u_ = Vector::Zero(d);
  w_ = Vector::Zero(d);
}

double SketchedNewton::do_predict(const SparseVec& x) {
  if (x.squared_norm() == 0.0) {
    w_ = u_;
    return 0.0;
  }
  const Matrix& s = sketch_ ? sketch_->sketch() : empty_s_;
  const Matrix& h = sketch_ ? sketch_->inverse_core() : empty_h_;
  ProjectionResult p = project_sketched(u_, x, s, h, cfg_.loss.c);
  w_ = std::move(p.w);
  const double z = x.dot(w_);
  return p.degenerate ? clamp_prediction(z, cfg_.loss.c) : z;
}

void SketchedNewton::do_update(const SparseVec& x, double, const LossValue& lv) {
  const SparseVec g = x.scaled(lv.dloss);
  const double eta = eta_schedule(rounds(), cfg_.eta_mode, cfg_.loss.c, cfg_.loss.lipschitz(), dim());
  const double inv_alpha = 1.0 / cfg_.alpha;
  u_ = w_;
  g.add_to(u_, -inv_alpha);
  if (!sketch_) return;
  sketch_->update(g.scaled(std::sqrt(sigma_ + eta)));
  const Matrix& s = sketch_->sketch();
  const Vector sg = times_sparse(s, g);
  u_.noalias() += inv_alpha * (s.transpose() * (sketch_->inverse_core() * sg));
}

FullNewton::FullNewton(Index d, const SonConfig& cfg, NullSpaceRule rule)
    : Learner(d, cfg.loss), cfg_(cfg), rule_(rule), sigma_(curvature_sigma(cfg.loss)) {
  if (cfg.alpha < 0.0) throw InvalidConfig("full Newton: alpha must be >= 0");
  if (d > kMaxDim) {
    throw InvalidConfig("full Newton: d = " + std::to_string(d) + " exceeds the dense limit of " +
                        std::to_string(kMaxDim) + "; use a sketched learner (son-oja or son-fd)");
  }
  a_ = SymMatrix(d);
  for (Index i = 0; i < d; ++i) a_.set(i, i, cfg.alpha);
  if (cfg.alpha > 0.0) {
    a_inv_ = Matrix::Identity(d, d) / cfg.alpha;
  } else {
    pinv_ = {Matrix::Zero(d, d), Matrix::Zero(d, d)};
  }
  u_ = Vector::Zero(d);
  w_ = Vector::Zero(d);
}

double FullNewton::do_predict(const SparseVec& x) {
  if (x.squared_norm() == 0.0) {
    w_ = u_;
    return 0.0;
  }
  const Vector xd = x.to_dense();
  ProjectionResult p = cfg_.alpha > 0.0 ? project_inverse(u_, xd, a_inv_, cfg_.loss.c)
                                        : project_pinv(u_, xd, pinv_, cfg_.loss.c, rule_);
  w_ = std::move(p.w);
  return w_.dot(xd);
}

void FullNewton::do_update(const SparseVec& x, double, const LossValue& lv) {
  const Vector g = lv.dloss * x.to_dense();
  const double eta = eta_schedule(rounds(), cfg_.eta_mode, cfg_.loss.c, cfg_.loss.lipschitz(), dim());
  const Vector ghat = std::sqrt(sigma_ + eta) * g;
  Matrix a = a_.matrix();
  a.noalias() += ghat * ghat.transpose();
  a_ = SymMatrix(a);
  if (cfg_.alpha > 0.0) {
    const Vector ag = a_inv_ * ghat;
    a_inv_.noalias() -= (ag * ag.transpose()) / (1.0 + ghat.dot(ag));
    u_ = w_ - a_inv_ * g;
  } else {
    pinv_ = pseudo_inverse(a_);
    u_ = w_ - pinv_.pinv * g;
  }
}

}  // namespace son
