#include "son/baselines.hpp"

#include "son/errors.hpp"

#include <cmath>

namespace son {

namespace {
void check_eta(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidConfig("stepsize must be finite and > 0");
}
}  // namespace

AdaGrad::AdaGrad(Index d, LossSpec loss, double eta) : Learner(d, loss), eta_(eta) {
  check_eta(eta);
  w_ = Vector::Zero(d);
  acc_ = Vector::Zero(d);
}

double AdaGrad::do_predict(const SparseVec& x) { return x.dot(w_); }

void AdaGrad::do_update(const SparseVec& x, double, const LossValue& lv) {
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    const Index i = x.index(k);
    const double g = lv.dloss * x.value(k);
    acc_[i] += g * g;
    if (acc_[i] > 0.0) w_[i] -= eta_ * g / std::sqrt(acc_[i]);
  }
}

Ogd::Ogd(Index d, LossSpec loss, double eta) : Learner(d, loss), eta_(eta) {
  check_eta(eta);
  w_ = Vector::Zero(d);
}

double Ogd::do_predict(const SparseVec& x) { return x.dot(w_); }

void Ogd::do_update(const SparseVec& x, double, const LossValue& lv) { x.add_to(w_, -eta_ * lv.dloss); }

DiagonalPreconditioned::DiagonalPreconditioned(std::unique_ptr<Learner> inner)
    : DiagonalPreconditioned(std::move(inner), Vector()) {}

DiagonalPreconditioned::DiagonalPreconditioned(std::unique_ptr<Learner> inner, Vector initial)
    : Learner(inner ? inner->dim() : 1, inner ? inner->loss() : LossSpec{}), inner_(std::move(inner)) {
  if (!inner_) throw InvalidConfig("diagonal preconditioning needs an inner learner");
  if (initial.size() == 0) initial = Vector::Constant(inner_->dim(), kInitialDiagonal);
  if (initial.size() != inner_->dim() || !(initial.array() > 0.0).all())
    throw InvalidConfig("diagonal preconditioning: initial diagonal must be positive with length d");
  diag_ = std::move(initial);
}

SparseVec DiagonalPreconditioned::transform(const SparseVec& x) const {
  SparseVec out(x.dim());
  for (std::size_t k = 0; k < x.nnz(); ++k) out.push_back(x.index(k), x.value(k) / std::sqrt(diag_[x.index(k)]));
  return out;
}

double DiagonalPreconditioned::do_predict(const SparseVec& x) { return inner_->predict(transform(x)); }

void DiagonalPreconditioned::do_update(const SparseVec& x, double y, const LossValue& lv) {
  inner_->update(y);
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    const double g = lv.dloss * x.value(k);
    diag_[x.index(k)] += g * g;
  }
}

}  // namespace son
