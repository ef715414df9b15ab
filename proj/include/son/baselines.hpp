#pragma once

#include "son/son.hpp"

#include <memory>

namespace son {

/// Diagonal AdaGrad: w_i ← w_i − η·g_i/√(Σ g_i²), accumulator updated first.
/// Coordinates whose accumulator is still zero are left unchanged.
class AdaGrad final : public Learner {
 public:
  AdaGrad(Index d, LossSpec loss, double eta);

  const Vector& weights() const { return w_; }
  const Vector& accumulator() const { return acc_; }

 protected:
  double do_predict(const SparseVec& x) override;
  void do_update(const SparseVec& x, double y, const LossValue& lv) override;

 private:
  double eta_;
  Vector w_;
  Vector acc_;
};

/// Online gradient descent with a constant stepsize and no projection.
class Ogd final : public Learner {
 public:
  Ogd(Index d, LossSpec loss, double eta);

  const Vector& weights() const { return w_; }

 protected:
  double do_predict(const SparseVec& x) override;
  void do_update(const SparseVec& x, double y, const LossValue& lv) override;

 private:
  double eta_;
  Vector w_;
};

/// Feeds D_t^{-1/2}·x_t to the inner learner, where D_1 = 0.1·I and D
/// accumulates the squared gradient coordinates in the original space.
class DiagonalPreconditioned final : public Learner {
 public:
  static constexpr double kInitialDiagonal = 0.1;

  explicit DiagonalPreconditioned(std::unique_ptr<Learner> inner);
  /// D_1 = diag(initial); entries must be > 0.
  DiagonalPreconditioned(std::unique_ptr<Learner> inner, Vector initial);

  const Vector& diagonal() const { return diag_; }
  const Learner& inner() const { return *inner_; }

  /// D^{-1/2}·x with the current D.
  SparseVec transform(const SparseVec& x) const;

 protected:
  double do_predict(const SparseVec& x) override;
  void do_update(const SparseVec& x, double y, const LossValue& lv) override;

 private:
  std::unique_ptr<Learner> inner_;
  Vector diag_;
};

}  // namespace son
