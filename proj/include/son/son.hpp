#pragma once

#include "son/core_math.hpp"
#include "son/losses.hpp"
#include "son/projection.hpp"
#include "son/sketch.hpp"

#include <memory>

namespace son {

enum class EtaMode { kConvex, kCurvature };

/// √(d/(C²L²t)) in convex mode, 0 in curvature mode. t >= 1.
double eta_schedule(long t, EtaMode mode, double c, double lipschitz, Index d);

struct RoundOutcome {
  double prediction;
  double loss;
  double dloss;
};

/// Online learner driven by the protocol predict(x_t) then update(y_t).
/// The label is not available until the prediction has been made; calling
/// the two out of order throws std::logic_error.
class Learner {
 public:
  Learner(Index d, LossSpec loss);
  virtual ~Learner() = default;
  Learner(const Learner&) = delete;
  Learner& operator=(const Learner&) = delete;

  double predict(const SparseVec& x);
  RoundOutcome update(double y);

  Index dim() const { return d_; }
  long rounds() const { return t_; }
  const LossSpec& loss() const { return loss_; }

 protected:
  virtual double do_predict(const SparseVec& x) = 0;
  /// Called once per round after the loss is known; rounds() already counts
  /// the current round.
  virtual void do_update(const SparseVec& x, double y, const LossValue& lv) = 0;

 private:
  Index d_;
  LossSpec loss_;
  long t_ = 0;
  bool pending_ = false;
  SparseVec x_;
  double prediction_ = 0.0;
};

struct SonConfig {
  double alpha = 1.0;
  EtaMode eta_mode = EtaMode::kCurvature;
  LossSpec loss;
};

/// Sketched Online Newton over any Sketch. A null sketch is the m = 0 case,
/// which is online gradient descent with stepsize 1/α plus the projection.
class SketchedNewton final : public Learner {
 public:
  SketchedNewton(Index d, const SonConfig& cfg, std::unique_ptr<Sketch> sketch);

  const Vector& weights() const { return w_; }
  const Sketch* sketch() const { return sketch_.get(); }
  double sigma() const { return sigma_; }

 protected:
  double do_predict(const SparseVec& x) override;
  void do_update(const SparseVec& x, double y, const LossValue& lv) override;

 private:
  SonConfig cfg_;
  double sigma_;
  std::unique_ptr<Sketch> sketch_;
  Matrix empty_s_;
  Matrix empty_h_;
  Vector u_;
  Vector w_;
};

/// Online Newton with the full matrix A_t = αI + Σ(σ+η)g gᵀ. With α = 0 the
/// inverse is replaced by the Moore-Penrose pseudoinverse.
class FullNewton final : public Learner {
 public:
  static constexpr Index kMaxDim = 4096;

  /// Throws InvalidConfig for α < 0 or d > kMaxDim.
  FullNewton(Index d, const SonConfig& cfg, NullSpaceRule rule = NullSpaceRule::kZeroPrediction);

  const Vector& weights() const { return w_; }
  const SymMatrix& a() const { return a_; }

 protected:
  double do_predict(const SparseVec& x) override;
  void do_update(const SparseVec& x, double y, const LossValue& lv) override;

 private:
  SonConfig cfg_;
  NullSpaceRule rule_;
  double sigma_;
  SymMatrix a_;
  Matrix a_inv_;        // α > 0
  PseudoInverse pinv_;  // α = 0
  Vector u_;
  Vector w_;
};

/// Prediction clamped into [−C, C]; used when the projection is degenerate.
double clamp_prediction(double z, double c);

}  // namespace son
