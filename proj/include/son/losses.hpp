#pragma once

namespace son {

enum class LossKind { kSquare, kAbsoluteLinear };

/// Scalar loss of a prediction z against label y. C bounds |z| and |y|;
/// lipschitz is the derivative bound that follows from C.
struct LossSpec {
  LossKind kind = LossKind::kSquare;
  double c = 1.0;

  /// Throws InvalidConfig unless c > 0.
  static LossSpec square(double c);
  static LossSpec absolute_linear(double c);

  double lipschitz() const;
};

struct LossValue {
  double loss;
  double dloss;
};

/// square: ((z-y)², 2(z-y)). absolute-linear: (|z-y|, sgn(z-y)) with sgn(0) = 0.
LossValue eval(const LossSpec& spec, double z, double y);

/// 1/(8C²) for square loss, 0 for losses with no curvature guarantee.
double curvature_sigma(const LossSpec& spec);

}  // namespace son
