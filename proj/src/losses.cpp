#include "son/losses.hpp"

#include "son/errors.hpp"

#include <cmath>

namespace son {

namespace {
LossSpec make(LossKind kind, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidConfig("loss: C must be finite and > 0");
  return LossSpec{kind, c};
}
}  // namespace

LossSpec LossSpec::square(double c) { return make(LossKind::kSquare, c); }
LossSpec LossSpec::absolute_linear(double c) { return make(LossKind::kAbsoluteLinear, c); }

double LossSpec::lipschitz() const {
  switch (kind) {
    case LossKind::kSquare:
      return 4.0 * c;
    case LossKind::kAbsoluteLinear:
      return 1.0;
  }
  return 0.0;
}

LossValue eval(const LossSpec& spec, double z, double y) {
  const double r = z - y;
  switch (spec.kind) {
    case LossKind::kSquare:
      return {r * r, 2.0 * r};
    case LossKind::kAbsoluteLinear:
      return {std::abs(r), r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0)};
  }
  return {0.0, 0.0};
}

double curvature_sigma(const LossSpec& spec) {
  if (spec.kind == LossKind::kSquare) return 1.0 / (8.0 * spec.c * spec.c);
  return 0.0;
}

}  // namespace son
