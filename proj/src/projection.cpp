#include "son/projection.hpp"

#include "son/errors.hpp"

#include <cmath>

namespace son {

double tau_c(double y, double c) {
  const double excess = std::abs(y) - c;
  if (excess <= 0.0) return 0.0;
  return y > 0.0 ? excess : -excess;
}

namespace {

void check(const Vector& u, const Vector& x, Index n) {
  if (u.size() != x.size() || x.size() != n) throw InvalidInput("projection: dimension mismatch");
  if (x.squaredNorm() == 0.0) throw InvalidInput("projection: x must be nonzero");
}

ProjectionResult shift(const Vector& u, const Vector& dir, double numer, double denom) {
  ProjectionResult out;
  out.gamma = numer / denom;
  out.w = u - out.gamma * dir;
  out.clipped = true;
  return out;
}

}  // namespace

ProjectionResult project_full(const Vector& u, const Vector& x, const SymMatrix& a, double c, NullSpaceRule rule) {
  check(u, x, a.n());
  return project_pinv(u, x, pseudo_inverse(a), c, rule);
}

ProjectionResult project_pinv(const Vector& u, const Vector& x, const PseudoInverse& pa, double c,
                              NullSpaceRule rule) {
  check(u, x, pa.pinv.rows());
  const double ux = u.dot(x);
  const double tau = tau_c(ux, c);
  const Vector off_range = x - pa.range * x;
  const bool in_range = off_range.norm() <= 1e-8 * x.norm();
  if (in_range) {
    if (tau == 0.0) return {u, 0.0, false, false};
    const Vector ax = pa.pinv * x;
    return shift(u, ax, tau, x.dot(ax));
  }
  const double numer = rule == NullSpaceRule::kZeroPrediction ? ux : tau;
  if (numer == 0.0) return {u, 0.0, false, false};
  return shift(u, off_range, numer, x.dot(off_range));
}

ProjectionResult project_inverse(const Vector& u, const Vector& x, const Matrix& a_inv, double c) {
  check(u, x, a_inv.rows());
  const double tau = tau_c(u.dot(x), c);
  if (tau == 0.0) return {u, 0.0, false, false};
  const Vector ax = a_inv * x;
  return shift(u, ax, tau, x.dot(ax));
}

ProjectionResult project_sketched(const Vector& u, const SparseVec& x, const Matrix& s, const Matrix& h, double c) {
  if (u.size() != x.dim() || s.cols() != x.dim() || h.rows() != s.rows())
    throw InvalidInput("project_sketched: dimension mismatch");
  const double xx = x.squared_norm();
  if (xx == 0.0) throw InvalidInput("projection: x must be nonzero");
  const double tau = tau_c(x.dot(u), c);
  if (tau == 0.0) return {u, 0.0, false, false};
  const Vector xhat = times_sparse(s, x);
  const Vector hx = h * xhat;
  const double den = xx - xhat.dot(hx);
  if (den <= degenerate_denominator(xx)) return {u, 0.0, false, true};
  ProjectionResult out;
  out.gamma = tau / den;
  out.w = u;
  x.add_to(out.w, -out.gamma);
  out.w.noalias() += out.gamma * (s.transpose() * hx);
  out.clipped = true;
  return out;
}

}  // namespace son
