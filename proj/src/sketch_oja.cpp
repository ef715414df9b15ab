#include "son/sketch_oja.hpp"

#include "son/errors.hpp"

#include <cmath>
#include <random>

namespace son {

GammaSchedule inverse_t_schedule() {
  return [](long t, Index m) { return Vector::Constant(m, 1.0 / static_cast<double>(t)); };
}

namespace {

// Removes the components along rows [0, i) of v from x, twice.
void project_out(const Matrix& v, Index i, Vector& x) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Index j = 0; j < i; ++j) x.noalias() -= v.row(j).dot(x) * v.row(j).transpose();
  }
}

}  // namespace

int orthonormalize_rows(Matrix& v) {
  int repaired = 0;
  for (Index i = 0; i < v.rows(); ++i) {
    Vector x = v.row(i).transpose();
    const double before = x.norm();
    project_out(v, i, x);
    const double after = x.norm();
    if (after > 1e-10 * before && after > 0.0) {
      v.row(i) = x.transpose() / after;
      continue;
    }
    ++repaired;
    for (Index j = 0; j < v.cols(); ++j) {
      Vector e = Vector::Zero(v.cols());
      e[j] = 1.0;
      project_out(v, i, e);
      const double n = e.norm();
      if (n > 0.5) {
        v.row(i) = e.transpose() / n;
        break;
      }
    }
  }
  return repaired;
}

OjaSketch::OjaSketch(double alpha, Index m, Index d, OjaOptions opt) : alpha_(alpha), opt_(std::move(opt)) {
  if (!(alpha > 0.0)) throw InvalidConfig("Oja sketch: alpha must be > 0");
  if (m < 1 || m > d) throw InvalidConfig("Oja sketch: need 1 <= m <= d");
  if (!opt_.gamma) opt_.gamma = inverse_t_schedule();
  lambda_ = Vector::Zero(m);
  if (opt_.seed) {
    std::mt19937_64 rng(*opt_.seed);
    std::normal_distribution<double> normal;
    v_.resize(m, d);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < d; ++j) v_(i, j) = normal(rng);
    orthonormalize_rows(v_);
  } else {
    v_ = Matrix::Identity(m, d);
  }
  s_ = Matrix::Zero(m, d);
  h_ = Matrix::Identity(m, m) / alpha;
  if (opt_.block) pending_ = Matrix::Zero(m, d);
}

void OjaSketch::update(const SparseVec& ghat) {
  if (ghat.dim() != dim()) throw InvalidInput("Oja sketch: dimension mismatch");
  ++t_;
  const Index m = v_.rows();
  const Vector gamma = opt_.gamma(t_, m);
  const Vector y = times_sparse(v_, ghat);
  for (Index i = 0; i < m; ++i) lambda_[i] = (1.0 - gamma[i]) * lambda_[i] + gamma[i] * y[i] * y[i];

  const Vector step = gamma.cwiseProduct(y);
  Matrix& target = opt_.block ? pending_ : v_;
  for (std::size_t k = 0; k < ghat.nnz(); ++k) target.col(ghat.index(k)) += ghat.value(k) * step;
  if (!opt_.block) {
    repairs_ += orthonormalize_rows(v_);
  } else if (t_ % m == 0) {
    v_ += pending_;
    pending_.setZero();
    repairs_ += orthonormalize_rows(v_);
  }
  refresh();
}

void OjaSketch::refresh() {
  const double t = static_cast<double>(t_);
  for (Index i = 0; i < v_.rows(); ++i) {
    const double tl = t * lambda_[i];
    s_.row(i) = std::sqrt(tl) * v_.row(i);
    h_(i, i) = 1.0 / (alpha_ + tl);
  }
}

}  // namespace son
