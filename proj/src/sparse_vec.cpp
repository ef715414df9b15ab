#include "son/sparse_vec.hpp"

#include "son/errors.hpp"

#include <cmath>
#include <string>

namespace son {

SparseVec::SparseVec(Index dim, std::vector<Index> indices, std::vector<double> values)
    : dim_(dim), idx_(std::move(indices)), val_(std::move(values)) {
  if (idx_.size() != val_.size()) throw InvalidInput("SparseVec: index/value length mismatch");
  for (std::size_t k = 0; k < idx_.size(); ++k) {
    if (idx_[k] < 0 || idx_[k] >= dim_) throw InvalidInput("SparseVec: index out of range");
    if (k > 0 && idx_[k] <= idx_[k - 1]) throw InvalidInput("SparseVec: indices not strictly increasing");
    if (!std::isfinite(val_[k])) throw InvalidInput("SparseVec: non-finite value");
  }
}

SparseVec SparseVec::from_dense(const Vector& v) {
  SparseVec out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) out.push_back(i, v[i]);
  }
  return out;
}

void SparseVec::push_back(Index i, double v) {
  if (i < 0 || i >= dim_) throw InvalidInput("SparseVec: index " + std::to_string(i) + " out of range");
  if (!idx_.empty() && i <= idx_.back()) throw InvalidInput("SparseVec: indices not strictly increasing");
  idx_.push_back(i);
  val_.push_back(v);
}

void SparseVec::set_dim(Index dim) {
  if (!idx_.empty() && idx_.back() >= dim) throw InvalidInput("SparseVec: dimension smaller than stored index");
  dim_ = dim;
}

double SparseVec::dot(const Vector& w) const {
  double s = 0.0;
  for (std::size_t k = 0; k < idx_.size(); ++k) s += val_[k] * w[idx_[k]];
  return s;
}

double SparseVec::squared_norm() const {
  double s = 0.0;
  for (double v : val_) s += v * v;
  return s;
}

void SparseVec::add_to(Vector& w, double scale) const {
  for (std::size_t k = 0; k < idx_.size(); ++k) w[idx_[k]] += scale * val_[k];
}

SparseVec SparseVec::scaled(double s) const {
  SparseVec out = *this;
  for (double& v : out.val_) v *= s;
  return out;
}

Vector SparseVec::to_dense() const {
  Vector v = Vector::Zero(dim_);
  for (std::size_t k = 0; k < idx_.size(); ++k) v[idx_[k]] = val_[k];
  return v;
}

double dot(const SparseVec& a, const SparseVec& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.nnz() && j < b.nnz()) {
    if (a.index(i) == b.index(j)) {
      s += a.value(i++) * b.value(j++);
    } else if (a.index(i) < b.index(j)) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

Vector times_sparse(const Matrix& cols, const SparseVec& x) {
  Vector out = Vector::Zero(cols.rows());
  for (std::size_t k = 0; k < x.nnz(); ++k) out.noalias() += x.value(k) * cols.col(x.index(k));
  return out;
}

}  // namespace son
