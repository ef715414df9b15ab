#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace son {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Sparse vector over a fixed dimension, stored as strictly increasing
/// (index, value) pairs. Carries examples, gradients and to-sketch vectors.
class SparseVec {
 public:
  SparseVec() = default;
  explicit SparseVec(Index dim) : dim_(dim) {}
  /// Throws InvalidInput unless indices are strictly increasing and < dim.
  SparseVec(Index dim, std::vector<Index> indices, std::vector<double> values);

  static SparseVec from_dense(const Vector& v);

  Index dim() const { return dim_; }
  std::size_t nnz() const { return idx_.size(); }
  bool empty() const { return idx_.empty(); }
  std::span<const Index> indices() const { return idx_; }
  std::span<const double> values() const { return val_; }
  Index index(std::size_t k) const { return idx_[k]; }
  double value(std::size_t k) const { return val_[k]; }

  /// Appends an entry; the index must exceed every stored index.
  void push_back(Index i, double v);
  /// Grows the ambient dimension; existing indices must still fit.
  void set_dim(Index dim);

  double dot(const Vector& w) const;
  double squared_norm() const;
  /// w += scale * this
  void add_to(Vector& w, double scale) const;
  SparseVec scaled(double s) const;
  Vector to_dense() const;

  friend bool operator==(const SparseVec&, const SparseVec&) = default;

 private:
  Index dim_ = 0;
  std::vector<Index> idx_;
  std::vector<double> val_;
};

/// Merge-based inner product of two sparse vectors.
double dot(const SparseVec& a, const SparseVec& b);

/// Columns of `cols` (k x d, column-major) combined by the entries of x:
/// returns cols * x touching only x's support.
Vector times_sparse(const Matrix& cols, const SparseVec& x);

}  // namespace son
