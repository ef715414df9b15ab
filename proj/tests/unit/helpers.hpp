#pragma once

#include "son/core_math.hpp"
#include "son/sparse_vec.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <random>
#include <vector>

namespace testing {

using son::Index;
using son::Matrix;
using son::SparseVec;
using son::Vector;

inline Matrix gaussian(Index r, Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix m(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) m(i, j) = n(rng);
  return m;
}

inline Vector gaussian(Index n, std::mt19937_64& rng) { return gaussian(n, 1, rng).col(0); }

inline double uniform(double lo, double hi, std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Index uniform_int(Index lo, Index hi, std::mt19937_64& rng) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

/// nnz distinct coordinates out of d with Gaussian values.
inline SparseVec random_sparse(Index d, Index nnz, std::mt19937_64& rng) {
  std::vector<Index> idx;
  while (static_cast<Index>(idx.size()) < nnz) {
    const Index i = uniform_int(0, d - 1, rng);
    if (std::find(idx.begin(), idx.end(), i) == idx.end()) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end());
  std::normal_distribution<double> n;
  std::vector<double> val(idx.size());
  for (double& v : val) v = n(rng);
  return SparseVec(d, idx, val);
}

inline Matrix random_orthonormal_rows(Index m, Index d, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(d, m, rng));
  Matrix q = qr.householderQ() * Matrix::Identity(d, m);
  return q.transpose();
}

/// Eigenvalues of a symmetric matrix, descending, from Eigen's solver.
inline Vector eigen_values_desc(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  return es.eigenvalues().reverse();
}

inline double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

/// Distance between the row spaces of two matrices with orthonormal rows.
inline double row_space_distance(const Matrix& a, const Matrix& b) {
  return max_abs(a.transpose() * a - b.transpose() * b);
}

}  // namespace testing
