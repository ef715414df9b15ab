#pragma once

#include "son/sparse_vec.hpp"

namespace son {

/// A low-rank sketch S of the to-sketch vectors seen so far, together with
/// H = (αI + SSᵀ)⁻¹. Both are valid between calls to update().
class Sketch {
 public:
  virtual ~Sketch() = default;
  virtual void update(const SparseVec& ghat) = 0;
  virtual const Matrix& sketch() const = 0;
  virtual const Matrix& inverse_core() const = 0;
  virtual Index dim() const = 0;
  virtual double alpha() const = 0;
};

}  // namespace son
