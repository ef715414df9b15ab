#pragma once

#include "son/sparse_vec.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace son {

struct Example {
  SparseVec features;  // 0-based indices; dim is set by the reader
  double label = 0.0;  // ±1
};

/// Parses "label idx:val idx:val ... # comment" with 1-based, strictly
/// increasing indices. Labels > 0 map to +1, all others to −1. Returns
/// nullopt for blank or comment-only lines. The features' dimension is one
/// past the largest index. Throws ParseError carrying line_no.
std::optional<Example> parse_libsvm_line(std::string_view line, long line_no = 0);

/// Canonical text form: "+1" or "-1", then idx:val with 1-based indices and
/// shortest round-trip values.
std::string serialize_libsvm(const Example& ex);

/// Streams examples from a svmlight/libsvm file, gzip-compressed or plain.
class LibsvmReader {
 public:
  /// Throws ParseError if the file cannot be opened.
  explicit LibsvmReader(const std::string& path);
  ~LibsvmReader();
  LibsvmReader(const LibsvmReader&) = delete;
  LibsvmReader& operator=(const LibsvmReader&) = delete;

  /// Next example with features.dim() == dim; indices >= dim are a ParseError.
  bool next(Example& out, Index dim);
  long line() const { return line_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::string path_;
  long line_ = 0;
};

/// Largest feature index + 1 over the file, plus the example count.
struct FileScan {
  Index dim = 0;
  long examples = 0;
};
FileScan scan_libsvm(const std::string& path);

struct SyntheticSpec {
  long t = 10000;
  Index d = 100;
  double kappa = 1.0;
  std::uint64_t seed = 1;

  /// Throws InvalidConfig unless t >= 1, d > 10 and kappa >= 1.
  void validate() const;
};

/// Covariance spectrum: d−10 ones, then 1 + i(κ−1)/10 for i = 1..10.
Vector synthetic_spectrum(Index d, double kappa);

/// Rows x = V·diag(λ)^{1/2}·z with z ~ N(0, I), V a random orthonormal
/// basis, and y = sign(θᵀVz) (sign(0) = +1), the label of the κ = 1
/// instance. V, θ and every z depend only on the seed, so streams that
/// differ only in κ share Z, V and the labels.
class SyntheticStream {
 public:
  explicit SyntheticStream(const SyntheticSpec& spec);

  bool next(Example& out);
  const Matrix& basis() const { return v_; }
  const Vector& theta() const { return theta_; }
  const Vector& sqrt_spectrum() const { return sqrt_lambda_; }
  long produced() const { return produced_; }

 private:
  SyntheticSpec spec_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  Matrix v_;
  Vector theta_;
  Vector sqrt_lambda_;
  long produced_ = 0;
};

}  // namespace son
