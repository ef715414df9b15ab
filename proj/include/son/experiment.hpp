#pragma once

#include "son/data_io.hpp"
#include "son/son.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace son {

/// One pass over labeled examples. The label of the current example is
/// available only through label(), after next() has produced its features.
class ExampleSource {
 public:
  virtual ~ExampleSource() = default;
  virtual Index dim() const = 0;
  virtual bool next(SparseVec& x) = 0;
  virtual double label() = 0;
};

using SourceFactory = std::function<std::unique_ptr<ExampleSource>()>;

class VectorSource final : public ExampleSource {
 public:
  VectorSource(Index dim, std::vector<Example> examples);
  Index dim() const override { return dim_; }
  bool next(SparseVec& x) override;
  double label() override;

 private:
  Index dim_;
  std::vector<Example> examples_;
  std::size_t pos_ = 0;
};

class SyntheticSource final : public ExampleSource {
 public:
  explicit SyntheticSource(const SyntheticSpec& spec);
  Index dim() const override { return dim_; }
  bool next(SparseVec& x) override;
  double label() override;

 private:
  Index dim_;
  SyntheticStream stream_;
  Example current_;
};

class FileSource final : public ExampleSource {
 public:
  FileSource(const std::string& path, Index dim);
  Index dim() const override { return dim_; }
  bool next(SparseVec& x) override;
  double label() override;

 private:
  Index dim_;
  LibsvmReader reader_;
  Example current_;
};

/// Factory for a libsvm file; the dimension is the largest index unless
/// dim_override > 0.
SourceFactory file_source(const std::string& path, Index dim_override = 0);
SourceFactory synthetic_source(const SyntheticSpec& spec);

enum class Algo { kSonOja, kSonFd, kSonFull, kAdaGrad, kOgd };

Algo parse_algo(const std::string& name);
std::string algo_name(Algo a);

struct RunConfig {
  Algo algo = Algo::kSonOja;
  Index m = 10;
  double alpha = 1.0;          // SON family
  double eta = 1.0;            // AdaGrad and OGD stepsize
  double c = 1.0;
  EtaMode eta_mode = EtaMode::kCurvature;
  bool diag_precondition = false;
  bool dense = false;          // dense SON paths instead of the sparse ones
  long checkpoint_every = 100;
};

/// Builds the learner a config describes.
std::unique_ptr<Learner> make_learner(const RunConfig& cfg, Index d);

struct Checkpoint {
  long round;
  double progressive_error;
  double cumulative_loss;
};

struct RunReport {
  std::vector<Checkpoint> checkpoints;
  long rounds = 0;
  long mistakes = 0;
  double final_error = 0.0;
  double cumulative_loss = 0.0;
  double wall_seconds = 0.0;
  std::string config;
  bool failed = false;
  std::string failure;
};

std::string describe(const RunConfig& cfg);

/// Single online pass: next(x), predict, label(), update, in that order.
/// A prediction z counts as a mistake when sign(z) != y with sign(0) = +1.
/// Numerical failures mark the report failed instead of throwing.
RunReport run_experiment(const RunConfig& cfg, ExampleSource& source);

struct SweepResult {
  std::vector<double> stepsizes;  // 2^j
  std::vector<RunReport> runs;
  std::size_t best = 0;
  const RunReport& best_run() const { return runs[best]; }
};

/// Stepsizes 2^j for j = −3..6: 1/α for the SON family, η for AdaGrad and
/// OGD. Runs execute concurrently; the best run has the lowest final error
/// among the runs that did not fail, earliest stepsize on ties.
SweepResult run_sweep(const RunConfig& base, const SourceFactory& make_source);

struct EigCheckpoint {
  long round;
  double max_relative_error;
};

/// Runs Oja's estimator (Γ_t = (1/t)I) on the raw examples and, at each
/// checkpoint, compares its top-m eigenvalue estimates with the top-m
/// eigenvalues of the empirical second moment (1/t)Σxxᵀ.
std::vector<EigCheckpoint> eigen_recovery_track(ExampleSource& source, Index m, const std::vector<long>& checkpoints);

}  // namespace son
