#include "son/experiment.hpp"

#include "son/baselines.hpp"
#include "son/errors.hpp"
#include "son/sketch_fd.hpp"
#include "son/sketch_oja.hpp"
#include "son/sparse.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>

namespace son {

VectorSource::VectorSource(Index dim, std::vector<Example> examples) : dim_(dim), examples_(std::move(examples)) {}

bool VectorSource::next(SparseVec& x) {
  if (pos_ >= examples_.size()) return false;
  x = examples_[pos_++].features;
  return true;
}

double VectorSource::label() {
  if (pos_ == 0) throw std::logic_error("label requested before any example");
  return examples_[pos_ - 1].label;
}

SyntheticSource::SyntheticSource(const SyntheticSpec& spec) : dim_(spec.d), stream_(spec) {}

bool SyntheticSource::next(SparseVec& x) {
  if (!stream_.next(current_)) return false;
  x = current_.features;
  return true;
}

double SyntheticSource::label() { return current_.label; }

FileSource::FileSource(const std::string& path, Index dim) : dim_(dim), reader_(path) {}

bool FileSource::next(SparseVec& x) {
  if (!reader_.next(current_, dim_)) return false;
  x = current_.features;
  return true;
}

double FileSource::label() { return current_.label; }

SourceFactory file_source(const std::string& path, Index dim_override) {
  Index dim = dim_override;
  if (dim <= 0) dim = scan_libsvm(path).dim;
  if (dim <= 0) throw ParseError(path + ": no features found", 0);
  return [path, dim]() { return std::make_unique<FileSource>(path, dim); };
}

SourceFactory synthetic_source(const SyntheticSpec& spec) {
  spec.validate();
  return [spec]() { return std::make_unique<SyntheticSource>(spec); };
}

Algo parse_algo(const std::string& name) {
  if (name == "son-oja") return Algo::kSonOja;
  if (name == "son-fd") return Algo::kSonFd;
  if (name == "son-full") return Algo::kSonFull;
  if (name == "adagrad") return Algo::kAdaGrad;
  if (name == "ogd") return Algo::kOgd;
  throw InvalidConfig("unknown algorithm '" + name + "'");
}

std::string algo_name(Algo a) {
  switch (a) {
    case Algo::kSonOja:
      return "son-oja";
    case Algo::kSonFd:
      return "son-fd";
    case Algo::kSonFull:
      return "son-full";
    case Algo::kAdaGrad:
      return "adagrad";
    case Algo::kOgd:
      return "ogd";
  }
  return "?";
}

std::unique_ptr<Learner> make_learner(const RunConfig& cfg, Index d) {
  const SonConfig son{cfg.alpha, cfg.eta_mode, LossSpec::square(cfg.c)};
  std::unique_ptr<Learner> inner;
  switch (cfg.algo) {
    case Algo::kSonOja:
      if (cfg.dense) {
        std::unique_ptr<Sketch> sk;
        if (cfg.m > 0) sk = std::make_unique<OjaSketch>(cfg.alpha, cfg.m, d);
        inner = std::make_unique<SketchedNewton>(d, son, std::move(sk));
      } else {
        inner = std::make_unique<SparseOjaNewton>(d, cfg.m, son);
      }
      break;
    case Algo::kSonFd:
      if (cfg.dense) {
        std::unique_ptr<Sketch> sk;
        if (cfg.m > 0) sk = std::make_unique<EpochFdSketch>(cfg.alpha, cfg.m, d);
        inner = std::make_unique<SketchedNewton>(d, son, std::move(sk));
      } else {
        inner = std::make_unique<SparseFdNewton>(d, cfg.m, son);
      }
      break;
    case Algo::kSonFull:
      inner = std::make_unique<FullNewton>(d, son);
      break;
    case Algo::kAdaGrad:
      inner = std::make_unique<AdaGrad>(d, son.loss, cfg.eta);
      break;
    case Algo::kOgd:
      inner = std::make_unique<Ogd>(d, son.loss, cfg.eta);
      break;
  }
  if (cfg.diag_precondition) return std::make_unique<DiagonalPreconditioned>(std::move(inner));
  return inner;
}

std::string describe(const RunConfig& cfg) {
  std::ostringstream os;
  os << "algo=" << algo_name(cfg.algo);
  switch (cfg.algo) {
    case Algo::kSonOja:
    case Algo::kSonFd:
    case Algo::kSonFull:
      os << " m=" << cfg.m << " alpha=" << cfg.alpha << " eta_mode="
         << (cfg.eta_mode == EtaMode::kConvex ? "convex" : "curvature") << (cfg.dense ? " dense" : "");
      break;
    case Algo::kAdaGrad:
    case Algo::kOgd:
      os << " eta=" << cfg.eta;
      break;
  }
  os << " C=" << cfg.c << (cfg.diag_precondition ? " diag-precondition" : "");
  return os.str();
}

RunReport run_experiment(const RunConfig& cfg, ExampleSource& source) {
  RunReport rep;
  rep.config = describe(cfg);
  const auto start = std::chrono::steady_clock::now();
  std::unique_ptr<Learner> learner = make_learner(cfg, source.dim());
  SparseVec x;
  try {
    while (source.next(x)) {
      const double z = learner->predict(x);
      const double y = source.label();
      const RoundOutcome out = learner->update(y);
      ++rep.rounds;
      if ((z >= 0.0 ? 1.0 : -1.0) != y) ++rep.mistakes;
      rep.cumulative_loss += out.loss;
      if (cfg.checkpoint_every > 0 && rep.rounds % cfg.checkpoint_every == 0) {
        rep.checkpoints.push_back(
            {rep.rounds, static_cast<double>(rep.mistakes) / static_cast<double>(rep.rounds), rep.cumulative_loss});
      }
    }
  } catch (const NumericalDegeneracy& e) {
    rep.failed = true;
    rep.failure = e.what();
  }
  if (!std::isfinite(rep.cumulative_loss) && !rep.failed) {
    rep.failed = true;
    rep.failure = "loss diverged";
  }
  rep.final_error = rep.rounds > 0 ? static_cast<double>(rep.mistakes) / static_cast<double>(rep.rounds) : 0.0;
  if (rep.rounds > 0 && (rep.checkpoints.empty() || rep.checkpoints.back().round != rep.rounds))
    rep.checkpoints.push_back({rep.rounds, rep.final_error, rep.cumulative_loss});
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

SweepResult run_sweep(const RunConfig& base, const SourceFactory& make_source) {
  SweepResult out;
  std::vector<std::future<RunReport>> futures;
  for (int j = -3; j <= 6; ++j) {
    const double step = std::ldexp(1.0, j);
    RunConfig cfg = base;
    if (cfg.algo == Algo::kAdaGrad || cfg.algo == Algo::kOgd) {
      cfg.eta = step;
    } else {
      cfg.alpha = 1.0 / step;
    }
    out.stepsizes.push_back(step);
    futures.push_back(std::async(std::launch::async, [cfg, &make_source]() {
      std::unique_ptr<ExampleSource> src = make_source();
      return run_experiment(cfg, *src);
    }));
  }
  for (auto& f : futures) out.runs.push_back(f.get());
  bool found = false;
  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    if (out.runs[i].failed) continue;
    if (!found || out.runs[i].final_error < out.runs[out.best].final_error) {
      out.best = i;
      found = true;
    }
  }
  return out;
}

std::vector<EigCheckpoint> eigen_recovery_track(ExampleSource& source, Index m, const std::vector<long>& checkpoints) {
  const Index d = source.dim();
  if (m < 1 || m > d) throw InvalidConfig("eigen tracking: need 1 <= m <= d");
  if (d > 2000) throw InvalidConfig("eigen tracking keeps a dense d x d second moment; d must be <= 2000");
  OjaSketch oja(1.0, m, d);
  Matrix second = Matrix::Zero(d, d);
  std::vector<EigCheckpoint> trace;
  std::vector<long> marks = checkpoints;
  std::sort(marks.begin(), marks.end());
  std::size_t next_mark = 0;
  SparseVec x;
  long t = 0;
  while (next_mark < marks.size() && source.next(x)) {
    ++t;
    oja.update(x);
    for (std::size_t a = 0; a < x.nnz(); ++a)
      for (std::size_t b = 0; b < x.nnz(); ++b) second(x.index(a), x.index(b)) += x.value(a) * x.value(b);
    if (t != marks[next_mark]) continue;
    ++next_mark;
    const EigPairs truth = top_k_eig(SymMatrix(Matrix(second / static_cast<double>(t))), m);
    Vector est = oja.lambda();
    std::sort(est.data(), est.data() + est.size(), std::greater<>());
    double worst = 0.0;
    for (Index i = 0; i < m; ++i) {
      const double ref = truth.values[i];
      const double err = ref > 0.0 ? std::abs(est[i] - ref) / ref : std::abs(est[i]);
      worst = std::max(worst, err);
    }
    trace.push_back({t, worst});
  }
  return trace;
}

}  // namespace son
