#include "son/errors.hpp"
#include "son/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kConfigError = 2;
constexpr int kDataError = 3;

son::SyntheticSpec parse_synthetic(const std::string& text, std::uint64_t seed) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  if (parts.size() != 3) throw son::InvalidConfig("--synthetic expects T,d,kappa");
  son::SyntheticSpec spec;
  try {
    spec.t = std::stol(parts[0]);
    spec.d = std::stol(parts[1]);
    spec.kappa = std::stod(parts[2]);
  } catch (const std::exception&) {
    throw son::InvalidConfig("--synthetic expects T,d,kappa");
  }
  spec.seed = seed;
  spec.validate();
  return spec;
}

void write_csv(const std::string& path, const son::RunReport& rep) {
  std::ofstream out(path);
  if (!out) throw son::ParseError("cannot write '" + path + "'", 0);
  out << "round,progressive_error,cumulative_loss\n";
  out.precision(10);
  for (const auto& c : rep.checkpoints) out << c.round << ',' << c.progressive_error << ',' << c.cumulative_loss << '\n';
}

void write_eig_csv(const std::string& path, const std::vector<son::EigCheckpoint>& trace) {
  std::ofstream out(path);
  if (!out) throw son::ParseError("cannot write '" + path + "'", 0);
  out << "round,max_relative_error\n";
  out.precision(10);
  for (const auto& c : trace) out << c.round << ',' << c.max_relative_error << '\n';
}

void print_summary(const son::RunReport& rep) {
  std::printf("%s rounds=%ld final_error=%.6f cumulative_loss=%.6f wall_seconds=%.3f%s\n", rep.config.c_str(),
              rep.rounds, rep.final_error, rep.cumulative_loss, rep.wall_seconds,
              rep.failed ? (" failed: " + rep.failure).c_str() : "");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketched Online Newton experiments"};
  std::string data_path;
  std::string synthetic;
  std::string algo = "son-oja";
  std::string eta_mode = "curvature";
  std::string out_path;
  son::RunConfig cfg;
  long dim = 0;
  std::uint64_t seed = 1;
  bool sweep = false;
  bool track = false;

  auto* data_opt = app.add_option("--data", data_path, "svmlight/libsvm file, optionally gzip-compressed");
  auto* syn_opt = app.add_option("--synthetic", synthetic, "T,d,kappa for the ill-conditioned generator");
  data_opt->excludes(syn_opt);
  app.add_option("--algo", algo, "son-oja | son-fd | son-full | adagrad | ogd")
      ->check(CLI::IsMember({"son-oja", "son-fd", "son-full", "adagrad", "ogd"}));
  app.add_option("--sketch-size", cfg.m, "sketch size m (0 gives gradient descent)")->check(CLI::NonNegativeNumber);
  app.add_option("--alpha", cfg.alpha, "SON regularizer; 1/alpha is the stepsize");
  app.add_option("--eta", cfg.eta, "AdaGrad/OGD stepsize");
  app.add_option("--C", cfg.c, "prediction bound");
  app.add_option("--eta-mode", eta_mode, "convex | curvature")->check(CLI::IsMember({"convex", "curvature"}));
  app.add_flag("--diag-precondition", cfg.diag_precondition, "feed D^{-1/2} x with D the diagonal gradient sums");
  app.add_flag("--dense", cfg.dense, "use the dense SON implementations");
  app.add_flag("--sweep", sweep, "try stepsizes 2^j, j = -3..6, and report the best");
  app.add_option("--seed", seed, "generator seed");
  app.add_option("--dim", dim, "feature dimension (default: largest index in the file)");
  app.add_option("--checkpoint-every", cfg.checkpoint_every, "rounds between CSV rows")->check(CLI::PositiveNumber);
  app.add_option("--out", out_path, "CSV path for the checkpoint trace");
  app.add_flag("--track-eigs", track, "also trace Oja's eigenvalue recovery error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    if (data_path.empty() && synthetic.empty()) throw son::InvalidConfig("one of --data or --synthetic is required");
    cfg.algo = son::parse_algo(algo);
    cfg.eta_mode = eta_mode == "convex" ? son::EtaMode::kConvex : son::EtaMode::kCurvature;
    son::LossSpec::square(cfg.c);

    son::SourceFactory factory = synthetic.empty() ? son::file_source(data_path, dim)
                                                   : son::synthetic_source(parse_synthetic(synthetic, seed));
    // Fail on configuration problems before any long run starts.
    son::make_learner(cfg, factory()->dim());

    son::RunReport report;
    if (sweep) {
      const son::SweepResult res = son::run_sweep(cfg, factory);
      for (const auto& r : res.runs) print_summary(r);
      report = res.best_run();
      std::printf("best: ");
    } else {
      auto src = factory();
      report = son::run_experiment(cfg, *src);
    }
    print_summary(report);
    if (!out_path.empty()) write_csv(out_path, report);

    if (track) {
      auto src = factory();
      const son::Index m = cfg.m > 0 ? std::min<son::Index>(cfg.m, src->dim()) : std::min<son::Index>(10, src->dim());
      std::vector<long> marks;
      for (long t = cfg.checkpoint_every; t <= 100000; t += cfg.checkpoint_every) marks.push_back(t);
      const auto trace = son::eigen_recovery_track(*src, m, marks);
      for (const auto& c : trace) std::printf("eigs round=%ld max_relative_error=%.6f\n", c.round, c.max_relative_error);
      if (!out_path.empty()) write_eig_csv(out_path + ".eigs.csv", trace);
    }
  } catch (const son::InvalidConfig& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const son::ParseError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kDataError;
  } catch (const son::InvalidInput& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kDataError;
  }
  return 0;
}
