#include "helpers.hpp"
#include "son/baselines.hpp"
#include "son/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace son;
using testing::max_abs;

namespace {

SonConfig config(double alpha, LossSpec loss) {
  SonConfig cfg;
  cfg.alpha = alpha;
  cfg.loss = loss;
  return cfg;
}

// Absolute-linear loss with a label beyond C: ℓ′ = −1 whenever |z| <= C.
constexpr double kFarLabel = 10.0;

}  // namespace

TEST_CASE("AdaGrad examples") {
  const LossSpec al = LossSpec::absolute_linear(1.0);
  AdaGrad a(3, al, 0.5);
  const SparseVec e1(3, {0}, {1.0});
  a.predict(e1);
  a.update(kFarLabel);  // g = −e₁
  CHECK(a.weights()[0] == doctest::Approx(0.5));
  CHECK(a.weights()[1] == 0.0);
  CHECK(a.accumulator()[0] == 1.0);

  a.predict(e1);
  a.update(kFarLabel);
  CHECK(a.weights()[0] == doctest::Approx(0.5 + 0.5 / std::sqrt(2.0)));

  // Zero gradient: prediction equals the label under square loss.
  AdaGrad b(3, LossSpec::square(1.0), 0.5);
  const double p = b.predict(SparseVec(3, {1}, {2.0}));
  b.update(p);
  CHECK(max_abs(b.weights()) == 0.0);
  CHECK(max_abs(b.accumulator()) == 0.0);

  CHECK_THROWS_AS(AdaGrad(3, al, 0.0), InvalidConfig);
  CHECK_THROWS_AS(Ogd(3, al, -1.0), InvalidConfig);
}

TEST_CASE("AdaGrad matches a per-coordinate oracle") {
  std::mt19937_64 rng(91);
  const LossSpec sq = LossSpec::square(1.0);
  AdaGrad a(10, sq, 0.3);
  Vector w = Vector::Zero(10), acc = Vector::Zero(10);
  for (int t = 0; t < 200; ++t) {
    const SparseVec x = testing::random_sparse(10, 3, rng);
    const double y = testing::uniform(-1.0, 1.0, rng);
    const double z = x.dot(w);
    CHECK(a.predict(x) == doctest::Approx(z).epsilon(1e-12));
    const double dl = a.update(y).dloss;
    const Vector g = dl * x.to_dense();
    acc += g.cwiseProduct(g);
    for (Index i = 0; i < 10; ++i)
      if (acc[i] > 0.0) w[i] -= 0.3 * g[i] / std::sqrt(acc[i]);
    CHECK(max_abs(a.weights() - w) < 1e-12);
    CHECK(max_abs(a.accumulator() - acc) == 0.0);
  }
}

TEST_CASE("OGD examples and agreement with unprojected m = 0 SON") {
  const LossSpec al = LossSpec::absolute_linear(1.0);
  Ogd o(2, al, 0.25);
  const SparseVec x(2, {0, 1}, {1.0, 2.0});
  CHECK(o.predict(x) == 0.0);
  o.update(kFarLabel);
  CHECK(o.weights()[0] == doctest::Approx(0.25));
  CHECK(o.weights()[1] == doctest::Approx(0.5));

  // With a small stepsize the projection never binds and SON with m = 0
  // and η = 1/α is the same learner.
  std::mt19937_64 rng(92);
  const double alpha = 400.0;
  Ogd ogd(8, LossSpec::square(1.0), 1.0 / alpha);
  SketchedNewton son(8, config(alpha, LossSpec::square(1.0)), nullptr);
  for (int t = 0; t < 200; ++t) {
    const SparseVec xt = testing::random_sparse(8, 3, rng);
    const double y = testing::uniform(-1.0, 1.0, rng);
    const double a = ogd.predict(xt);
    const double b = son.predict(xt);
    REQUIRE(std::abs(a) < 1.0);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    ogd.update(y);
    son.update(y);
  }
}

TEST_CASE("diagonal preconditioning examples") {
  const LossSpec al = LossSpec::absolute_linear(1.0);
  DiagonalPreconditioned l(std::make_unique<AdaGrad>(3, al, 0.1));
  const SparseVec x(3, {0, 2}, {1.0, 3.0});
  const SparseVec t1 = l.transform(x);
  CHECK(t1.value(0) == doctest::Approx(1.0 / std::sqrt(0.1)));
  CHECK(t1.value(1) == doctest::Approx(3.0 / std::sqrt(0.1)));

  const SparseVec e1(3, {0}, {1.0});
  for (int i = 0; i < 3; ++i) {
    l.predict(e1);
    l.update(kFarLabel);  // original-space gradient −e₁
  }
  CHECK(l.diagonal()[0] == doctest::Approx(3.1));
  CHECK(l.diagonal()[1] == DiagonalPreconditioned::kInitialDiagonal);
  CHECK(l.transform(e1).value(0) == doctest::Approx(1.0 / std::sqrt(3.1)));
  CHECK(l.rounds() == 3);
  CHECK(l.inner().rounds() == 3);
}

TEST_CASE("diagonal preconditioning makes m = 0 SON scale invariant") {
  // Scaling x by s and D_1 by s² leaves every transformed input, and so
  // every prediction, unchanged.
  std::mt19937_64 rng(93);
  const Index d = 20;
  Vector scale(d);
  for (Index i = 0; i < d; ++i) scale[i] = std::exp(testing::uniform(std::log(0.5), std::log(20.0), rng));
  const Vector theta = testing::gaussian(d, rng);
  const SonConfig cfg = config(1.0, LossSpec::square(1.0));
  const Vector d1 = Vector::Constant(d, DiagonalPreconditioned::kInitialDiagonal);
  DiagonalPreconditioned plain(std::make_unique<SketchedNewton>(d, cfg, nullptr));
  DiagonalPreconditioned scaled(std::make_unique<SketchedNewton>(d, cfg, nullptr),
                                d1.cwiseProduct(scale).cwiseProduct(scale));
  double gap = 0.0;
  int mismatches = 0;
  for (int t = 0; t < 500; ++t) {
    const Vector x = testing::gaussian(d, rng);
    const double y = theta.dot(x) >= 0 ? 1.0 : -1.0;
    const double a = plain.predict(SparseVec::from_dense(x));
    const double b = scaled.predict(SparseVec::from_dense(scale.cwiseProduct(x)));
    gap = std::max(gap, std::abs(a - b));
    if ((a >= 0) != (b >= 0)) ++mismatches;
    plain.update(y);
    scaled.update(y);
  }
  CHECK(gap < 1e-9);
  CHECK(mismatches == 0);
  CHECK(max_abs(scaled.diagonal() - plain.diagonal().cwiseProduct(scale).cwiseProduct(scale)) <
        1e-9 * max_abs(scaled.diagonal()));
  CHECK_THROWS_AS(DiagonalPreconditioned(std::make_unique<SketchedNewton>(d, cfg, nullptr), Vector::Zero(d)),
                  InvalidConfig);
}
