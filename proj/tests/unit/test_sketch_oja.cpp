#include "helpers.hpp"
#include "son/errors.hpp"
#include "son/sketch_oja.hpp"

#include <doctest.h>

#include <cmath>

using namespace son;
using testing::max_abs;

TEST_CASE("Oja init") {
  const OjaSketch a(1.0, 2, 5);
  CHECK(a.basis() == Matrix::Identity(2, 5));
  CHECK(a.lambda() == Vector::Zero(2));
  CHECK(a.sketch() == Matrix::Zero(2, 5));
  CHECK(a.t() == 0);
  const OjaSketch b(2.0, 1, 3);
  CHECK(b.inverse_core()(0, 0) == 0.5);
  CHECK_THROWS_AS(OjaSketch(1.0, 4, 3), InvalidConfig);
  CHECK_THROWS_AS(OjaSketch(1.0, 0, 3), InvalidConfig);
  CHECK_THROWS_AS(OjaSketch(0.0, 1, 3), InvalidConfig);

  OjaOptions opt;
  opt.seed = 7;
  const OjaSketch r(1.0, 3, 6, opt);
  CHECK(max_abs(r.basis() * r.basis().transpose() - Matrix::Identity(3, 3)) < 1e-12);
  CHECK(r.basis() != Matrix::Identity(3, 6));
}

TEST_CASE("Oja fixed point") {
  const double alpha = 3.0;
  OjaSketch o(alpha, 1, 4);
  o.update(SparseVec(4, {0}, {1.0}));
  CHECK(o.lambda()[0] == 1.0);
  CHECK(o.basis() == Matrix::Identity(1, 4));
  CHECK(o.sketch() == Matrix::Identity(1, 4));
  CHECK(o.inverse_core()(0, 0) == doctest::Approx(1.0 / (alpha + 1.0)));
}

TEST_CASE("Oja with a vector orthogonal to the basis") {
  OjaOptions opt;
  opt.gamma = [](long, Index m) { return Vector::Constant(m, 0.1); };
  OjaSketch o(1.0, 2, 5, opt);
  o.update(SparseVec(5, {0, 1}, {1.0, 2.0}));
  const Matrix v = o.basis();
  const Vector lam = o.lambda();
  o.update(SparseVec(5, {3, 4}, {5.0, -1.0}));
  CHECK(max_abs(o.basis() - v) < 1e-15);
  CHECK(max_abs(o.lambda() - 0.9 * lam) < 1e-15);
}

TEST_CASE("Oja recovers the top eigenvalue of a known covariance") {
  // Covariance diag(4, 1, ..., 1).
  std::mt19937_64 rng(51);
  const Index d = 10;
  for (const bool seeded : {false, true}) {
    OjaOptions opt;
    if (seeded) opt.seed = 3;
    OjaSketch o(1.0, 1, d, opt);
    for (int t = 0; t < 2000; ++t) {
      Vector x = testing::gaussian(d, rng);
      x[0] *= 2.0;
      o.update(SparseVec::from_dense(x));
    }
    CHECK(std::abs(o.lambda()[0] - 4.0) <= 0.2 * 4.0);
    CHECK(std::abs(o.basis()(0, 0)) > 0.9);
  }
}

TEST_CASE("Oja invariants: orthonormal rows, bounded Λ, running mean") {
  std::mt19937_64 rng(52);
  for (const bool block : {false, true}) {
    const Index d = 15, m = 4;
    OjaOptions opt;
    opt.block = block;
    OjaSketch o(0.5, m, d, opt);
    Vector mean = Vector::Zero(m);
    double max_sq = 0.0;
    for (int t = 1; t <= 300; ++t) {
      const SparseVec g = testing::random_sparse(d, testing::uniform_int(1, 6, rng), rng);
      const Vector proj = o.basis() * g.to_dense();
      mean += (proj.cwiseProduct(proj) - mean) / static_cast<double>(t);
      max_sq = std::max(max_sq, g.squared_norm());
      o.update(g);
      CHECK(max_abs(o.basis() * o.basis().transpose() - Matrix::Identity(m, m)) < 1e-8);
      CHECK(o.lambda().minCoeff() >= 0.0);
      CHECK(o.lambda().maxCoeff() <= max_sq * (1 + 1e-12));
      CHECK(max_abs(o.lambda() - mean) < 1e-10 * std::max(1.0, max_sq));
      for (Index i = 0; i < m; ++i) {
        const double tl = t * o.lambda()[i];
        CHECK(o.inverse_core()(i, i) == doctest::Approx(1.0 / (0.5 + tl)));
        CHECK(max_abs(o.sketch().row(i) - std::sqrt(tl) * o.basis().row(i)) < 1e-12 * std::max(1.0, tl));
      }
    }
  }
}

TEST_CASE("block mode leaves the basis fixed between steps") {
  std::mt19937_64 rng(53);
  OjaOptions opt;
  opt.block = true;
  OjaSketch o(1.0, 3, 8, opt);
  const Matrix v0 = o.basis();
  o.update(testing::random_sparse(8, 4, rng));
  o.update(testing::random_sparse(8, 4, rng));
  CHECK(o.basis() == v0);
  o.update(testing::random_sparse(8, 4, rng));
  CHECK(o.basis() != v0);
}

TEST_CASE("orthonormalize_rows repairs rank loss") {
  Matrix v(3, 4);
  v << 1, 0, 0, 0,
       2, 0, 0, 0,
       0, 1, 1, 0;
  const int repaired = orthonormalize_rows(v);
  CHECK(repaired == 1);
  CHECK(max_abs(v * v.transpose() - Matrix::Identity(3, 3)) < 1e-12);
  CHECK(std::abs(v(1, 1)) == doctest::Approx(1.0));

  Matrix z = Matrix::Zero(2, 3);
  CHECK(orthonormalize_rows(z) == 2);
  CHECK(max_abs(z - Matrix::Identity(2, 3)) == 0.0);

  // Rows of the repaired Oja basis stay orthonormal when ĝ collapses two rows.
  OjaOptions opt;
  opt.gamma = [](long, Index m) { return Vector::Constant(m, 1e20); };
  OjaSketch o(1.0, 2, 3, opt);
  o.update(SparseVec(3, {0, 1}, {1.0, 1.0}));
  CHECK(max_abs(o.basis() * o.basis().transpose() - Matrix::Identity(2, 2)) < 1e-8);
}
