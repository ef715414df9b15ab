#include "helpers.hpp"
#include "son/errors.hpp"
#include "son/sketch_fd.hpp"

#include <doctest.h>

#include <cmath>

using namespace son;
using testing::max_abs;

namespace {

Matrix gram_of(const Matrix& s) { return s.transpose() * s; }

double h_consistency(const Sketch& sk) {
  const Matrix& s = sk.sketch();
  const Index n = s.rows();
  const Matrix core = sk.alpha() * Matrix::Identity(n, n) + s * s.transpose();
  return max_abs(sk.inverse_core() * core - Matrix::Identity(n, n));
}

// Σ_{i>k} λᵢ(GᵀG)
double omega(const Matrix& cov, Index k) {
  const Vector ev = testing::eigen_values_desc(cov);
  return ev.tail(ev.size() - k).sum();
}

// Guarantee: 0 ⪯ GᵀG − SᵀS ⪯ (Σρ)·I.
void check_guarantee(const Matrix& cov, const Matrix& s, double shrink) {
  const Vector ev = testing::eigen_values_desc(cov - gram_of(s));
  const double tol = 1e-8 * std::max(1.0, cov.trace());
  CHECK(ev[ev.size() - 1] >= -tol);
  CHECK(ev[0] <= shrink + tol);
}

}  // namespace

TEST_CASE("FD init") {
  const FdSketch a(1.0, 2, 5);
  CHECK(a.sketch() == Matrix::Zero(2, 5));
  CHECK(a.inverse_core() == Matrix::Identity(2, 2));
  const FdSketch b(4.0, 3, 5);
  CHECK(b.inverse_core() == 0.25 * Matrix::Identity(3, 3));
  CHECK_THROWS_AS(FdSketch(0.0, 2, 5), InvalidConfig);
  CHECK_THROWS_AS(FdSketch(1.0, 1, 5), InvalidConfig);
  CHECK_THROWS_AS(EpochFdSketch(0.0, 2, 5), InvalidConfig);
  CHECK_THROWS_AS(EpochFdSketch(1.0, 6, 5), InvalidConfig);
}

TEST_CASE("FD two-step example") {
  const double alpha = 2.0;
  FdSketch fd(alpha, 2, 3);
  fd.update(SparseVec(3, {0}, {1.0}));
  CHECK(std::abs(fd.sketch()(0, 0)) == doctest::Approx(1.0));
  CHECK(max_abs(fd.sketch().row(1)) == 0.0);
  CHECK(fd.inverse_core()(0, 0) == doctest::Approx(1.0 / (alpha + 1.0)));
  CHECK(fd.inverse_core()(1, 1) == doctest::Approx(1.0 / alpha));
  CHECK(fd.diagnostics().rho.back() == doctest::Approx(0.0));

  fd.update(SparseVec(3, {1}, {1.0}));
  CHECK(fd.diagnostics().rho.back() == doctest::Approx(1.0));
  CHECK(max_abs(fd.sketch()) < 1e-12);
  CHECK(max_abs(fd.inverse_core() - Matrix::Identity(2, 2) / alpha) < 1e-12);
}

TEST_CASE("FD guarantee, shrink bound and state invariants on random streams") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const Index d = 10, m = 4;
    FdSketch fd(1.5, m, d);
    EpochFdSketch ep(1.5, m, d);
    Matrix cov = Matrix::Zero(d, d);
    double last_shrink = 0.0;
    for (int t = 0; t < 50; ++t) {
      const SparseVec g = testing::random_sparse(d, testing::uniform_int(1, d, rng), rng);
      const Vector gd = g.to_dense();
      cov += gd * gd.transpose();
      fd.update(g);
      ep.update(g);

      const Matrix& s = fd.sketch();
      const Matrix rows = s * s.transpose();
      CHECK(max_abs(rows - Matrix(rows.diagonal().asDiagonal())) < 1e-8 * std::max(1.0, rows.trace()));
      CHECK(max_abs(s.row(m - 1)) == 0.0);
      for (Index i = 0; i < m; ++i)
        CHECK(fd.inverse_core()(i, i) == doctest::Approx(1.0 / (1.5 + s.row(i).squaredNorm())));
      CHECK(h_consistency(fd) < 1e-6);
      CHECK(h_consistency(ep) < 1e-6);
      CHECK(fd.diagnostics().cumulative_shrink >= last_shrink);
      last_shrink = fd.diagnostics().cumulative_shrink;

      check_guarantee(cov, fd.sketch(), fd.diagnostics().cumulative_shrink);
      check_guarantee(cov, ep.sketch(), ep.diagnostics().cumulative_shrink);
    }
    for (Index k = 0; k < m; ++k) {
      const double bound = omega(cov, k) / static_cast<double>(m - k);
      CHECK(fd.diagnostics().cumulative_shrink <= bound * (1 + 1e-9));
      CHECK(ep.diagnostics().cumulative_shrink <= bound * (1 + 1e-9));
    }
  }
}

TEST_CASE("epoch FD: first insert matches a direct inverse") {
  EpochFdSketch ep(1.0, 2, 3);
  ep.update(SparseVec(3, {0}, {1.0}));
  Matrix s = Matrix::Zero(4, 3);
  s(2, 0) = 1.0;
  CHECK(max_abs(ep.sketch() - s) == 0.0);
  const Matrix direct = (Matrix::Identity(4, 4) + s * s.transpose()).inverse();
  CHECK(max_abs(ep.inverse_core() - direct) < 1e-12);
  CHECK(ep.tau() == 2);
}

TEST_CASE("epoch FD: zero insert only advances the slot") {
  std::mt19937_64 rng(42);
  EpochFdSketch ep(1.0, 3, 6);
  ep.update(testing::random_sparse(6, 3, rng));
  const Matrix s = ep.sketch();
  const Matrix h = ep.inverse_core();
  ep.update(SparseVec(6));
  CHECK(ep.sketch() == s);
  CHECK(max_abs(ep.inverse_core() - h) == 0.0);
  CHECK(ep.tau() == 3);
}

TEST_CASE("epoch FD agrees with per-round FD where neither loses mass differently") {
  std::mt19937_64 rng(43);
  SUBCASE("first epoch") {
    const Index d = 9, m = 4;
    FdSketch fd(1.0, m, d);
    EpochFdSketch ep(1.0, m, d);
    for (Index t = 0; t < m; ++t) {
      const SparseVec g = testing::random_sparse(d, 5, rng);
      fd.update(g);
      ep.update(g);
    }
    CHECK(ep.tau() == 1);
    CHECK(max_abs(gram_of(fd.sketch()) - gram_of(ep.sketch())) < 1e-8);
    CHECK(fd.diagnostics().cumulative_shrink == doctest::Approx(ep.diagnostics().cumulative_shrink));
  }
  SUBCASE("low-rank stream") {
    const Index d = 12, m = 4;
    const Matrix basis = testing::gaussian(m - 1, d, rng);
    FdSketch fd(1.0, m, d);
    EpochFdSketch ep(1.0, m, d);
    Matrix cov = Matrix::Zero(d, d);
    for (int t = 0; t < 40; ++t) {
      const Vector g = basis.transpose() * testing::gaussian(m - 1, rng);
      cov += g * g.transpose();
      fd.update(SparseVec::from_dense(g));
      ep.update(SparseVec::from_dense(g));
      if (ep.tau() == 1) {
        const double tol = 1e-8 * cov.trace();
        CHECK(max_abs(gram_of(ep.sketch()) - cov) < tol);
        CHECK(max_abs(gram_of(fd.sketch()) - gram_of(ep.sketch())) < tol);
      }
    }
  }
}

TEST_CASE("compute_eigensystem") {
  std::mt19937_64 rng(44);
  SUBCASE("G = 0") {
    const Matrix v = testing::random_orthonormal_rows(3, 8, rng);
    Vector dv(3);
    dv << 3.0, 2.0, 0.5;
    const EigenSystem es = compute_eigensystem(dv, v, Matrix::Zero(3, 8));
    CHECK(max_abs(es.sigma - dv.cwiseProduct(dv)) < 1e-12);
    for (Index i = 0; i < 3; ++i) CHECK(std::abs(std::abs(es.v.row(i).dot(v.row(i))) - 1.0) < 1e-12);
  }
  SUBCASE("D = 0, orthonormal G") {
    const Matrix v = testing::random_orthonormal_rows(3, 8, rng);
    const Matrix g = testing::random_orthonormal_rows(3, 8, rng);
    const EigenSystem es = compute_eigensystem(Vector::Zero(3), v, g);
    CHECK(max_abs(es.sigma - Vector::Ones(3)) < 1e-10);
    CHECK(testing::row_space_distance(es.v, g) < 1e-10);
  }
  SUBCASE("random against a dense eigensolver") {
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix v = testing::random_orthonormal_rows(3, 8, rng);
      const Vector dv = testing::gaussian(3, rng).cwiseAbs();
      const Matrix g = testing::gaussian(3, 8, rng);
      Matrix s(6, 8);
      s << dv.asDiagonal() * v, g;
      const Matrix cov = gram_of(s);
      const EigenSystem es = compute_eigensystem(dv, v, g);
      CHECK(max_abs(es.sigma - testing::eigen_values_desc(cov).head(3)) < 1e-8);
      CHECK(max_abs(es.v * es.v.transpose() - Matrix::Identity(3, 3)) < 1e-10);
      for (Index i = 0; i < 3; ++i)
        CHECK(max_abs(cov * es.v.row(i).transpose() - es.sigma[i] * es.v.row(i).transpose()) < 1e-8);
    }
  }
  SUBCASE("G inside the span of V") {
    const Matrix v = testing::random_orthonormal_rows(3, 8, rng);
    const Matrix g = testing::gaussian(2, 3, rng) * v;
    Vector dv(3);
    dv << 1.0, 1.0, 1.0;
    Matrix s(5, 8);
    s << v, g;
    const EigenSystem es = compute_eigensystem(dv, v, g);
    CHECK(max_abs(es.sigma - testing::eigen_values_desc(gram_of(s)).head(3)) < 1e-8);
  }
}
