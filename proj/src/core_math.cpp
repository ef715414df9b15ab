#include "son/core_math.hpp"

#include "son/errors.hpp"

#include <algorithm>
#include <numeric>

namespace son {

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidInput("SymMatrix: matrix is not square");
  a_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(Index n) {
  SymMatrix s(n);
  s.a_.setIdentity();
  return s;
}

namespace {

// Full cyclic Jacobi. On return a is (numerically) diagonal and the columns
// of v are the eigenvectors.
void jacobi(Matrix& a, Matrix& v) {
  const Index n = a.rows();
  v = Matrix::Identity(n, n);
  const double scale = a.norm();
  if (scale == 0.0) return;
  const double stop = 1e-14 * scale;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off) <= stop) return;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Index r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double g = a(r, p);
          const double h = a(r, q);
          a(r, p) = a(p, r) = c * g - s * h;
          a(r, q) = a(q, r) = s * g + c * h;
        }
        for (Index r = 0; r < n; ++r) {
          const double g = v(r, p);
          const double h = v(r, q);
          v(r, p) = c * g - s * h;
          v(r, q) = s * g + c * h;
        }
      }
    }
  }
}

template <class Inner>
Decomposition gram_schmidt(const Matrix& p, const DecomposeOptions& opt, Inner inner) {
  const Index m = p.rows();
  const Index n = p.cols();
  Matrix q(m, n);
  Matrix l = Matrix::Zero(m, m);
  Index r = 0;
  for (Index i = 0; i < m; ++i) {
    Vector beta = p.row(i).transpose();
    const double pp = inner(beta, beta);
    const double pnorm2 = std::max(pp, 0.0);
    if (pp < -1e-10 * std::max(1.0, beta.squaredNorm())) throw InvalidInput("decompose: K is not PSD");
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j < r; ++j) {
        const double coef = inner(q.row(j).transpose(), beta);
        l(i, j) += coef;
        beta.noalias() -= coef * q.row(j).transpose();
      }
    }
    const double c2 = inner(beta, beta);
    if (c2 < -1e-8 * std::max(pnorm2, 1e-300)) throw InvalidInput("decompose: K is not PSD");
    const double c = std::sqrt(std::max(c2, 0.0));
    if (c <= std::max(opt.rel_tol * std::sqrt(pnorm2), opt.abs_floor) || c == 0.0) continue;
    q.row(r) = beta.transpose() / c;
    l(i, r) = c;
    ++r;
  }
  return {l.leftCols(r), q.topRows(r)};
}

}  // namespace

EigPairs top_k_eig(const SymMatrix& b, Index k) {
  const Index n = b.n();
  if (k < 1 || k > n) throw InvalidInput("top_k_eig: k out of range");
  if (!b.matrix().allFinite()) throw InvalidInput("top_k_eig: non-finite entry");
  Matrix a = b.matrix();
  Matrix v;
  jacobi(a, v);
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return a(i, i) > a(j, j); });
  EigPairs out{Vector(k), Matrix(k, n)};
  for (Index i = 0; i < k; ++i) {
    out.values[i] = a(order[i], order[i]);
    Vector col = v.col(order[i]);
    col /= col.norm();
    for (Index j = 0; j < n; ++j) {
      if (std::abs(col[j]) > 1e-12) {
        if (col[j] < 0.0) col = -col;
        break;
      }
    }
    out.vectors.row(i) = col.transpose();
  }
  return out;
}

Decomposition decompose(const Matrix& p, const SymMatrix& k, const DecomposeOptions& opt) {
  if (p.cols() != k.n()) throw InvalidInput("decompose: P and K dimensions differ");
  if (!p.allFinite() || !k.matrix().allFinite()) throw InvalidInput("decompose: non-finite entry");
  const Matrix& km = k.matrix();
  return gram_schmidt(p, opt, [&](const Vector& a, const Vector& b) { return a.dot(km * b); });
}

Decomposition decompose_euclidean(const Matrix& r, const DecomposeOptions& opt) {
  if (!r.allFinite()) throw InvalidInput("decompose: non-finite entry");
  return gram_schmidt(r, opt, [](const Vector& a, const Vector& b) { return a.dot(b); });
}

PseudoInverse pseudo_inverse(const SymMatrix& a, double cutoff_rel) {
  const Index n = a.n();
  EigPairs e = top_k_eig(a, n);
  const double top = std::max(e.values[0], 0.0);
  PseudoInverse out{Matrix::Zero(n, n), Matrix::Zero(n, n)};
  if (top == 0.0) return out;
  for (Index i = 0; i < n; ++i) {
    if (e.values[i] <= cutoff_rel * top) continue;
    const Vector vi = e.vectors.row(i).transpose();
    out.pinv.noalias() += (1.0 / e.values[i]) * vi * vi.transpose();
    out.range.noalias() += vi * vi.transpose();
  }
  return out;
}

}  // namespace son
