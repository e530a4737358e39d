#include "smp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace smp {

Mat kron(const Mat& A, const Mat& B) {
  Mat out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index j = 0; j < A.cols(); ++j)
    for (Index i = 0; i < A.rows(); ++i)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

Vec vec(const Mat& X) {
  return Eigen::Map<const Vec>(X.data(), X.size());
}

Mat unvec(const Vec& v, Index rows, Index cols) {
  if (v.size() != rows * cols)
    throw std::invalid_argument("unvec: length does not match target shape");
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

Vec vech(const Mat& X) {
  if (X.rows() != X.cols()) throw std::invalid_argument("vech: matrix must be square");
  const Index n = X.rows();
  Vec out(half_dim(n));
  Index r = 0;
  for (Index j = 0; j < n; ++j)
    for (Index i = j; i < n; ++i) out(r++) = X(i, j);
  return out;
}

Mat unvech(const Vec& v) {
  // Solve n(n+1)/2 = len for n.
  const Index len = v.size();
  const Index n = static_cast<Index>((std::sqrt(8.0 * static_cast<double>(len) + 1.0) - 1.0) / 2.0 + 0.5);
  if (half_dim(n) != len) throw std::invalid_argument("unvech: length is not triangular");
  Mat S(n, n);
  Index r = 0;
  for (Index j = 0; j < n; ++j)
    for (Index i = j; i < n; ++i) {
      S(i, j) = v(r);
      S(j, i) = v(r);
      ++r;
    }
  return S;
}

Mat elimination_matrix(Index n) {
  if (n < 1) throw std::invalid_argument("elimination_matrix: n must be >= 1");
  Mat C = Mat::Zero(half_dim(n), n * n);
  Index r = 0;
  for (Index j = 0; j < n; ++j)
    for (Index i = j; i < n; ++i) C(r++, j * n + i) = 1.0;
  return C;
}

Mat duplication_matrix(Index n) {
  if (n < 1) throw std::invalid_argument("duplication_matrix: n must be >= 1");
  Mat D = Mat::Zero(n * n, half_dim(n));
  Index r = 0;
  for (Index j = 0; j < n; ++j)
    for (Index i = j; i < n; ++i) {
      D(j * n + i, r) = 1.0;
      D(i * n + j, r) = 1.0;  // same entry when i == j
      ++r;
    }
  return D;
}

Mat compress(const Mat& Y, Index n) {
  if (Y.rows() != n * n || Y.cols() != n * n)
    throw std::invalid_argument("compress: Y must be n^2 x n^2");
  return elimination_matrix(n) * Y * duplication_matrix(n);
}

SymEig sym_eig(const Mat& Y) {
  if (Y.rows() != Y.cols()) throw std::invalid_argument("sym_eig: matrix must be square");
  const Index n = Y.rows();
  Mat A = symmetrize(Y);
  Mat V = Mat::Identity(n, n);
  if (n == 0) return {Vec(0), V};

  const double scale = std::max(A.norm(), 1e-300);
  const double off_tol = 1e-14 * scale;
  const int max_sweeps = 64;

  auto off_norm = [&]() {
    double s = 0.0;
    for (Index j = 0; j < n; ++j)
      for (Index i = j + 1; i < n; ++i) s += A(i, j) * A(i, j);
    return std::sqrt(2.0 * s);
  };

  int sweep = 0;
  while (off_norm() > off_tol) {
    if (++sweep > max_sweeps)
      throw std::runtime_error("sym_eig: Jacobi sweep cap exceeded");
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        const double tau = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // A <- Jᵀ A J with the Givens rotation J acting on (p, q).
        for (Index k = 0; k < n; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        A(p, q) = 0.0;
        A(q, p) = 0.0;
        for (Index k = 0; k < n; ++k) {
          const double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return A(a, a) > A(b, b); });

  SymEig out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    out.values(i) = A(order[static_cast<size_t>(i)], order[static_cast<size_t>(i)]);
    Vec col = V.col(order[static_cast<size_t>(i)]);
    col.normalize();
    // Sign convention: largest-magnitude component positive, first index wins ties.
    Index imax = 0;
    double best = -1.0;
    for (Index k = 0; k < n; ++k) {
      if (std::abs(col(k)) > best) {
        best = std::abs(col(k));
        imax = k;
      }
    }
    if (col(imax) < 0.0) col = -col;
    out.vectors.col(i) = col;
  }
  return out;
}

double min_eig(const Mat& Y) {
  const SymEig e = sym_eig(Y);
  return e.values.size() > 0 ? e.values(e.values.size() - 1) : 0.0;
}

Mat psd_factor(const Mat& Y) {
  const SymEig e = sym_eig(Y);
  Mat R = e.vectors;
  for (Index i = 0; i < e.values.size(); ++i)
    R.col(i) *= std::sqrt(std::max(e.values(i), 0.0));
  return R;
}

}  // namespace smp
