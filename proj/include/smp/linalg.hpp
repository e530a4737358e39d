#ifndef SMPSTAB_LINALG_HPP
#define SMPSTAB_LINALG_HPP

#include <Eigen/Dense>

#include <stdexcept>

// Dense small-matrix kernels used throughout the library: Kronecker products,
// column-major (de)vectorization, half-vectorization, the elimination and
// duplication matrices, the compression operator, and a deterministic
// symmetric eigendecomposition.
//
// Entry order is column-major everywhere (Eigen's default); vech stacks the
// lower triangle column by column. All downstream index formulas rely on this.

namespace smp {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

// n(n+1)/2 — the dimension of vech(S) for S in S^n.
inline Index half_dim(Index n) { return n * (n + 1) / 2; }

Mat kron(const Mat& A, const Mat& B);

// Column-stacking of X into a vector of length rows*cols.
Vec vec(const Mat& X);

// Inverse of vec for a known shape.
Mat unvec(const Vec& v, Index rows, Index cols);

// Lower-triangular columnwise stacking; requires a square argument.
Vec vech(const Mat& X);

// Builds the symmetric matrix whose lower triangle is v.
Mat unvech(const Vec& v);

// C_e (ñ × n²): C_e · vec(X) = vech(X) for every square X.
Mat elimination_matrix(Index n);

// C_d (n² × ñ): C_d · vech(S) = vec(S) for every symmetric S.
Mat duplication_matrix(Index n);

// The compression operator: Y (n²×n²) ↦ C_e · Y · C_d (ñ×ñ).
Mat compress(const Mat& Y, Index n);

inline Mat symmetrize(const Mat& X) { return 0.5 * (X + X.transpose()); }

struct SymEig {
  Vec values;   // sorted descending
  Mat vectors;  // unit columns, vectors.col(i) pairs with values(i)
};

// Cyclic Jacobi eigendecomposition of the symmetric part of Y.
//
// Deterministic: fixed row-cyclic sweep order, stable descending sort, and a
// fixed sign convention (the largest-magnitude component of each eigenvector
// is made positive; ties resolved by first occurrence). Throws
// std::runtime_error if the sweep cap is exceeded (does not happen for
// well-scaled symmetric input).
SymEig sym_eig(const Mat& Y);

// Smallest eigenvalue of the symmetric part of Y.
double min_eig(const Mat& Y);

// V · diag(sqrt(max(λ,0))) for Y = V diag(λ) Vᵀ: a factor R with R Rᵀ = Y
// after clamping tiny negative eigenvalues to zero. Used to sample Gaussians
// whose covariance may graze singularity.
Mat psd_factor(const Mat& Y);

}  // namespace smp

#endif
