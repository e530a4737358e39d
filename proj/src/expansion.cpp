#include "smp/expansion.hpp"

namespace smp {

ExpandedVertices block_moment_matrices(const SmpVertexSet& s) {
  const Index n = s.n, m = s.m;
  ExpandedVertices e;
  e.n = n;
  e.m = m;
  const auto block = [n](const Mat& M, Index bi, Index bj) {
    return M.block(bi * n, bj * n, n, n);
  };
  for (const Mat& M : s.vertices) {
    Mat aa(n * n, n * n), ab(n * n, n * m), ba(n * n, n * m), bb(n * n, m * m);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) aa.col(n * j + i) = vec(block(M, i, j));
    for (Index j = 0; j < n; ++j)
      for (Index ip = 0; ip < m; ++ip) ab.col(m * j + ip) = vec(block(M, n + ip, j));
    for (Index jp = 0; jp < m; ++jp)
      for (Index i = 0; i < n; ++i) ba.col(n * jp + i) = vec(block(M, i, n + jp));
    for (Index jp = 0; jp < m; ++jp)
      for (Index ip = 0; ip < m; ++ip) bb.col(m * jp + ip) = vec(block(M, n + ip, n + jp));
    e.F_aa.push_back(std::move(aa));
    e.F_ab.push_back(std::move(ab));
    e.F_ba.push_back(std::move(ba));
    e.F_bb.push_back(std::move(bb));
  }
  return e;
}

Mat closed_loop_vertex(const ExpandedVertices& e, Index k, const Mat& K) {
  if (k < 0 || k >= e.N()) throw std::out_of_range("closed_loop_vertex: vertex index");
  if (K.rows() != e.m || K.cols() != e.n)
    throw std::invalid_argument("closed_loop_vertex: K must be m x n");
  const auto uk = static_cast<size_t>(k);
  const Mat I_n = Mat::Identity(e.n, e.n);
  Mat F = e.F_aa[uk];
  if (e.m > 0) {
    F -= e.F_ab[uk] * kron(I_n, K);
    F -= e.F_ba[uk] * kron(K, I_n);
    F += e.F_bb[uk] * kron(K, K);
  }
  return F;
}

Mat expanded_closed_loop(const ExpandedVertices& e, const WeightVector& w, const Mat& K) {
  if (w.w.size() != e.N())
    throw std::invalid_argument("expanded_closed_loop: weight count mismatch");
  Mat F = Mat::Zero(e.n * e.n, e.n * e.n);
  for (Index k = 0; k < e.N(); ++k) F += w.w(k) * closed_loop_vertex(e, k, K);
  return compress(F, e.n);
}

Vec lift_state(const Vec& x0) { return vech(x0 * x0.transpose()); }

ExpandedTrajectory propagate(const ExpandedVertices& e, const std::vector<WeightVector>& weights,
                             const Mat& K, const Vec& x_tilde0, int T) {
  if (T < 0) throw std::invalid_argument("propagate: T must be >= 0");
  if (x_tilde0.size() != e.en())
    throw std::invalid_argument("propagate: initial state has wrong dimension");
  const bool constant = weights.size() == 1;
  if (!constant && static_cast<int>(weights.size()) != T && T > 0)
    throw std::invalid_argument("propagate: need one weight vector or one per step");

  ExpandedTrajectory traj;
  traj.states.reserve(static_cast<size_t>(T) + 1);
  traj.states.push_back(x_tilde0);
  Mat C_const;
  if (constant && T > 0) C_const = expanded_closed_loop(e, weights.front(), K);
  for (int t = 0; t < T; ++t) {
    const WeightVector& w = constant ? weights.front() : weights[static_cast<size_t>(t)];
    traj.weights_used.push_back(w);
    const Mat C = constant ? C_const : expanded_closed_loop(e, w, K);
    traj.states.push_back(C * traj.states.back());
  }
  return traj;
}

}  // namespace smp
