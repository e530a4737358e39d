#ifndef SMPSTAB_EXPANSION_HPP
#define SMPSTAB_EXPANSION_HPP

#include "smp/model.hpp"

#include <vector>

// The expanded deterministic system.
//
// For each vertex M^(k), four block-moment matrices are extracted so that the
// closed-loop second-moment map E[(A-BK) ⊗ (A-BK) | vertex k] becomes the
// matrix polynomial F^(k)(K) = F_aa - F_ab(I⊗K) - F_ba(K⊗I) + F_bb(K⊗K).
// Compressing Σ_k w_k F^(k)(K) with the elimination/duplication pair yields
// the ñ×ñ transition matrix that propagates x̃_t = E[vech(x_t x_tᵀ)].

namespace smp {

struct ExpandedVertices {
  Index n = 0, m = 0;
  std::vector<Mat> F_aa;  // n² × n²
  std::vector<Mat> F_ab;  // n² × nm
  std::vector<Mat> F_ba;  // n² × nm
  std::vector<Mat> F_bb;  // n² × m²

  Index N() const { return static_cast<Index>(F_aa.size()); }
  Index en() const { return half_dim(n); }
};

// Extracts the four block-moment matrices from every vertex.
//
// M^(k) is read as an (n+m)×(n+m) grid of n×n blocks M_{i,j} (v = vec([A,B])
// stacks n+m column chunks of length n). With 0-based block indices
// i,j ∈ [0,n) and i',j' ∈ [0,m):
//   F_aa column n·j  + i   = vec(M_{i,    j   })
//   F_ab column m·j  + i'  = vec(M_{n+i', j   })
//   F_ba column n·j' + i   = vec(M_{i,    n+j'})
//   F_bb column m·j' + i'  = vec(M_{n+i', n+j'})
// so that at a deterministic vertex vvᵀ they reduce to A⊗A, A⊗B, B⊗A, B⊗B.
ExpandedVertices block_moment_matrices(const SmpVertexSet& s);

// F^(k)(K) (uncompressed, n²×n²). K is m×n; k is 0-based.
Mat closed_loop_vertex(const ExpandedVertices& e, Index k, const Mat& K);

// compress(Σ_k w_k F^(k)(K)): the ñ×ñ expanded transition matrix.
Mat expanded_closed_loop(const ExpandedVertices& e, const WeightVector& w, const Mat& K);

// x̃_0 = vech(x0 x0ᵀ).
Vec lift_state(const Vec& x0);

struct ExpandedTrajectory {
  std::vector<Vec> states;          // x̃_0 .. x̃_T, each of length ñ
  std::vector<WeightVector> weights_used;  // the weight applied at each step
};

// Propagates x̃_{t+1} = expanded_closed_loop(e, weights_t, K) · x̃_t for T
// steps. `weights` may hold a single entry (reused every step) or exactly T
// entries (one per step).
ExpandedTrajectory propagate(const ExpandedVertices& e, const std::vector<WeightVector>& weights,
                             const Mat& K, const Vec& x_tilde0, int T);

}  // namespace smp

#endif
