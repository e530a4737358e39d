#ifndef SMPSTAB_SIMULATE_HPP
#define SMPSTAB_SIMULATE_HPP

#include "smp/linalg.hpp"
#include "smp/rng.hpp"

#include <cstdint>
#include <utility>
#include <vector>

// Monte Carlo side of the pipeline: draw (A_t, B_t) from a Gaussian family
// conditioned on the weight parameter θ, roll closed-loop trajectories
// x_{t+1} = (A_t − B_t K) x_t, and estimate second moments / decay rates.
// Estimates here are what the deterministic expanded system predicts exactly.

namespace smp {

// How the conditional covariance depends on θ. The mean is always the
// convex combination Σ_k θ_k μ^(k).
//   Affine:              cov(θ) = Σ_k θ_k Σ^(k)
//     (one Gaussian whose parameters move with θ: uncertain mean/covariance
//      systems, covariance polytopes, i.i.d. systems, and — with zero
//      covariances — deterministic parameter polytopes)
//   IndependentVertices: cov(θ) = Σ_k θ_k² Σ^(k)
//     (v = Σ_k θ_k v^(k) with independent per-vertex Gaussians v^(k))
enum class CovarianceLaw { Affine, IndependentVertices };

struct ParametricGaussian {
  Index n = 0, m = 0;
  Index d_theta = 0;
  std::vector<Vec> means;        // d_theta vectors, each of length n(n+m)
  std::vector<Mat> covariances;  // d_theta PSD matrices, n(n+m) square
  CovarianceLaw law = CovarianceLaw::Affine;

  Index vdim() const { return n * (n + m); }
  Vec mean_at(const Vec& theta) const;
  Mat cov_at(const Vec& theta) const;
};

// One draw v = vec([A, B]) ~ N(mean(θ), cov(θ)), reshaped column-wise.
std::pair<Mat, Mat> sample_system(const ParametricGaussian& d, const Vec& theta, RngStream& rng);

struct TrajectoryEnsemble {
  Index n = 0;
  int T = 0;
  std::uint64_t seed = 0;
  bool controlled = false;
  Mat K;                                // m×n when controlled
  std::vector<Vec> theta_seq;           // θ driving step t → t+1; length T
  std::vector<std::vector<Vec>> paths;  // [path][t], t = 0..T

  Index M() const { return Index(paths.size()); }
};

// M independent closed-loop paths over horizon T. theta_seq may hold a
// single θ (held constant) or exactly T entries. Pass K with zero rows (or
// controlled=false via an empty 0×n matrix) for the uncontrolled system.
// Bitwise reproducible for a given seed; the per-(path, t) covariance factor
// is shared across paths since θ_t is common to all of them.
TrajectoryEnsemble simulate(const ParametricGaussian& d, const Vec& x0, const Mat& K,
                            const std::vector<Vec>& theta_seq, int T, Index M,
                            std::uint64_t seed);

// Sample mean of vech(x_t x_tᵀ) across paths with per-component standard
// errors (zero when M < 2).
std::pair<Vec, Vec> empirical_second_moment(const TrajectoryEnsemble& ens, int t);

struct DecayFit {
  double beta_hat = 0.0;   // exp(slope) of the log √(mean ‖x_t‖²) fit
  double intercept = 0.0;  // fitted value at t = t_begin
  int t_begin = 0, t_end = 0;
  Index points_used = 0;
};

// Least-squares fit of log √(E‖x_t‖²) against t over [t_begin, t_end]
// (t_end < 0 means the full horizon). Throws when fewer than two steps carry
// positive mass — a decay rate is meaningless for identically-zero states.
DecayFit estimate_decay_rate(const TrajectoryEnsemble& ens, int t_begin = 0, int t_end = -1);

}  // namespace smp

#endif
