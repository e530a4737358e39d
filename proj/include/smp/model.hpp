#ifndef SMPSTAB_MODEL_HPP
#define SMPSTAB_MODEL_HPP

#include "smp/linalg.hpp"

#include <string>
#include <vector>

// Second-moment polytopic (SMP) vertex sets.
//
// A model is a family of symmetric matrices M^(k) of size n(n+m) together
// with a weight map φ taking the uncertain parameter θ into the probability
// simplex, such that E[v vᵀ | θ] = Σ_k [φ(θ)]_k M^(k) for v = vec([A, B]).
// The constructors below build vertex sets for the concrete system classes
// the library supports (i.i.d. systems, deterministic and random polytopes
// of system matrices, uncertain mean/covariance families, and a fixed mean
// with a polytope of covariances).

namespace smp {

enum class TimeVariation { TI, TV };

enum class WeightKind {
  Unit,            // N = 1, φ(θ) ≡ [1]
  Identity,        // N = d, φ(θ) = θ
  QuadraticOuter,  // N = d², φ(θ) = vec(θθᵀ)
};

struct WeightVector {
  Vec w;  // nonnegative, sums to one
};

// Validates simplex membership (tolerance `tol`), clamps tiny negatives to
// zero, and renormalizes rounding in the sum. Throws std::invalid_argument
// when the vector is outside the simplex beyond tolerance.
WeightVector make_weights(const Vec& raw, double tol = 1e-9);

bool in_simplex(const Vec& theta, double tol = 1e-9);

// φ(θ) = vec(θθᵀ) for θ in the d-simplex; the weight map of the d² vertex
// classes. Entries are θ_i θ_j laid out column-major, so entry d·j + i pairs
// with vertex index d·j + i.
WeightVector phi_quadratic(const Vec& theta);

struct SmpVertexSet {
  Index n = 0;  // state dimension
  Index m = 0;  // input dimension
  std::vector<Mat> vertices;  // N symmetric matrices, each n(n+m) square
  TimeVariation time_variation = TimeVariation::TI;
  WeightKind weight_kind = WeightKind::Unit;
  Index d_theta = 1;  // dimension of θ for the weight map

  Index N() const { return static_cast<Index>(vertices.size()); }
  Index vdim() const { return n * (n + m); }
  Index en() const { return half_dim(n); }  // expanded state dimension ñ

  // Applies this model's weight map to θ.
  WeightVector weights_for(const Vec& theta) const;

  // Σ_k w_k M^(k).
  Mat combine(const WeightVector& w) const;
};

struct ModelDiagnostics {
  std::vector<std::string> errors;    // dimension/symmetry violations
  std::vector<std::string> warnings;  // PSD diagnostics (informational)
  bool ok() const { return errors.empty(); }
};

// Report-only validation: dimension consistency, symmetry of each vertex,
// and (diagnostic, not an error) PSD-ness of each vertex and of the simplex
// corner combinations. Individual vertices of the d² classes are symmetrized
// cross moments and legitimately need not be PSD.
ModelDiagnostics validate(const SmpVertexSet& s);

struct UncertainMeanCov {
  Index n = 0, m = 0, d_theta = 0;
  std::vector<Vec> means;        // d_theta vectors of length n(n+m)
  std::vector<Mat> covariances;  // d_theta symmetric PSD matrices n(n+m) square
};

// N = 1 vertex: the given second moment E[v vᵀ] itself.
SmpVertexSet from_iid(const Mat& second_moment, Index n, Index m);

// Deterministic polytope of system matrices: vertices are the symmetrized
// outer products M^(d·j+i) = (v^(i) v^(j)ᵀ + v^(j) v^(i)ᵀ)/2 (0-based i, j),
// with weights φ(θ) = vec(θθᵀ).
SmpVertexSet from_deterministic_polytope(const std::vector<Vec>& vertex_vectors,
                                         Index n, Index m);

// Random polytope of system matrices: cross_moments[i][j] = E[v^(i) v^(j)ᵀ];
// vertices are the symmetrized cross moments with weights vec(θθᵀ).
SmpVertexSet from_random_polytope(const std::vector<std::vector<Mat>>& cross_moments,
                                  Index n, Index m);

// Cross moments of independently sampled vertex systems v^(k) ~ (μ^(k), Σ^(k)):
// C_ij = μ^(i)μ^(j)ᵀ + δ_ij Σ^(i). Feeds from_random_polytope; matches the
// independent-vertices sampling law of the Monte Carlo side.
std::vector<std::vector<Mat>> independent_cross_moments(const std::vector<Vec>& means,
                                                        const std::vector<Mat>& covariances);

// Uncertain mean and covariance: v | θ has mean Σ_k θ_k μ^(k) and covariance
// Σ_k θ_k Σ^(k). Vertices are M^(d·j+i) = (μ^(i)μ^(j)ᵀ + μ^(j)μ^(i)ᵀ)/2 + Σ^(i)
// with weights vec(θθᵀ). The cross-mean term is symmetrized; the covariance
// enters once per left index, which is exact because the θ weights sum to one:
// Σ_ij θ_iθ_j (sym(μ_iμ_jᵀ) + Σ_i) = μ(θ)μ(θ)ᵀ + Σ(θ).
SmpVertexSet from_uncertain_mean_cov(const UncertainMeanCov& u);

// Fixed mean with a polytope of covariances: M^(k) = μμᵀ + Σ^(k), φ(θ) = θ.
SmpVertexSet from_mean_cov_polytope(const Vec& mean, const std::vector<Mat>& covariances,
                                    Index n, Index m);

}  // namespace smp

#endif
