#ifndef SMPSTAB_REFERENCE_STUDY_HPP
#define SMPSTAB_REFERENCE_STUDY_HPP

#include "smp/model.hpp"
#include "smp/simulate.hpp"
#include "smp/synthesis.hpp"

#include <cstdint>

// The design study shipped with the tool: a three-parameter uncertain
// mean/covariance family (n = 2, m = 1) whose open-loop dynamics are
// mean-square unstable, together with the design parameters and simulation
// settings used by `smpctl reproduce` and the acceptance harness. Keeping the
// numbers in one place lets the CLI, the tests, and the shipped fixture files
// agree byte-for-byte.

namespace smp {
namespace reference_study {

// d_θ = 3 mean vectors (length 6) and covariances (6×6) of vec([A, B]).
UncertainMeanCov data();

// from_uncertain_mean_cov(data()): 9 vertices, quadratic-outer weights, TI.
SmpVertexSet model();

// Affine-law Gaussian sampler with the same means/covariances; its
// conditional second moment matches model() exactly.
ParametricGaussian distribution();

// Iterative-design parameters of the study.
SynthesisConfig design_config();

Vec theta_center();  // (1/3, 1/3, 1/3)
Vec x0();            // [1, 1]

inline constexpr int kHorizon = 30;           // simulation length T
inline constexpr Index kPaths = 10000;        // Monte Carlo ensemble size M
inline constexpr std::uint64_t kSeed = 1729;  // default RNG seed

}  // namespace reference_study
}  // namespace smp

#endif
