#ifndef SMPSTAB_SYNTHESIS_HPP
#define SMPSTAB_SYNTHESIS_HPP

#include "smp/certify.hpp"
#include "smp/expansion.hpp"
#include "smp/model.hpp"
#include "smp/sdp.hpp"

#include <vector>

// Feedback design u_t = -K x_t. Searching over (P, G, K) directly makes the
// certificate inequalities cubic; the change of variables G = 𝒞(H⊗H)⁻¹,
// K = L·H⁻¹, P = GᵀQG turns them into inequalities that are quadratic in
// (H, L):
//
//   S_qmi^(k)(Q,H,L) = [ β̃²·Q     F_qᵀ ]      F_q = 𝒞( F_aa(H⊗H) − F_ab(H⊗L)
//                      [ F_q       𝒞(H⊗H)+𝒞(H⊗H)ᵀ−Q ]   − F_ba(L⊗H) + F_bb(L⊗L) )
//
// and the Kronecker products are in turn linear images of the rank-one matrix
// Z = ζζᵀ, ζ = [vec H; vec L]: the block maps F_hh/F_hl/F_lh/F_ll extract
// them from any symmetric Z, giving the genuinely linear
//
//   S_lmi^(k)(Q,Z) = [ β̃²·Q      F_lᵀ ]       F_l = 𝒞( F_aa·F_hh(Z) − F_ab·F_hl(Z)
//                    [ F_l        𝒞(F_hh(Z))+𝒞(F_hh(Z))ᵀ−Q ]  − F_ba·F_lh(Z) + F_bb·F_ll(Z) )
//
// which coincides with S_qmi exactly on rank-one Z. The iterative design
// trades the (nonconvex) rank-one constraint for minimization of the
// rank-one defect ε(Z) = Σ_{i≥2} |λ_i(Z)| through its linear surrogate
// ε̂(Z, Z′) = tr(Z) − ν₁(Z′)ᵀ Z ν₁(Z′): solve a sequence of SDPs, each
// minimizing ε̂ against the previous iterate (plain trace on the first pass),
// until ε stops improving by more than δ; then split the top eigenpair of the
// final iterate into (H, L) and recover K.

namespace smp {

struct SynthesisConfig {
  double beta_tilde = 0.97;  // target bound on the expanded (second-moment) rate, in (0, 1]
  double eta = 0.1;          // margin enforced on every design inequality
  double z_ub = 10.0;        // trace bound on Z (pins the free scaling of (H, L))
  double delta = 1e-8;       // stop when eps improves by less than this
  int max_iterations = 50;
  CertificateFamily family = CertificateFamily::PerVertex;  // per-vertex or identical Q
  double quality_threshold = 1e-4;  // accept the rank-one split when eps/lambda1 is below
  double normalization = 100.0;     // passed through to the downstream certificate solve
  SdpOptions sdp;
};

enum class SynthesisStatus { Designed, InfeasibleAtEta, ExtractionFailure, SolverFailure };
enum class DesignCondition { None, ExponentialRate, RobustStrict };

const char* to_string(SynthesisStatus s);
const char* to_string(DesignCondition c);

struct IterationRecord {
  int ell = 0;            // 1-based iteration counter
  double eps = 0.0;       // rank-one defect of this iterate
  double objective = 0.0; // SDP objective value (trace for ell=1, eps-hat after)
  double trace_Z = 0.0;
  double phase1_margin = 0.0;  // feasibility margin found by phase 1 (NaN if skipped)
  SdpStatus status = SdpStatus::NumericalFailure;
  // True when the solver reached optimality and did not regress against the
  // previous iterate (the premise of the monotone-eps guarantee).
  bool optimality_held = false;
};

struct RankOneCandidate {
  Mat Z;      // final SDP iterate, symmetric PSD n(n+m) x n(n+m)
  Mat Z_hat;  // rank-one approximation lambda1 * v1 v1'
  double lambda1 = 0.0;
  double eps = 0.0;      // rank-one defect of Z
  double quality = 0.0;  // eps / lambda1
  std::vector<IterationRecord> iterations;
  std::vector<Mat> Q;  // Lyapunov-like variables at the final iterate
  SynthesisStatus status = SynthesisStatus::SolverFailure;
};

struct RankOneExtraction {
  Mat Z_hat;
  Mat H;  // n x n
  Mat L;  // m x n
  double lambda1 = 0.0;
  double eps = 0.0;
  double quality = 0.0;
};

struct SynthesisResult {
  SynthesisStatus status = SynthesisStatus::SolverFailure;
  Mat K;  // m x n, valid when status == Designed
  Mat H;
  Mat L;
  std::vector<Mat> Q;
  RankOneCandidate candidate;
  DesignCondition condition = DesignCondition::None;
  // Most negative slack across the design inequalities at the rank-one point
  // (relative to the required eta margin); >= -1e-8 backs `condition`.
  double condition_margin = 0.0;
  CertificateFamily family = CertificateFamily::PerVertex;
  GainCertificate certificate;  // independent certification of K at (beta_tilde, eta)
};

// Quadratic design block for vertex k at (Q, H, L): symmetric 2ñ×2ñ.
Mat build_S_qmi(const ExpandedVertices& e, Index k, const Mat& Q, const Mat& H, const Mat& L,
                double beta_tilde);

// The four linear block maps of a symmetric Z of size n(n+m). On rank-one
// Z = ζζᵀ with ζ = [vec H; vec L] they return H⊗H, H⊗L, L⊗H, L⊗L.
struct BlockMaps {
  Mat hh;  // n²  × n²
  Mat hl;  // mn × n²
  Mat lh;  // nm × n²
  Mat ll;  // m²  × n²
};
BlockMaps block_maps(const Mat& Z, Index n, Index m);

// Linear design block for vertex k at (Q, Z): symmetric 2ñ×2ñ; equals
// build_S_qmi when Z is the rank-one matrix of (H, L).
Mat build_S_lmi(const ExpandedVertices& e, Index k, const Mat& Q, const Mat& Z,
                double beta_tilde);

// Rank-one defect: sum of |eigenvalue| over all but the largest.
double epsilon(const Mat& Z);

// Linear surrogate tr(Z) − ν₁(Zprev)ᵀ Z ν₁(Zprev); equals epsilon(Z) at
// Zprev = Z and upper-bounds it for PSD arguments. Throws on Zprev = 0.
double epsilon_hat(const Mat& Z, const Mat& Zprev);

// The iterative SDP: trace minimization first, then repeated eps-hat
// minimization against the previous iterate, warm-started, until the eps
// improvement drops below cfg.delta (or iterations run out). Returns the
// final iterate with its full iteration trace.
RankOneCandidate iterate_sdp(const ExpandedVertices& e, const SynthesisConfig& cfg);

// Top-eigenpair split of a PSD matrix: Ẑ = λ₁ν₁ν₁ᵀ and [vec H; vec L] =
// √λ₁·ν₁ (sign fixed by making ν₁'s largest-magnitude component positive; K
// is invariant to the joint sign). Throws when λ₁ ≤ 0.
RankOneExtraction rank_one_extract(const Mat& Z, Index n, Index m);

// K = L·H⁻¹. Exactly invariant under (H, L) → (−H, −L).
Mat recover_gain(const Mat& H, const Mat& L);

// Full pipeline: iterate_sdp → rank_one_extract → recover_gain, then
// re-verify the design inequalities at the rank-one point (re-solving the
// Lyapunov-like variables there, since the rank-one replacement perturbs the
// inequalities by O(eps)) and independently certify K at the same (β̃, η).
SynthesisResult synthesize(const SmpVertexSet& s, const SynthesisConfig& cfg = {});

}  // namespace smp

#endif
