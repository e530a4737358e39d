#ifndef SMPSTAB_CERTIFY_HPP
#define SMPSTAB_CERTIFY_HPP

#include "smp/expansion.hpp"
#include "smp/model.hpp"
#include "smp/sdp.hpp"

#include <vector>

// Mean-square stability certification for a fixed gain K. The closed-loop
// second moment evolves through the expanded vertex transitions
// 𝒞(F^(k)(K)); the certificate is a feasible point of the linear matrix
// inequalities
//
//   S_cmi^(k)(P, G)  =  [ β̃²·P                𝒞(F^(k)(K))ᵀ G   ]
//                       [ Gᵀ 𝒞(F^(k)(K))      Gᵀ + G − P        ]  ⪰ η·I,
//   P^(k) ⪰ η·I,
//
// one per vertex. Feasibility bounds every admissible expanded transition's
// spectral radius by β̃, i.e. E‖x_t‖² = O(β̃ᵗ) and ‖x_t‖ decays in the mean
// at rate β = √β̃. β̃ = 1 expresses plain (non-exponential) robust
// mean-square stability, with the margin η standing in for strictness.
//
// Family: per-vertex P^(k) (one Lyapunov-like matrix per vertex, valid when
// the weights are fixed over time) or a single identical P (required, and
// automatically enforced, when the model is flagged time-varying).

namespace smp {

enum class CertificateFamily { PerVertex, Identical };

const char* to_string(CertificateFamily f);

struct StabilityQuery {
  Mat K;                     // m×n feedback gain (u = -K x); pass Zero(m, n) for open loop
  double beta_tilde = 0.97;  // bound on the expanded (second-moment) decay rate, in (0, 1]
  CertificateFamily family = CertificateFamily::PerVertex;
  double eta = 1e-6;         // required margin on every certificate block
};

struct GainCertificate {
  bool certified = false;
  double beta_tilde = 0.0;
  double ms_rate = 0.0;  // √β̃: certified decay rate of E‖x_t‖ (meaningful when certified)
  double margin = 0.0;   // min eigenvalue across all S_cmi and P blocks, recomputed directly
  std::vector<Mat> P;    // one per vertex, or a single entry for the identical family
  Mat G;
  CertificateFamily family = CertificateFamily::PerVertex;
  SdpStatus solver_status = SdpStatus::NumericalFailure;
  int newton_iters = 0;
};

struct CertifyOptions {
  // The LMIs are invariant under scaling (P, G) by any c > 0, so without a
  // normalization the margin SDP is unbounded. Capping λmax(P) and the
  // singular values of G at this value pins the scale; it must comfortably
  // exceed eta.
  double normalization = 100.0;
  SdpOptions sdp;
};

// The certificate block for vertex k evaluated at (P, G, K): symmetric 2ñ×2ñ.
Mat build_S_cmi(const ExpandedVertices& e, Index k, const Mat& P, const Mat& G, const Mat& K,
                double beta_tilde);

// Margin-maximization over (P^(k), G): certified iff the attained margin
// reaches q.eta, re-verified by direct eigenvalue checks on the returned
// matrices (solver status is never trusted alone). A not-certified result is
// inconclusive: the conditions are sufficient, not necessary.
GainCertificate certify(const SmpVertexSet& s, const StabilityQuery& q,
                        const CertifyOptions& opts = {});

// Decay rate of E‖x_t‖ implied by an expanded-system rate β̃: β = √β̃.
double ms_rate_from_expanded(double beta_tilde);

// Spectral radius of a (generally nonsymmetric) square matrix; handy for
// cross-checking expanded transitions against certificates.
double spectral_radius(const Mat& T);

}  // namespace smp

#endif
