#ifndef SMPSTAB_SDP_HPP
#define SMPSTAB_SDP_HPP

#include "smp/linalg.hpp"

#include <utility>
#include <vector>

// A small self-contained semidefinite programming solver:
//
//   minimize    cᵀz
//   subject to  A_{b,0} + Σ_i z_i A_{b,i}  ⪰ 0   for every block b
//               gᵀz ≤ h                          (scalar inequalities)
//               |z_i| ≤ box_radius               (optional)
//
// sized for decision dimensions up to a few hundred and blocks up to ~20×20.
// The method is a primal log-det barrier path-following scheme: damped Newton
// steps on  cᵀz/μ − Σ_b log det S_b(z)  with a backtracking line search that
// keeps every iterate strictly feasible, and a geometric μ schedule. A
// phase-1 margin problem (maximize t with every block shifted by −t·I) finds
// a strictly feasible start or detects infeasibility.
//
// The solver is deterministic: fixed initialization, fixed sweep orders, no
// randomized pivoting. Identical inputs and options produce identical
// iterates. A supplied warm start that is strictly feasible skips phase 1.
//
// Strict inequalities never reach the solver; callers shift by their margin η
// beforehand and the solver only ever enforces ⪰ 0.

namespace smp {

struct SdpOptions {
  double mu_init = 1.0;        // initial barrier parameter
  double mu_reduction = 0.2;   // geometric reduction per outer step
  double newton_tol = 1e-9;    // stop centering when (decrement²)/2 falls below
  double gap_tol = 1e-8;       // stop when μ · (Σ block dims) falls below
  int max_iter = 500;          // total Newton-iteration budget (per phase)
  double box_radius = 0.0;     // > 0 adds |z_i| ≤ R to the problem itself
  double phase1_box = 1e6;     // box used internally by phase 1 when none given
  double infeas_margin = 1e-9; // phase-1 margin at or below which we declare infeasible
  double warm_min_eig = 1e-12; // strictness threshold for accepting a warm start
};

struct SdpProblem {
  Index p = 0;  // decision dimension
  Vec c;        // objective (minimized); size p

  struct Block {
    Mat A0;
    std::vector<std::pair<Index, Mat>> terms;  // (variable index, symmetric coefficient)
  };
  std::vector<Block> blocks;

  struct LinIneq {
    Vec g;     // size p
    double h;  // gᵀz ≤ h
  };
  std::vector<LinIneq> lin_ineq;
};

enum class SdpStatus { Optimal, InfeasibleDetected, IterationCap, NumericalFailure };

const char* to_string(SdpStatus s);

struct SdpSolution {
  Vec z;
  double objective = 0.0;
  SdpStatus status = SdpStatus::NumericalFailure;
  double primal_residual = 0.0;  // most negative block eigenvalue at z
  double kkt_residual = 0.0;     // relative stationarity residual
  int newton_iters = 0;
  bool phase1_ran = false;
  double phase1_margin = 0.0;    // margin attained by phase 1 (when it ran)
};

SdpSolution solve(const SdpProblem& prob, const SdpOptions& opts = {},
                  const Vec* warm_start = nullptr);

// Margin maximization over the problem's constraint blocks: maximize t with
// every block (and every scalar/box constraint, as 1×1 blocks) shifted by
// −t·I. The objective vector of `prob` is ignored. Succeeds when the attained
// margin reaches eta.
struct FeasibilityResult {
  bool found = false;
  Vec z;
  double margin = 0.0;  // re-verified: min over blocks of λ_min(S_b(z))
  SdpSolution detail;
};

FeasibilityResult solve_feasibility(const SdpProblem& prob, double eta,
                                    const SdpOptions& opts = {},
                                    const Vec* warm_start = nullptr);

// --- Decision-vector packing helpers -------------------------------------
//
// A symmetric unknown S ∈ S^dim occupies half_dim(dim) consecutive decision
// coordinates in vech order. A packed coordinate equals the matrix entry
// itself: the basis matrix of an off-diagonal coordinate is E_ij + E_ji (both
// mirrored entries move together; no √2 rescaling). pack/unpack round-trip is
// exact.

struct SymVar {
  Index offset = 0;
  Index dim = 0;

  Index size() const { return half_dim(dim); }
  // (i, j) with i >= j for the local packed coordinate.
  static std::pair<Index, Index> coord_ij(Index local, Index dim);
  Mat basis(Index local) const;  // E_ij + E_ji, or E_ii on the diagonal
  Mat unpack(const Vec& z) const;
  void pack(const Mat& S, Vec& z) const;
};

// A general (not necessarily symmetric) matrix unknown, packed column-major.
struct MatVar {
  Index offset = 0;
  Index rows = 0, cols = 0;

  Index size() const { return rows * cols; }
  Mat unpack(const Vec& z) const;
  void pack(const Mat& X, Vec& z) const;
};

}  // namespace smp

#endif
