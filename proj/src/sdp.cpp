#include "smp/sdp.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>

namespace smp {

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::InfeasibleDetected: return "infeasible";
    case SdpStatus::IterationCap: return "iteration-cap";
    case SdpStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Flat {
  Index p = 0;
  std::vector<SdpProblem::Block> blocks;
  Index total_dim = 0;
};

// Normalizes the problem into a bare block list: scalar inequalities become
// 1x1 blocks, an optional box |z_i| <= R becomes 2p 1x1 blocks, coefficient
// matrices are symmetrized and duplicate variable indices within a block are
// merged (the Hessian assembly below assumes one term per variable per block).
Flat flatten(const SdpProblem& prob, double box) {
  if (prob.c.size() != prob.p)
    throw std::invalid_argument("sdp: objective length does not match decision dimension");
  Flat f;
  f.p = prob.p;
  f.blocks.reserve(prob.blocks.size() + prob.lin_ineq.size() + (box > 0.0 ? 2 * prob.p : 0));
  for (const auto& blk : prob.blocks) {
    if (blk.A0.rows() != blk.A0.cols())
      throw std::invalid_argument("sdp: constraint block is not square");
    SdpProblem::Block b;
    b.A0 = 0.5 * (blk.A0 + blk.A0.transpose());
    std::map<Index, Mat> merged;
    for (const auto& [i, Ai] : blk.terms) {
      if (i < 0 || i >= prob.p) throw std::invalid_argument("sdp: term index out of range");
      if (Ai.rows() != blk.A0.rows() || Ai.cols() != blk.A0.cols())
        throw std::invalid_argument("sdp: term dimension mismatch");
      Mat sym = 0.5 * (Ai + Ai.transpose());
      auto it = merged.find(i);
      if (it == merged.end())
        merged.emplace(i, std::move(sym));
      else
        it->second += sym;
    }
    for (auto& [i, Ai] : merged) b.terms.emplace_back(i, std::move(Ai));
    f.blocks.push_back(std::move(b));
  }
  for (const auto& li : prob.lin_ineq) {
    if (li.g.size() != prob.p)
      throw std::invalid_argument("sdp: inequality length does not match decision dimension");
    SdpProblem::Block b;
    b.A0 = Mat::Constant(1, 1, li.h);
    for (Index i = 0; i < prob.p; ++i)
      if (li.g[i] != 0.0) b.terms.emplace_back(i, Mat::Constant(1, 1, -li.g[i]));
    f.blocks.push_back(std::move(b));
  }
  if (box > 0.0) {
    for (Index i = 0; i < prob.p; ++i) {
      SdpProblem::Block hi, lo;
      hi.A0 = Mat::Constant(1, 1, box);
      hi.terms.emplace_back(i, Mat::Constant(1, 1, -1.0));
      lo.A0 = Mat::Constant(1, 1, box);
      lo.terms.emplace_back(i, Mat::Constant(1, 1, 1.0));
      f.blocks.push_back(std::move(hi));
      f.blocks.push_back(std::move(lo));
    }
  }
  for (const auto& b : f.blocks) f.total_dim += b.A0.rows();
  return f;
}

Mat evalBlock(const SdpProblem::Block& b, const Vec& z) {
  Mat S = b.A0;
  for (const auto& [i, Ai] : b.terms) S += z[i] * Ai;
  return S;
}

double blockMargin(const Flat& f, const Vec& z) {
  double m = kInf;
  for (const auto& b : f.blocks) m = std::min(m, min_eig(evalBlock(b, z)));
  return m;
}

// c'z/mu - sum_b log det S_b(z); nullopt when some block is not positive
// definite (line-search feasibility test and merit value in one pass).
std::optional<double> barrierValue(const Flat& f, const Vec& c, double mu, const Vec& z) {
  double val = c.dot(z) / mu;
  for (const auto& b : f.blocks) {
    Eigen::LLT<Mat> llt(evalBlock(b, z));
    if (llt.info() != Eigen::Success) return std::nullopt;
    Mat L = llt.matrixL();
    double ld = 0.0;
    for (Index i = 0; i < L.rows(); ++i) ld += std::log(L(i, i));
    val -= 2.0 * ld;
  }
  return val;
}

struct CenterOut {
  bool converged = false;  // decrement test met (or early-stop predicate fired)
  bool stalled = false;    // line search could not make progress
  bool failed = false;     // factorization/direction breakdown at an iterate
  int iters = 0;
};

// Damped Newton on the barrier at fixed mu. z must enter strictly feasible
// and stays strictly feasible. The optional predicate is checked after every
// accepted step so callers can stop as soon as an iterate is good enough.
CenterOut centerAt(const Flat& f, const Vec& c, double mu, Vec& z, const SdpOptions& o,
                   int budget, const std::function<bool(const Vec&)>& good_enough) {
  CenterOut out;
  const Index p = f.p;
  if (p == 0) {
    out.converged = true;
    return out;
  }
  // Plateau detection: near the noise floor of double precision the decrement
  // stops shrinking before it reaches newton_tol (cancellation in the barrier
  // gradient at small mu). A small, non-improving decrement means the point is
  // as centered as the arithmetic allows.
  double best_dec2 = std::numeric_limits<double>::infinity();
  int no_progress = 0;
  while (out.iters < budget) {
    Vec grad = c / mu;
    Mat H = Mat::Zero(p, p);
    for (const auto& b : f.blocks) {
      if (b.terms.empty()) continue;
      Eigen::LLT<Mat> llt(evalBlock(b, z));
      if (llt.info() != Eigen::Success) {
        out.failed = true;
        return out;
      }
      Mat L = llt.matrixL();
      auto lower = L.triangularView<Eigen::Lower>();
      // U_i = L^-1 A_i L^-T; grad gets -tr(U_i), Hessian gets <U_i, U_j>_F.
      std::vector<std::pair<Index, Mat>> U;
      U.reserve(b.terms.size());
      for (const auto& [i, Ai] : b.terms) {
        Mat W = lower.solve(Ai);
        Mat Ui = lower.solve(W.transpose()).transpose();
        grad[i] -= Ui.trace();
        U.emplace_back(i, std::move(Ui));
      }
      for (std::size_t a = 0; a < U.size(); ++a)
        for (std::size_t bb = a; bb < U.size(); ++bb) {
          double v = (U[a].second.array() * U[bb].second.array()).sum();
          H(U[a].first, U[bb].first) += v;
          if (a != bb) H(U[bb].first, U[a].first) += v;
        }
    }
    if (!grad.allFinite() || !H.allFinite()) {
      out.failed = true;
      return out;
    }

    // Newton direction, with a ridge fallback when H is numerically singular
    // or indefinite (possible after heavy cancellation near the boundary).
    Vec dz;
    double dec2 = -1.0;
    double scale = 1.0 + H.trace() / double(p);
    for (double ridge : {0.0, 1e-12 * scale, 1e-8 * scale}) {
      Mat Hr = H;
      if (ridge > 0.0) Hr += ridge * Mat::Identity(p, p);
      Eigen::LDLT<Mat> ldlt(Hr);
      if (ldlt.info() != Eigen::Success) continue;
      Vec cand = ldlt.solve(-grad);
      if (!cand.allFinite()) continue;
      double d2 = -grad.dot(cand);
      if (d2 > 0.0) {
        dz = cand;
        dec2 = d2;
        break;
      }
    }
    if (dec2 <= 0.0) {
      out.stalled = true;  // no descent direction available; accept the point
      return out;
    }
    if (dec2 / 2.0 <= o.newton_tol) {
      out.converged = true;
      return out;
    }
    if (dec2 < 0.9 * best_dec2) {
      best_dec2 = dec2;
      no_progress = 0;
    } else if (++no_progress >= 12 && dec2 / 2.0 <= 1e-4) {
      out.stalled = true;
      return out;
    }

    std::optional<double> phi0 = barrierValue(f, c, mu, z);
    if (!phi0) {
      out.failed = true;
      return out;
    }
    const double slope = grad.dot(dz);  // = -dec2 < 0
    double alpha = 1.0;
    bool stepped = false;
    for (int ls = 0; ls < 60; ++ls) {
      Vec zt = z + alpha * dz;
      auto phit = barrierValue(f, c, mu, zt);
      if (phit && *phit <= *phi0 + 0.25 * alpha * slope) {
        z = std::move(zt);
        stepped = true;
        break;
      }
      alpha *= 0.5;
    }
    ++out.iters;
    if (!stepped) {
      out.stalled = true;
      return out;
    }
    if (good_enough && good_enough(z)) {
      out.converged = true;
      return out;
    }
  }
  return out;  // budget exhausted at this mu
}

struct PathOut {
  SdpStatus status = SdpStatus::NumericalFailure;
  int iters = 0;
  double mu_final = 0.0;
};

PathOut followPath(const Flat& f, const Vec& c, Vec& z, const SdpOptions& o,
                   const std::function<bool(const Vec&)>& good_enough) {
  PathOut po;
  po.mu_final = o.mu_init;
  if (f.p == 0) {
    po.status = SdpStatus::Optimal;
    return po;
  }
  double mu = o.mu_init;
  for (;;) {
    auto co = centerAt(f, c, mu, z, o, o.max_iter - po.iters, good_enough);
    po.iters += co.iters;
    po.mu_final = mu;
    if (co.failed) {
      po.status = SdpStatus::NumericalFailure;
      return po;
    }
    if (!co.converged && !co.stalled) {
      po.status = SdpStatus::IterationCap;
      return po;
    }
    if (good_enough && good_enough(z)) {
      po.status = SdpStatus::Optimal;
      return po;
    }
    if (mu * double(f.total_dim) <= o.gap_tol) {
      po.status = SdpStatus::Optimal;
      return po;
    }
    if (po.iters >= o.max_iter) {
      po.status = SdpStatus::IterationCap;
      return po;
    }
    mu *= o.mu_reduction;
  }
}

// Stationarity residual of the barrier KKT system at (z, mu): with the dual
// guess Y_b = mu * S_b^-1, reports |c_i - sum_b <Y_b, A_bi>|_inf relative to
// |c|_inf. Small values mean z is a genuine central-path point.
double kktResidual(const Flat& f, const Vec& c, double mu, const Vec& z) {
  if (f.p == 0) return 0.0;
  Vec r = c;
  for (const auto& b : f.blocks) {
    if (b.terms.empty()) continue;
    Eigen::LLT<Mat> llt(evalBlock(b, z));
    if (llt.info() != Eigen::Success) return kInf;
    Mat L = llt.matrixL();
    auto lower = L.triangularView<Eigen::Lower>();
    for (const auto& [i, Ai] : b.terms) {
      Mat W = lower.solve(Ai);
      Mat Ui = lower.solve(W.transpose()).transpose();
      r[i] -= mu * Ui.trace();
    }
  }
  return r.lpNorm<Eigen::Infinity>() / (1.0 + c.lpNorm<Eigen::Infinity>());
}

// Margin problem over an already-flattened block list: maximize t subject to
// S_b(z) - t I >= 0 for every block. Always has the strictly feasible start
// (z0, margin(z0) - 1). early_target < inf stops as soon as an iterate
// reaches that margin (used to find a phase-2 start cheaply).
SdpSolution solveMargin(const Flat& fbox, const SdpOptions& o, Vec z0, double early_target) {
  Flat g = fbox;
  g.p = fbox.p + 1;
  for (auto& b : g.blocks)
    b.terms.emplace_back(fbox.p, -Mat::Identity(b.A0.rows(), b.A0.rows()));

  Vec zfull = Vec::Zero(g.p);
  zfull.head(fbox.p) = z0;
  zfull[fbox.p] = blockMargin(fbox, z0) - 1.0;
  Vec c = Vec::Zero(g.p);
  c[fbox.p] = -1.0;

  std::function<bool(const Vec&)> stop;
  if (early_target < kInf) {
    const Index tidx = fbox.p;
    stop = [tidx, early_target](const Vec& zz) { return zz[tidx] >= early_target; };
  }

  PathOut po = followPath(g, c, zfull, o, stop);

  SdpSolution sol;
  sol.z = zfull.head(fbox.p);
  sol.status = po.status;
  sol.objective = c.dot(zfull);
  sol.newton_iters = po.iters;
  sol.phase1_ran = true;
  sol.phase1_margin = zfull[fbox.p];
  sol.primal_residual = blockMargin(fbox, sol.z);
  sol.kkt_residual = kktResidual(g, c, po.mu_final, zfull);
  return sol;
}

Vec clampedStart(const SdpProblem& prob, const Vec* warm, double radius) {
  Vec z0 = Vec::Zero(prob.p);
  if (warm && warm->size() == prob.p && warm->allFinite())
    z0 = warm->cwiseMax(-0.9 * radius).cwiseMin(0.9 * radius);
  return z0;
}

}  // namespace

SdpSolution solve(const SdpProblem& prob, const SdpOptions& opts, const Vec* warm_start) {
  Flat f = flatten(prob, opts.box_radius);

  SdpSolution sol;
  Vec z;
  bool have_start = false;
  if (warm_start && warm_start->size() == prob.p && warm_start->allFinite() &&
      blockMargin(f, *warm_start) >= opts.warm_min_eig) {
    z = *warm_start;
    have_start = true;
  }

  if (!have_start) {
    const double radius = opts.box_radius > 0.0 ? opts.box_radius : opts.phase1_box;
    Flat fp = flatten(prob, radius);
    SdpSolution phase1 = solveMargin(fp, opts, clampedStart(prob, warm_start, radius), 1e-3);
    sol.phase1_ran = true;
    sol.phase1_margin = phase1.phase1_margin;
    sol.newton_iters = phase1.newton_iters;
    if (phase1.status != SdpStatus::Optimal) {
      sol.status = phase1.status;
      sol.z = phase1.z;
      sol.objective = prob.c.size() == prob.p ? prob.c.dot(phase1.z) : 0.0;
      sol.primal_residual = blockMargin(f, phase1.z);
      return sol;
    }
    if (phase1.phase1_margin <= opts.infeas_margin) {
      sol.status = SdpStatus::InfeasibleDetected;
      sol.z = phase1.z;
      sol.primal_residual = blockMargin(f, phase1.z);
      return sol;
    }
    z = phase1.z;
  }

  PathOut po = followPath(f, prob.c, z, opts, nullptr);
  sol.z = z;
  sol.status = po.status;
  sol.objective = prob.c.dot(z);
  sol.newton_iters += po.iters;
  sol.primal_residual = blockMargin(f, z);
  sol.kkt_residual = kktResidual(f, prob.c, po.mu_final, z);
  return sol;
}

FeasibilityResult solve_feasibility(const SdpProblem& prob, double eta, const SdpOptions& opts,
                                    const Vec* warm_start) {
  const double radius = opts.box_radius > 0.0 ? opts.box_radius : opts.phase1_box;
  // flatten() validates against c; the objective is ignored here, so accept
  // problems that left it empty.
  SdpProblem p2 = prob;
  if (p2.c.size() != p2.p) p2.c = Vec::Zero(p2.p);
  Flat fbox = flatten(p2, radius);
  SdpSolution m = solveMargin(fbox, opts, clampedStart(p2, warm_start, radius), kInf);

  FeasibilityResult out;
  out.z = m.z;
  out.detail = m;
  Flat fplain = flatten(p2, 0.0);
  out.margin = blockMargin(fplain, m.z);
  out.found = (m.status == SdpStatus::Optimal) && out.margin >= eta;
  return out;
}

std::pair<Index, Index> SymVar::coord_ij(Index local, Index dim) {
  Index j = 0;
  Index rem = local;
  while (rem >= dim - j) {
    rem -= dim - j;
    ++j;
  }
  return {j + rem, j};  // i >= j, vech order (columns of the lower triangle)
}

Mat SymVar::basis(Index local) const {
  auto [i, j] = coord_ij(local, dim);
  Mat B = Mat::Zero(dim, dim);
  B(i, j) = 1.0;
  B(j, i) = 1.0;  // overwrites (not adds) when i == j
  return B;
}

Mat SymVar::unpack(const Vec& z) const {
  Mat S(dim, dim);
  for (Index local = 0; local < size(); ++local) {
    auto [i, j] = coord_ij(local, dim);
    S(i, j) = S(j, i) = z[offset + local];
  }
  return S;
}

void SymVar::pack(const Mat& S, Vec& z) const {
  for (Index local = 0; local < size(); ++local) {
    auto [i, j] = coord_ij(local, dim);
    z[offset + local] = S(i, j);
  }
}

Mat MatVar::unpack(const Vec& z) const {
  Mat X(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) X(r, c) = z[offset + c * rows + r];
  return X;
}

void MatVar::pack(const Mat& X, Vec& z) const {
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) z[offset + c * rows + r] = X(r, c);
}

}  // namespace smp
