#include "smp/synthesis.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace smp {

const char* to_string(SynthesisStatus s) {
  switch (s) {
    case SynthesisStatus::Designed: return "designed";
    case SynthesisStatus::InfeasibleAtEta: return "infeasible-at-eta";
    case SynthesisStatus::ExtractionFailure: return "extraction-failure";
    case SynthesisStatus::SolverFailure: return "solver-failure";
  }
  return "unknown";
}

const char* to_string(DesignCondition c) {
  switch (c) {
    case DesignCondition::None: return "none";
    case DesignCondition::ExponentialRate: return "exponential-rate";
    case DesignCondition::RobustStrict: return "robust-strict";
  }
  return "unknown";
}

namespace {

// Shared assembly for the quadratic and linear design blocks: both are
//   [ bt² · Q     Fᵀ                ]
//   [ F           R + Rᵀ − Q        ]
// and differ only in how F and R are produced.
Mat assembleDesignBlock(const Mat& Q, const Mat& F, const Mat& R, double beta_tilde) {
  const Index en = Q.rows();
  Mat Qs = symmetrize(Q);
  Mat S(2 * en, 2 * en);
  S.topLeftCorner(en, en) = (beta_tilde * beta_tilde) * Qs;
  S.topRightCorner(en, en) = F.transpose();
  S.bottomLeftCorner(en, en) = F;
  S.bottomRightCorner(en, en) = R + R.transpose() - Qs;
  return S;
}

}  // namespace

Mat build_S_qmi(const ExpandedVertices& e, Index k, const Mat& Q, const Mat& H, const Mat& L,
                double beta_tilde) {
  const Index n = e.n, m = e.m, en = e.en();
  if (k < 0 || k >= e.N()) throw std::invalid_argument("build_S_qmi: vertex index out of range");
  if (Q.rows() != en || Q.cols() != en)
    throw std::invalid_argument("build_S_qmi: Q must match the expanded dimension");
  if (H.rows() != n || H.cols() != n || L.rows() != m || L.cols() != n)
    throw std::invalid_argument("build_S_qmi: H must be n x n and L m x n");

  Mat HH = kron(H, H);
  Mat raw = e.F_aa[std::size_t(k)] * HH;
  if (m > 0) {
    raw -= e.F_ab[std::size_t(k)] * kron(H, L);
    raw -= e.F_ba[std::size_t(k)] * kron(L, H);
    raw += e.F_bb[std::size_t(k)] * kron(L, L);
  }
  return assembleDesignBlock(Q, compress(raw, n), compress(HH, n), beta_tilde);
}

BlockMaps block_maps(const Mat& Z, Index n, Index m) {
  const Index dim = n * (n + m);
  if (Z.rows() != dim || Z.cols() != dim)
    throw std::invalid_argument("block_maps: Z must be n(n+m) square");
  BlockMaps bm;
  bm.hh.resize(n * n, n * n);
  bm.hl.resize(m * n, n * n);
  bm.lh.resize(n * m, n * n);
  bm.ll.resize(m * m, n * n);
  // Row space of Z is [vec H; vec L]: n column-chunks of height n, then n
  // column-chunks of height m. Column n*j+i of each map is the vec of the
  // corresponding sub-block of Z.
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      const Index col = n * j + i;
      bm.hh.col(col) = vec(Z.block(i * n, j * n, n, n));
      if (m > 0) {
        bm.hl.col(col) = vec(Z.block(n * n + i * m, j * n, m, n));
        bm.lh.col(col) = vec(Z.block(i * n, n * n + j * m, n, m));
        bm.ll.col(col) = vec(Z.block(n * n + i * m, n * n + j * m, m, m));
      }
    }
  return bm;
}

Mat build_S_lmi(const ExpandedVertices& e, Index k, const Mat& Q, const Mat& Z,
                double beta_tilde) {
  const Index n = e.n, m = e.m, en = e.en();
  if (k < 0 || k >= e.N()) throw std::invalid_argument("build_S_lmi: vertex index out of range");
  if (Q.rows() != en || Q.cols() != en)
    throw std::invalid_argument("build_S_lmi: Q must match the expanded dimension");

  BlockMaps bm = block_maps(Z, n, m);
  Mat raw = e.F_aa[std::size_t(k)] * bm.hh;
  if (m > 0) {
    raw -= e.F_ab[std::size_t(k)] * bm.hl;
    raw -= e.F_ba[std::size_t(k)] * bm.lh;
    raw += e.F_bb[std::size_t(k)] * bm.ll;
  }
  return assembleDesignBlock(Q, compress(raw, n), compress(bm.hh, n), beta_tilde);
}

double epsilon(const Mat& Z) {
  SymEig se = sym_eig(symmetrize(Z));
  double s = 0.0;
  for (Index i = 1; i < se.values.size(); ++i) s += std::abs(se.values[i]);
  return s;
}

double epsilon_hat(const Mat& Z, const Mat& Zprev) {
  if (Z.rows() != Z.cols() || Zprev.rows() != Zprev.cols() || Z.rows() != Zprev.rows())
    throw std::invalid_argument("epsilon_hat: arguments must be square and same size");
  if (Zprev.norm() == 0.0)
    throw std::invalid_argument("epsilon_hat: previous iterate must be nonzero");
  Vec v1 = sym_eig(symmetrize(Zprev)).vectors.col(0);
  return Z.trace() - v1.dot(Z * v1);
}

RankOneExtraction rank_one_extract(const Mat& Z, Index n, Index m) {
  const Index dim = n * (n + m);
  if (Z.rows() != dim || Z.cols() != dim)
    throw std::invalid_argument("rank_one_extract: Z must be n(n+m) square");
  SymEig se = sym_eig(symmetrize(Z));
  const double lambda1 = se.values[0];
  if (!(lambda1 > 0.0))
    throw std::runtime_error("rank_one_extract: top eigenvalue is not positive");

  RankOneExtraction ex;
  ex.lambda1 = lambda1;
  Vec v1 = se.vectors.col(0);
  ex.Z_hat = lambda1 * v1 * v1.transpose();
  Vec zeta = std::sqrt(lambda1) * v1;
  ex.H = unvec(zeta.head(n * n), n, n);
  ex.L = m > 0 ? unvec(zeta.tail(n * m), m, n) : Mat::Zero(0, n).eval();
  ex.eps = 0.0;
  for (Index i = 1; i < se.values.size(); ++i) ex.eps += std::abs(se.values[i]);
  ex.quality = ex.eps / lambda1;
  return ex;
}

Mat recover_gain(const Mat& H, const Mat& L) {
  if (H.rows() != H.cols() || L.cols() != H.rows())
    throw std::invalid_argument("recover_gain: H must be square with L.cols() == H.rows()");
  Eigen::FullPivLU<Mat> lu(H);
  if (!lu.isInvertible()) throw std::runtime_error("recover_gain: H is singular");
  return L * lu.inverse();
}

namespace {

struct DesignSpace {
  SymVar Zv;
  std::vector<SymVar> Qv;
  Index p = 0;
  // LMI coefficient of Z-coordinate `local` for vertex k (constant across
  // iterations, so built once).
  std::vector<std::vector<Mat>> z_coeff;  // [k][local]
};

DesignSpace makeDesignSpace(const ExpandedVertices& e, CertificateFamily family) {
  const Index n = e.n, m = e.m, N = e.N(), en = e.en();
  const Index zdim = n * (n + m);

  DesignSpace ds;
  ds.Zv = SymVar{0, zdim};
  const Index hdZ = ds.Zv.size();
  const Index nQ = family == CertificateFamily::Identical ? 1 : N;
  const Index hdQ = half_dim(en);
  for (Index i = 0; i < nQ; ++i) ds.Qv.push_back(SymVar{hdZ + i * hdQ, en});
  ds.p = hdZ + nQ * hdQ;

  ds.z_coeff.assign(std::size_t(N), std::vector<Mat>(std::size_t(hdZ)));
  for (Index local = 0; local < hdZ; ++local) {
    Mat B = ds.Zv.basis(local);
    BlockMaps bm = block_maps(B, n, m);
    Mat CHH = compress(bm.hh, n);
    Mat lower_right = CHH + CHH.transpose();
    for (Index k = 0; k < N; ++k) {
      Mat raw = e.F_aa[std::size_t(k)] * bm.hh;
      if (m > 0) {
        raw -= e.F_ab[std::size_t(k)] * bm.hl;
        raw -= e.F_ba[std::size_t(k)] * bm.lh;
        raw += e.F_bb[std::size_t(k)] * bm.ll;
      }
      Mat Fl = compress(raw, n);
      Mat T = Mat::Zero(2 * en, 2 * en);
      T.topRightCorner(en, en) = Fl.transpose();
      T.bottomLeftCorner(en, en) = Fl;
      T.bottomRightCorner(en, en) = lower_right;
      ds.z_coeff[std::size_t(k)][std::size_t(local)] = std::move(T);
    }
  }
  return ds;
}

// The constraint set shared by every iteration:
//   S_lmi^(k)(Q, Z) >= eta I,  Q^(k) >= eta I,  Z >= 0,  tr(Z) <= z_ub.
SdpProblem makeDesignProblem(const ExpandedVertices& e, const DesignSpace& ds,
                             const SynthesisConfig& cfg) {
  const Index N = e.N(), en = e.en();
  const double bt2 = cfg.beta_tilde * cfg.beta_tilde;
  const Index nQ = Index(ds.Qv.size());

  SdpProblem prob;
  prob.p = ds.p;
  prob.c = Vec::Zero(ds.p);

  for (Index k = 0; k < N; ++k) {
    const SymVar& Q = ds.Qv[std::size_t(nQ == 1 ? 0 : k)];
    SdpProblem::Block b;
    b.A0 = -cfg.eta * Mat::Identity(2 * en, 2 * en);
    for (Index ql = 0; ql < Q.size(); ++ql) {
      Mat Bq = Q.basis(ql);
      Mat T = Mat::Zero(2 * en, 2 * en);
      T.topLeftCorner(en, en) = bt2 * Bq;
      T.bottomRightCorner(en, en) = -Bq;
      b.terms.emplace_back(Q.offset + ql, std::move(T));
    }
    for (Index local = 0; local < ds.Zv.size(); ++local)
      b.terms.emplace_back(local, ds.z_coeff[std::size_t(k)][std::size_t(local)]);
    prob.blocks.push_back(std::move(b));
  }

  for (Index i = 0; i < nQ; ++i) {
    SdpProblem::Block b;
    b.A0 = -cfg.eta * Mat::Identity(en, en);
    for (Index ql = 0; ql < ds.Qv[std::size_t(i)].size(); ++ql)
      b.terms.emplace_back(ds.Qv[std::size_t(i)].offset + ql, ds.Qv[std::size_t(i)].basis(ql));
    prob.blocks.push_back(std::move(b));
  }

  {
    SdpProblem::Block b;
    b.A0 = Mat::Zero(ds.Zv.dim, ds.Zv.dim);
    for (Index local = 0; local < ds.Zv.size(); ++local)
      b.terms.emplace_back(local, ds.Zv.basis(local));
    prob.blocks.push_back(std::move(b));
  }

  {
    SdpProblem::LinIneq tr;
    tr.g = Vec::Zero(ds.p);
    for (Index local = 0; local < ds.Zv.size(); ++local) {
      auto [i, j] = SymVar::coord_ij(local, ds.Zv.dim);
      if (i == j) tr.g[local] = 1.0;
    }
    tr.h = cfg.z_ub;
    prob.lin_ineq.push_back(std::move(tr));
  }
  return prob;
}

// Objective <W, Z> as a vector over the packed coordinates (Q coordinates
// untouched at zero): a diagonal coordinate contributes W_ii, an off-diagonal
// one 2 W_ij because the packed coordinate moves both mirrored entries.
void packObjective(const Mat& W, const SymVar& Zv, Vec& c) {
  for (Index local = 0; local < Zv.size(); ++local) {
    auto [i, j] = SymVar::coord_ij(local, Zv.dim);
    c[Zv.offset + local] = (i == j) ? W(i, i) : 2.0 * W(i, j);
  }
}

}  // namespace

RankOneCandidate iterate_sdp(const ExpandedVertices& e, const SynthesisConfig& cfg) {
  if (!(cfg.beta_tilde > 0.0 && cfg.beta_tilde <= 1.0))
    throw std::invalid_argument("iterate_sdp: beta_tilde must lie in (0, 1]");
  if (cfg.eta < 0.0 || cfg.z_ub <= 0.0 || cfg.delta < 0.0 || cfg.max_iterations < 1)
    throw std::invalid_argument("iterate_sdp: invalid configuration");

  const Index n = e.n, m = e.m;
  const Index zdim = n * (n + m);
  DesignSpace ds = makeDesignSpace(e, cfg.family);
  SdpProblem prob = makeDesignProblem(e, ds, cfg);
  const Index nQ = Index(ds.Qv.size());

  RankOneCandidate out;
  out.status = SynthesisStatus::SolverFailure;

  Vec warm;
  bool have_warm = false;
  double prev_eps = std::numeric_limits<double>::infinity();
  Mat Zprev;

  for (int ell = 1; ell <= cfg.max_iterations; ++ell) {
    if (ell == 1) {
      Mat W = Mat::Identity(zdim, zdim);
      packObjective(W, ds.Zv, prob.c);
    } else {
      Vec v1 = sym_eig(symmetrize(Zprev)).vectors.col(0);
      Mat W = Mat::Identity(zdim, zdim) - v1 * v1.transpose();
      packObjective(W, ds.Zv, prob.c);
    }

    SdpSolution sol = solve(prob, cfg.sdp, have_warm ? &warm : nullptr);

    IterationRecord rec;
    rec.ell = ell;
    rec.status = sol.status;
    rec.objective = sol.objective;
    rec.phase1_margin = sol.phase1_ran ? sol.phase1_margin : std::numeric_limits<double>::quiet_NaN();

    if (sol.status == SdpStatus::InfeasibleDetected) {
      out.iterations.push_back(rec);
      // Later iterations start from a feasible warm point, so an infeasible
      // verdict there is numerical noise: keep the previous good iterate.
      out.status = ell == 1 ? SynthesisStatus::InfeasibleAtEta : SynthesisStatus::Designed;
      break;
    }
    if (sol.status == SdpStatus::NumericalFailure || !sol.z.allFinite()) {
      out.iterations.push_back(rec);
      out.status = ell == 1 ? SynthesisStatus::SolverFailure : SynthesisStatus::Designed;
      break;
    }

    Mat Zl = symmetrize(ds.Zv.unpack(sol.z));
    const double eps_l = epsilon(Zl);
    rec.eps = eps_l;
    rec.trace_Z = Zl.trace();
    if (ell == 1) {
      rec.optimality_held = sol.status == SdpStatus::Optimal;
    } else {
      // At optimality the new objective cannot exceed the surrogate evaluated
      // at the (feasible) previous iterate, which equals eps(Zprev).
      rec.optimality_held = sol.status == SdpStatus::Optimal &&
                            sol.objective <= prev_eps + 1e-9 * (1.0 + std::abs(prev_eps));
    }
    out.iterations.push_back(rec);

    out.Z = Zl;
    out.Q.clear();
    for (Index i = 0; i < nQ; ++i) out.Q.push_back(symmetrize(ds.Qv[std::size_t(i)].unpack(sol.z)));
    out.status = SynthesisStatus::Designed;
    warm = sol.z;
    have_warm = true;

    if (ell >= 2 && eps_l >= prev_eps - cfg.delta) break;
    prev_eps = eps_l;
    Zprev = Zl;
  }

  if (out.status == SynthesisStatus::Designed) {
    SymEig se = sym_eig(out.Z);
    out.lambda1 = se.values[0];
    Vec v1 = se.vectors.col(0);
    out.Z_hat = out.lambda1 * v1 * v1.transpose();
    out.eps = 0.0;
    for (Index i = 1; i < se.values.size(); ++i) out.eps += std::abs(se.values[i]);
    out.quality = out.lambda1 > 0.0 ? out.eps / out.lambda1
                                    : std::numeric_limits<double>::infinity();
  }
  return out;
}

SynthesisResult synthesize(const SmpVertexSet& s, const SynthesisConfig& cfg) {
  ModelDiagnostics diag = validate(s);
  if (!diag.ok())
    throw std::invalid_argument("synthesize: invalid model: " + diag.errors.front());

  SynthesisConfig cc = cfg;
  if (s.time_variation == TimeVariation::TV) cc.family = CertificateFamily::Identical;

  const ExpandedVertices e = block_moment_matrices(s);
  const Index N = e.N(), en = e.en();

  SynthesisResult res;
  res.family = cc.family;
  res.candidate = iterate_sdp(e, cc);
  res.Q = res.candidate.Q;
  res.status = res.candidate.status;
  if (res.status != SynthesisStatus::Designed) return res;

  RankOneExtraction ex = rank_one_extract(res.candidate.Z, s.n, s.m);
  res.H = ex.H;
  res.L = ex.L;
  res.candidate.Z_hat = ex.Z_hat;

  if (ex.quality > cc.quality_threshold) {
    res.status = SynthesisStatus::ExtractionFailure;
    return res;
  }
  {
    Eigen::JacobiSVD<Mat> svd(ex.H);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (!(smin > 0.0) || smax / smin > 1e12) {
      res.status = SynthesisStatus::ExtractionFailure;
      return res;
    }
  }
  res.K = recover_gain(ex.H, ex.L);

  // The rank-one replacement perturbs the design inequalities by O(eps), so
  // holding the previous Q fixed can lose a sliver of margin. Re-solving the
  // Lyapunov-like variables at the fixed rank-one point recovers it; the
  // decision below is then re-verified through the plain builders.
  {
    const Index nQ = Index(res.Q.size());
    const Index hdQ = half_dim(en);
    std::vector<SymVar> Qv;
    for (Index i = 0; i < nQ; ++i) Qv.push_back(SymVar{i * hdQ, en});

    SdpProblem probQ;
    probQ.p = nQ * hdQ;
    probQ.c = Vec::Zero(probQ.p);
    const double bt2 = cc.beta_tilde * cc.beta_tilde;
    for (Index k = 0; k < N; ++k) {
      const SymVar& Q = Qv[std::size_t(nQ == 1 ? 0 : k)];
      SdpProblem::Block b;
      b.A0 = build_S_lmi(e, k, Mat::Zero(en, en), res.candidate.Z_hat, cc.beta_tilde) -
             cc.eta * Mat::Identity(2 * en, 2 * en);
      for (Index ql = 0; ql < Q.size(); ++ql) {
        Mat Bq = Q.basis(ql);
        Mat T = Mat::Zero(2 * en, 2 * en);
        T.topLeftCorner(en, en) = bt2 * Bq;
        T.bottomRightCorner(en, en) = -Bq;
        b.terms.emplace_back(Q.offset + ql, std::move(T));
      }
      probQ.blocks.push_back(std::move(b));
    }
    for (Index i = 0; i < nQ; ++i) {
      SdpProblem::Block b;
      b.A0 = -cc.eta * Mat::Identity(en, en);
      for (Index ql = 0; ql < Qv[std::size_t(i)].size(); ++ql)
        b.terms.emplace_back(Qv[std::size_t(i)].offset + ql, Qv[std::size_t(i)].basis(ql));
      probQ.blocks.push_back(std::move(b));
    }

    Vec warmQ = Vec::Zero(probQ.p);
    for (Index i = 0; i < nQ; ++i) Qv[std::size_t(i)].pack(res.Q[std::size_t(i)], warmQ);
    FeasibilityResult fr = solve_feasibility(probQ, -1e-8, cc.sdp, &warmQ);

    std::vector<Mat> Qre;
    for (Index i = 0; i < nQ; ++i) Qre.push_back(symmetrize(Qv[std::size_t(i)].unpack(fr.z)));

    double margin = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < N; ++k) {
      const Mat& Qk = Qre[std::size_t(nQ == 1 ? 0 : k)];
      Mat S = build_S_lmi(e, k, Qk, res.candidate.Z_hat, cc.beta_tilde);
      margin = std::min(margin, min_eig(S) - cc.eta);
    }
    for (const Mat& Qk : Qre) margin = std::min(margin, min_eig(Qk) - cc.eta);
    res.condition_margin = margin;

    if (margin >= -1e-8 && res.candidate.lambda1 <= cc.z_ub + 1e-8) {
      res.condition = cc.beta_tilde < 1.0 ? DesignCondition::ExponentialRate
                                          : DesignCondition::RobustStrict;
      res.Q = Qre;
    }
  }

  StabilityQuery q;
  q.K = res.K;
  q.beta_tilde = cc.beta_tilde;
  q.family = cc.family;
  q.eta = cc.eta;
  CertifyOptions co;
  co.normalization = cc.normalization;
  co.sdp = cc.sdp;
  res.certificate = certify(s, q, co);
  return res;
}

}  // namespace smp
