#include "smp/certify.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace smp {

const char* to_string(CertificateFamily f) {
  return f == CertificateFamily::PerVertex ? "per-vertex" : "identical";
}

Mat build_S_cmi(const ExpandedVertices& e, Index k, const Mat& P, const Mat& G, const Mat& K,
                double beta_tilde) {
  const Index en = e.en();
  if (P.rows() != en || P.cols() != en || G.rows() != en || G.cols() != en)
    throw std::invalid_argument("build_S_cmi: P/G must match the expanded dimension");
  Mat CF = compress(closed_loop_vertex(e, k, K), e.n);
  Mat S(2 * en, 2 * en);
  Mat Ps = symmetrize(P);
  S.topLeftCorner(en, en) = (beta_tilde * beta_tilde) * Ps;
  S.topRightCorner(en, en) = CF.transpose() * G;
  S.bottomLeftCorner(en, en) = S.topRightCorner(en, en).transpose();
  S.bottomRightCorner(en, en) = G.transpose() + G - Ps;
  return S;
}

GainCertificate certify(const SmpVertexSet& s, const StabilityQuery& q,
                        const CertifyOptions& opts) {
  if (!(q.beta_tilde > 0.0 && q.beta_tilde <= 1.0))
    throw std::invalid_argument("certify: beta_tilde must lie in (0, 1]");
  if (q.eta < 0.0) throw std::invalid_argument("certify: eta must be nonnegative");
  if (q.K.rows() != s.m || q.K.cols() != s.n)
    throw std::invalid_argument("certify: gain must be m x n");
  if (opts.normalization <= q.eta)
    throw std::invalid_argument("certify: normalization cap must exceed eta");

  const ExpandedVertices e = block_moment_matrices(s);
  const Index en = e.en();
  const Index N = e.N();
  const double rho = opts.normalization;

  GainCertificate cert;
  cert.beta_tilde = q.beta_tilde;
  cert.ms_rate = std::sqrt(q.beta_tilde);
  cert.family =
      s.time_variation == TimeVariation::TV ? CertificateFamily::Identical : q.family;

  const Index nP = cert.family == CertificateFamily::Identical ? 1 : N;
  const Index hd = half_dim(en);

  std::vector<SymVar> Pv(nP);
  for (Index i = 0; i < nP; ++i) Pv[i] = SymVar{i * hd, en};
  MatVar Gv{nP * hd, en, en};
  const Index p = nP * hd + en * en;

  std::vector<Mat> CF(N);
  for (Index k = 0; k < N; ++k) CF[k] = compress(closed_loop_vertex(e, k, q.K), e.n);

  SdpProblem prob;
  prob.p = p;
  prob.c = Vec::Zero(p);

  auto zero2 = [en] { return Mat::Zero(2 * en, 2 * en).eval(); };

  for (Index k = 0; k < N; ++k) {
    const SymVar& P = Pv[cert.family == CertificateFamily::Identical ? 0 : k];
    SdpProblem::Block b;
    b.A0 = zero2();
    for (Index local = 0; local < P.size(); ++local) {
      Mat Bp = P.basis(local);
      Mat T = zero2();
      T.topLeftCorner(en, en) = (q.beta_tilde * q.beta_tilde) * Bp;
      T.bottomRightCorner(en, en) = -Bp;
      b.terms.emplace_back(P.offset + local, std::move(T));
    }
    for (Index c = 0; c < en; ++c)
      for (Index r = 0; r < en; ++r) {
        Mat E = Mat::Zero(en, en);
        E(r, c) = 1.0;
        Mat T = zero2();
        T.topRightCorner(en, en) = CF[k].transpose() * E;
        T.bottomLeftCorner(en, en) = T.topRightCorner(en, en).transpose();
        T.bottomRightCorner(en, en) = E + E.transpose();
        b.terms.emplace_back(Gv.offset + c * en + r, std::move(T));
      }
    prob.blocks.push_back(std::move(b));
  }

  for (Index i = 0; i < nP; ++i) {
    SdpProblem::Block pos, cap;
    pos.A0 = Mat::Zero(en, en);
    cap.A0 = rho * Mat::Identity(en, en);
    for (Index local = 0; local < Pv[i].size(); ++local) {
      Mat Bp = Pv[i].basis(local);
      pos.terms.emplace_back(Pv[i].offset + local, Bp);
      cap.terms.emplace_back(Pv[i].offset + local, (-Bp).eval());
    }
    prob.blocks.push_back(std::move(pos));
    prob.blocks.push_back(std::move(cap));
  }

  {
    // ‖G‖₂ ≤ rho via [[rho·I, G],[Gᵀ, rho·I]] ⪰ 0.
    SdpProblem::Block gb;
    gb.A0 = rho * Mat::Identity(2 * en, 2 * en);
    for (Index c = 0; c < en; ++c)
      for (Index r = 0; r < en; ++r) {
        Mat E = Mat::Zero(en, en);
        E(r, c) = 1.0;
        Mat T = zero2();
        T.topRightCorner(en, en) = E;
        T.bottomLeftCorner(en, en) = E.transpose();
        gb.terms.emplace_back(Gv.offset + c * en + r, std::move(T));
      }
    prob.blocks.push_back(std::move(gb));
  }

  Vec warm = Vec::Zero(p);
  for (Index i = 0; i < nP; ++i) Pv[i].pack(0.5 * rho * Mat::Identity(en, en), warm);
  Gv.pack(0.5 * rho * Mat::Identity(en, en), warm);

  FeasibilityResult fr = solve_feasibility(prob, q.eta, opts.sdp, &warm);

  cert.solver_status = fr.detail.status;
  cert.newton_iters = fr.detail.newton_iters;
  cert.P.reserve(nP);
  for (Index i = 0; i < nP; ++i) cert.P.push_back(symmetrize(Pv[i].unpack(fr.z)));
  cert.G = Gv.unpack(fr.z);

  // Re-verify with direct eigenvalue computations; never trust the solver's
  // own margin claim.
  double margin = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < N; ++k) {
    const Mat& P = cert.P[cert.family == CertificateFamily::Identical ? 0 : k];
    margin = std::min(margin, min_eig(build_S_cmi(e, k, P, cert.G, q.K, q.beta_tilde)));
  }
  for (const Mat& P : cert.P) margin = std::min(margin, min_eig(P));
  cert.margin = margin;
  cert.certified = fr.found && std::isfinite(margin) && margin >= q.eta - 1e-8;
  return cert;
}

double ms_rate_from_expanded(double beta_tilde) {
  if (!(beta_tilde > 0.0 && beta_tilde <= 1.0))
    throw std::domain_error("ms_rate_from_expanded: rate must lie in (0, 1]");
  return std::sqrt(beta_tilde);
}

double spectral_radius(const Mat& T) {
  if (T.rows() != T.cols()) throw std::invalid_argument("spectral_radius: square matrix required");
  Eigen::EigenSolver<Mat> es(T, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace smp
