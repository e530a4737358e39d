#include "smp/reference_study.hpp"

namespace smp {
namespace reference_study {

namespace {

// Constant-diagonal / constant-off-diagonal covariance.
Mat two_level_cov(Index dim, double diag, double off) {
  Mat S = Mat::Constant(dim, dim, off);
  S.diagonal().setConstant(diag);
  return S;
}

}  // namespace

UncertainMeanCov data() {
  UncertainMeanCov u;
  u.n = 2;
  u.m = 1;
  u.d_theta = 3;
  const Index dim = u.n * (u.n + u.m);

  Vec mu1(dim), mu2(dim), mu3(dim);
  mu1 << 0.90, 0.0, 0.2, 0.9, 0.0, 1.0;
  mu2 << 1.00, 0.0, 0.2, 0.9, 0.0, 0.8;
  mu3 << 1.05, 0.0, 0.2, 0.9, 0.0, 1.2;
  u.means = {mu1, mu2, mu3};

  u.covariances = {two_level_cov(dim, 0.06, -0.01), two_level_cov(dim, 0.02, 0.01),
                   two_level_cov(dim, 0.01, 0.0)};
  return u;
}

SmpVertexSet model() { return from_uncertain_mean_cov(data()); }

ParametricGaussian distribution() {
  const UncertainMeanCov u = data();
  ParametricGaussian d;
  d.n = u.n;
  d.m = u.m;
  d.d_theta = u.d_theta;
  d.means = u.means;
  d.covariances = u.covariances;
  d.law = CovarianceLaw::Affine;
  return d;
}

SynthesisConfig design_config() {
  SynthesisConfig cfg;
  cfg.beta_tilde = 0.97;
  cfg.eta = 0.1;
  cfg.z_ub = 10.0;
  cfg.delta = 1e-8;
  cfg.family = CertificateFamily::PerVertex;
  return cfg;
}

Vec theta_center() { return Vec::Constant(3, 1.0 / 3.0); }

Vec x0() {
  Vec v(2);
  v << 1.0, 1.0;
  return v;
}

}  // namespace reference_study
}  // namespace smp
