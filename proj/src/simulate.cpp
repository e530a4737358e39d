#include "smp/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace smp {

namespace {

void checkTheta(const ParametricGaussian& d, const Vec& theta) {
  if (theta.size() != d.d_theta)
    throw std::invalid_argument("sampler: theta length does not match d_theta");
  // Off-simplex θ would silently blend covariances into something indefinite
  // (clamped later by the PSD factorization), so reject it here.
  constexpr double tol = 1e-9;
  if (theta.minCoeff() < -tol || std::abs(theta.sum() - 1.0) > tol)
    throw std::invalid_argument("sampler: theta must lie on the probability simplex");
}

}  // namespace

Vec ParametricGaussian::mean_at(const Vec& theta) const {
  checkTheta(*this, theta);
  Vec mu = Vec::Zero(vdim());
  for (Index k = 0; k < d_theta; ++k) mu += theta[k] * means[std::size_t(k)];
  return mu;
}

Mat ParametricGaussian::cov_at(const Vec& theta) const {
  checkTheta(*this, theta);
  Mat S = Mat::Zero(vdim(), vdim());
  for (Index k = 0; k < d_theta; ++k) {
    const double w = law == CovarianceLaw::Affine ? theta[k] : theta[k] * theta[k];
    S += w * covariances[std::size_t(k)];
  }
  return S;
}

std::pair<Mat, Mat> sample_system(const ParametricGaussian& d, const Vec& theta, RngStream& rng) {
  const Index dim = d.vdim();
  Vec mu = d.mean_at(theta);
  Mat fac = psd_factor(d.cov_at(theta));
  Vec z(dim);
  for (Index i = 0; i < dim; ++i) z[i] = rng.gaussian();
  Vec v = mu + fac * z;
  Mat A = unvec(v.head(d.n * d.n), d.n, d.n);
  Mat B = d.m > 0 ? unvec(v.tail(d.n * d.m), d.n, d.m) : Mat::Zero(d.n, 0).eval();
  return {A, B};
}

TrajectoryEnsemble simulate(const ParametricGaussian& d, const Vec& x0, const Mat& K,
                            const std::vector<Vec>& theta_seq, int T, Index M,
                            std::uint64_t seed) {
  if (T < 1 || M < 1) throw std::invalid_argument("simulate: T and M must be at least 1");
  if (x0.size() != d.n) throw std::invalid_argument("simulate: x0 length must equal n");
  const bool controlled = K.rows() > 0;
  if (controlled && (K.rows() != d.m || K.cols() != d.n))
    throw std::invalid_argument("simulate: gain must be m x n");
  if (theta_seq.empty() || (theta_seq.size() != 1 && theta_seq.size() != std::size_t(T)))
    throw std::invalid_argument("simulate: theta sequence must have length 1 or T");

  const Index dim = d.vdim();

  // θ_t is shared by every path, so the mean and covariance factor for each
  // step are computed once.
  std::vector<Vec> mu_t(static_cast<std::size_t>(T));
  std::vector<Mat> fac_t(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    const Vec& th = theta_seq[theta_seq.size() == 1 ? 0 : std::size_t(t)];
    checkTheta(d, th);
    mu_t[std::size_t(t)] = d.mean_at(th);
    fac_t[std::size_t(t)] = psd_factor(d.cov_at(th));
  }

  TrajectoryEnsemble ens;
  ens.n = d.n;
  ens.T = T;
  ens.seed = seed;
  ens.controlled = controlled;
  ens.K = K;
  ens.theta_seq.reserve(std::size_t(T));
  for (int t = 0; t < T; ++t)
    ens.theta_seq.push_back(theta_seq[theta_seq.size() == 1 ? 0 : std::size_t(t)]);

  ens.paths.assign(std::size_t(M), {});
  Vec z(dim);
  for (Index p = 0; p < M; ++p) {
    auto& path = ens.paths[std::size_t(p)];
    path.reserve(std::size_t(T) + 1);
    Vec x = x0;
    path.push_back(x);
    for (int t = 0; t < T; ++t) {
      RngStream rng(seed, std::uint64_t(p), std::uint32_t(t));
      for (Index i = 0; i < dim; ++i) z[i] = rng.gaussian();
      Vec v = mu_t[std::size_t(t)] + fac_t[std::size_t(t)] * z;
      Mat A = unvec(v.head(d.n * d.n), d.n, d.n);
      if (controlled && d.m > 0) {
        Mat B = unvec(v.tail(d.n * d.m), d.n, d.m);
        x = (A - B * K) * x;
      } else {
        x = A * x;
      }
      path.push_back(x);
    }
  }
  return ens;
}

std::pair<Vec, Vec> empirical_second_moment(const TrajectoryEnsemble& ens, int t) {
  if (t < 0 || t > ens.T) throw std::invalid_argument("empirical_second_moment: t out of range");
  const Index M = ens.M();
  const Index hd = half_dim(ens.n);
  Vec mean = Vec::Zero(hd);
  for (Index p = 0; p < M; ++p) {
    const Vec& x = ens.paths[std::size_t(p)][std::size_t(t)];
    mean += vech(x * x.transpose());
  }
  mean /= double(M);
  Vec se = Vec::Zero(hd);
  if (M >= 2) {
    for (Index p = 0; p < M; ++p) {
      const Vec& x = ens.paths[std::size_t(p)][std::size_t(t)];
      Vec dvec = vech(x * x.transpose()) - mean;
      se += dvec.cwiseProduct(dvec);
    }
    se = (se / double(M - 1)).cwiseSqrt() / std::sqrt(double(M));
  }
  return {mean, se};
}

DecayFit estimate_decay_rate(const TrajectoryEnsemble& ens, int t_begin, int t_end) {
  if (t_end < 0) t_end = ens.T;
  if (t_begin < 0 || t_end > ens.T || t_begin >= t_end)
    throw std::invalid_argument("estimate_decay_rate: bad fit window");

  const Index M = ens.M();
  std::vector<double> ts, ys;
  for (int t = t_begin; t <= t_end; ++t) {
    double m2 = 0.0;
    for (Index p = 0; p < M; ++p) m2 += ens.paths[std::size_t(p)][std::size_t(t)].squaredNorm();
    m2 /= double(M);
    if (m2 > 0.0) {
      ts.push_back(double(t));
      ys.push_back(0.5 * std::log(m2));
    }
  }
  if (ts.size() < 2)
    throw std::runtime_error("estimate_decay_rate: degenerate trajectories (no positive mass)");

  const double npts = double(ts.size());
  double tbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    tbar += ts[i];
    ybar += ys[i];
  }
  tbar /= npts;
  ybar /= npts;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sxy += (ts[i] - tbar) * (ys[i] - ybar);
    sxx += (ts[i] - tbar) * (ts[i] - tbar);
  }
  const double slope = sxy / sxx;

  DecayFit fit;
  fit.beta_hat = std::exp(slope);
  fit.intercept = ybar + slope * (double(t_begin) - tbar);
  fit.t_begin = t_begin;
  fit.t_end = t_end;
  fit.points_used = Index(ts.size());
  return fit;
}

}  // namespace smp
