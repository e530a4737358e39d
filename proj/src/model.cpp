#include "smp/model.hpp"

#include <cmath>
#include <sstream>

namespace smp {

namespace {

std::string fmt_idx(Index k) {
  std::ostringstream os;
  os << k;
  return os.str();
}

void check_factorable(Index dim, Index n, Index m, const char* who) {
  if (n < 1 || m < 0) throw std::invalid_argument(std::string(who) + ": need n >= 1, m >= 0");
  if (dim != n * (n + m))
    throw std::invalid_argument(std::string(who) + ": size " + fmt_idx(dim) +
                                " is not n(n+m) for the declared n, m");
}

}  // namespace

bool in_simplex(const Vec& theta, double tol) {
  if (theta.size() < 1) return false;
  double sum = 0.0;
  for (Index i = 0; i < theta.size(); ++i) {
    if (theta(i) < -tol) return false;
    sum += theta(i);
  }
  return std::abs(sum - 1.0) <= std::max(tol, 1e-10);
}

WeightVector make_weights(const Vec& raw, double tol) {
  if (!in_simplex(raw, tol))
    throw std::invalid_argument("weight vector is outside the probability simplex");
  Vec w = raw;
  double sum = 0.0;
  for (Index i = 0; i < w.size(); ++i) {
    if (w(i) < 0.0) w(i) = 0.0;  // clamp tiny negatives admitted by the tolerance
    sum += w(i);
  }
  w /= sum;
  return {w};
}

WeightVector phi_quadratic(const Vec& theta) {
  if (!in_simplex(theta))
    throw std::invalid_argument("phi_quadratic: theta is outside the probability simplex");
  const Index d = theta.size();
  Vec w(d * d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) w(j * d + i) = theta(i) * theta(j);
  return make_weights(w);
}

WeightVector SmpVertexSet::weights_for(const Vec& theta) const {
  switch (weight_kind) {
    case WeightKind::Unit: {
      Vec w(1);
      w(0) = 1.0;
      return {w};
    }
    case WeightKind::Identity:
      if (theta.size() != d_theta)
        throw std::invalid_argument("weights_for: theta has wrong dimension");
      return make_weights(theta);
    case WeightKind::QuadraticOuter:
      if (theta.size() != d_theta)
        throw std::invalid_argument("weights_for: theta has wrong dimension");
      return phi_quadratic(theta);
  }
  throw std::logic_error("weights_for: unknown weight kind");
}

Mat SmpVertexSet::combine(const WeightVector& w) const {
  if (w.w.size() != N()) throw std::invalid_argument("combine: weight count mismatch");
  Mat acc = Mat::Zero(vdim(), vdim());
  for (Index k = 0; k < N(); ++k) acc += w.w(k) * vertices[static_cast<size_t>(k)];
  return acc;
}

ModelDiagnostics validate(const SmpVertexSet& s) {
  ModelDiagnostics d;
  if (s.n < 1) d.errors.push_back("state dimension n must be >= 1");
  if (s.m < 0) d.errors.push_back("input dimension m must be >= 0");
  if (s.vertices.empty()) d.errors.push_back("vertex list is empty");
  const Index dim = s.vdim();

  Index expected_N = -1;
  switch (s.weight_kind) {
    case WeightKind::Unit: expected_N = 1; break;
    case WeightKind::Identity: expected_N = s.d_theta; break;
    case WeightKind::QuadraticOuter: expected_N = s.d_theta * s.d_theta; break;
  }
  if (expected_N > 0 && s.N() != expected_N)
    d.errors.push_back("vertex count does not match the declared weight map (expected " +
                       fmt_idx(expected_N) + ", got " + fmt_idx(s.N()) + ")");

  for (Index k = 0; k < s.N(); ++k) {
    const Mat& M = s.vertices[static_cast<size_t>(k)];
    if (M.rows() != dim || M.cols() != dim) {
      d.errors.push_back("vertex " + fmt_idx(k) + " is " + fmt_idx(M.rows()) + "x" +
                         fmt_idx(M.cols()) + ", expected " + fmt_idx(dim) + "x" + fmt_idx(dim));
      continue;
    }
    const double scale = 1.0 + M.cwiseAbs().maxCoeff();
    const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9 * scale)
      d.errors.push_back("vertex " + fmt_idx(k) + " is not symmetric (max |M - M'| = " +
                         std::to_string(asym) + ")");
    else if (!(M.array().isFinite().all()))
      d.errors.push_back("vertex " + fmt_idx(k) + " has non-finite entries");
    else if (min_eig(M) < -1e-10 * scale)
      d.warnings.push_back("vertex " + fmt_idx(k) +
                           " is not PSD (fine for cross-moment vertices)");
  }

  // Corner combinations are conditional second moments and should be PSD.
  if (d.errors.empty() && s.weight_kind != WeightKind::Unit) {
    for (Index c = 0; c < s.d_theta; ++c) {
      Vec corner = Vec::Zero(s.d_theta);
      corner(c) = 1.0;
      const Mat comb = s.combine(s.weights_for(corner));
      if (min_eig(comb) < -1e-8 * (1.0 + comb.cwiseAbs().maxCoeff()))
        d.warnings.push_back("combination at simplex corner " + fmt_idx(c) + " is not PSD");
    }
  } else if (d.errors.empty()) {
    const Mat& M = s.vertices.front();
    if (min_eig(M) < -1e-8 * (1.0 + M.cwiseAbs().maxCoeff()))
      d.warnings.push_back("the single vertex (a second moment) is not PSD");
  }
  return d;
}

SmpVertexSet from_iid(const Mat& second_moment, Index n, Index m) {
  check_factorable(second_moment.rows(), n, m, "from_iid");
  if (second_moment.rows() != second_moment.cols())
    throw std::invalid_argument("from_iid: second moment must be square");
  SmpVertexSet s;
  s.n = n;
  s.m = m;
  s.time_variation = TimeVariation::TI;
  s.weight_kind = WeightKind::Unit;
  s.d_theta = 1;
  s.vertices.push_back(symmetrize(second_moment));
  return s;
}

SmpVertexSet from_deterministic_polytope(const std::vector<Vec>& vertex_vectors,
                                         Index n, Index m) {
  if (vertex_vectors.empty())
    throw std::invalid_argument("from_deterministic_polytope: no vertex vectors");
  const Index d = static_cast<Index>(vertex_vectors.size());
  for (const Vec& v : vertex_vectors)
    check_factorable(v.size(), n, m, "from_deterministic_polytope");

  SmpVertexSet s;
  s.n = n;
  s.m = m;
  s.time_variation = TimeVariation::TI;
  s.weight_kind = WeightKind::QuadraticOuter;
  s.d_theta = d;
  s.vertices.resize(static_cast<size_t>(d * d));
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) {
      const Vec& vi = vertex_vectors[static_cast<size_t>(i)];
      const Vec& vj = vertex_vectors[static_cast<size_t>(j)];
      s.vertices[static_cast<size_t>(d * j + i)] =
          0.5 * (vi * vj.transpose() + vj * vi.transpose());
    }
  return s;
}

SmpVertexSet from_random_polytope(const std::vector<std::vector<Mat>>& cross_moments,
                                  Index n, Index m) {
  const Index d = static_cast<Index>(cross_moments.size());
  if (d < 1) throw std::invalid_argument("from_random_polytope: empty grid");
  for (const auto& row : cross_moments)
    if (static_cast<Index>(row.size()) != d)
      throw std::invalid_argument("from_random_polytope: cross-moment grid is not square");
  const Index dim = n * (n + m);
  for (const auto& row : cross_moments)
    for (const Mat& C : row)
      if (C.rows() != dim || C.cols() != dim)
        throw std::invalid_argument("from_random_polytope: grid entry has wrong size");

  SmpVertexSet s;
  s.n = n;
  s.m = m;
  s.time_variation = TimeVariation::TI;
  s.weight_kind = WeightKind::QuadraticOuter;
  s.d_theta = d;
  s.vertices.resize(static_cast<size_t>(d * d));
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) {
      const Mat& Cij = cross_moments[static_cast<size_t>(i)][static_cast<size_t>(j)];
      const Mat& Cji = cross_moments[static_cast<size_t>(j)][static_cast<size_t>(i)];
      s.vertices[static_cast<size_t>(d * j + i)] = symmetrize(0.5 * (Cij + Cji));
    }
  return s;
}

std::vector<std::vector<Mat>> independent_cross_moments(const std::vector<Vec>& means,
                                                        const std::vector<Mat>& covariances) {
  const size_t d = means.size();
  if (d == 0 || covariances.size() != d)
    throw std::invalid_argument("independent_cross_moments: means/covariances count mismatch");
  std::vector<std::vector<Mat>> C(d, std::vector<Mat>(d));
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j) {
      C[i][j] = means[i] * means[j].transpose();
      if (i == j) C[i][j] += covariances[i];
    }
  return C;
}

SmpVertexSet from_uncertain_mean_cov(const UncertainMeanCov& u) {
  const Index d = u.d_theta;
  if (d < 1) throw std::invalid_argument("from_uncertain_mean_cov: d_theta must be >= 1");
  if (static_cast<Index>(u.means.size()) != d || static_cast<Index>(u.covariances.size()) != d)
    throw std::invalid_argument("from_uncertain_mean_cov: means/covariances count mismatch");
  const Index dim = u.n * (u.n + u.m);
  for (const Vec& mu : u.means) check_factorable(mu.size(), u.n, u.m, "from_uncertain_mean_cov");
  for (const Mat& S : u.covariances) {
    if (S.rows() != dim || S.cols() != dim)
      throw std::invalid_argument("from_uncertain_mean_cov: covariance has wrong size");
    if (min_eig(S) < -1e-10 * (1.0 + S.cwiseAbs().maxCoeff()))
      throw std::invalid_argument("from_uncertain_mean_cov: covariance is not PSD");
  }

  SmpVertexSet s;
  s.n = u.n;
  s.m = u.m;
  s.time_variation = TimeVariation::TI;
  s.weight_kind = WeightKind::QuadraticOuter;
  s.d_theta = d;
  s.vertices.resize(static_cast<size_t>(d * d));
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) {
      const Vec& mi = u.means[static_cast<size_t>(i)];
      const Vec& mj = u.means[static_cast<size_t>(j)];
      // Cross-mean term symmetrized; the covariance enters once per left
      // index — exact because the weights θ_iθ_j sum to one over j.
      s.vertices[static_cast<size_t>(d * j + i)] =
          0.5 * (mi * mj.transpose() + mj * mi.transpose()) +
          symmetrize(u.covariances[static_cast<size_t>(i)]);
    }
  return s;
}

SmpVertexSet from_mean_cov_polytope(const Vec& mean, const std::vector<Mat>& covariances,
                                    Index n, Index m) {
  if (covariances.empty())
    throw std::invalid_argument("from_mean_cov_polytope: no covariances");
  check_factorable(mean.size(), n, m, "from_mean_cov_polytope");
  const Index dim = n * (n + m);
  SmpVertexSet s;
  s.n = n;
  s.m = m;
  s.time_variation = TimeVariation::TI;
  s.weight_kind = WeightKind::Identity;
  s.d_theta = static_cast<Index>(covariances.size());
  for (const Mat& S : covariances) {
    if (S.rows() != dim || S.cols() != dim)
      throw std::invalid_argument("from_mean_cov_polytope: covariance has wrong size");
    s.vertices.push_back(mean * mean.transpose() + symmetrize(S));
  }
  return s;
}

}  // namespace smp
