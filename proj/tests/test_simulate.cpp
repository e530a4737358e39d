#include "doctest.h"

#include "smp/expansion.hpp"
#include "smp/model.hpp"
#include "smp/reference_study.hpp"
#include "smp/rng.hpp"
#include "smp/simulate.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

using smp::Index;
using smp::Mat;
using smp::Vec;

TEST_CASE("philox4x32 reproduces the published known-answer vectors") {
  // Reference vectors for Philox4x32-10: all-zero and all-ones inputs.
  auto zero = smp::philox4x32(0, 0, 0, 0);
  CHECK(zero[0] == 0x6627e8d5u);
  CHECK(zero[1] == 0xe169c58du);
  CHECK(zero[2] == 0xbc57ac4cu);
  CHECK(zero[3] == 0x9b00dbd8u);

  auto ones = smp::philox4x32(~std::uint64_t{0}, ~std::uint64_t{0}, 0xffffffffu, 0xffffffffu);
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);
}

TEST_CASE("rng streams are pure functions of their address") {
  smp::RngStream a(1729, 5, 3);
  smp::RngStream b(1729, 5, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());

  // Any address component separates the stream.
  smp::RngStream base(1729, 5, 3);
  smp::RngStream other_seed(1730, 5, 3);
  smp::RngStream other_path(1729, 6, 3);
  smp::RngStream other_t(1729, 5, 4);
  bool seed_differs = false, path_differs = false, t_differs = false;
  for (int i = 0; i < 16; ++i) {
    double u = base.uniform();
    seed_differs = seed_differs || u != other_seed.uniform();
    path_differs = path_differs || u != other_path.uniform();
    t_differs = t_differs || u != other_t.uniform();
  }
  CHECK(seed_differs);
  CHECK(path_differs);
  CHECK(t_differs);
}

TEST_CASE("uniform draws live in (0, 1) and gaussians have sane moments") {
  smp::RngStream s(42, 0, 0);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    double u = s.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(sum / 20000.0 == doctest::Approx(0.5).epsilon(0.02));

  smp::RngStream g(42, 1, 0);
  double m1 = 0.0, m2 = 0.0;
  const int N = 20000;
  for (int i = 0; i < N; ++i) {
    double x = g.gaussian();
    m1 += x;
    m2 += x * x;
  }
  m1 /= N;
  m2 /= N;
  CHECK(std::abs(m1) <= 0.04);
  CHECK(std::abs(m2 - 1.0) <= 0.05);
}

TEST_CASE("sample_system is exact for a zero-covariance family") {
  smp::ParametricGaussian d;
  d.n = 2;
  d.m = 1;
  d.d_theta = 2;
  Vec mu1(6), mu2(6);
  mu1 << 1, 2, 3, 4, 5, 6;
  mu2 << 7, 8, 9, 10, 11, 12;
  d.means = {mu1, mu2};
  d.covariances = {Mat::Zero(6, 6), Mat::Zero(6, 6)};
  d.law = smp::CovarianceLaw::Affine;

  Vec theta(2);
  theta << 0.25, 0.75;
  Vec mu = 0.25 * mu1 + 0.75 * mu2;
  smp::RngStream rng(7, 0, 0);
  auto [A, B] = smp::sample_system(d, theta, rng);
  REQUIRE(A.rows() == 2);
  REQUIRE(A.cols() == 2);
  REQUIRE(B.rows() == 2);
  REQUIRE(B.cols() == 1);
  // v = vec([A, B]) stacks columns: A col 0, A col 1, then B.
  CHECK(A(0, 0) == doctest::Approx(mu(0)).epsilon(1e-15));
  CHECK(A(1, 0) == doctest::Approx(mu(1)).epsilon(1e-15));
  CHECK(A(0, 1) == doctest::Approx(mu(2)).epsilon(1e-15));
  CHECK(A(1, 1) == doctest::Approx(mu(3)).epsilon(1e-15));
  CHECK(B(0, 0) == doctest::Approx(mu(4)).epsilon(1e-15));
  CHECK(B(1, 0) == doctest::Approx(mu(5)).epsilon(1e-15));
}

TEST_CASE("covariance laws blend vertex covariances linearly or quadratically") {
  smp::ParametricGaussian d;
  d.n = 1;
  d.m = 1;
  d.d_theta = 2;
  Vec mu = Vec::Zero(2);
  d.means = {mu, mu};
  Mat S1 = Mat::Identity(2, 2) * 2.0;
  Mat S2 = Mat::Identity(2, 2) * 8.0;
  d.covariances = {S1, S2};
  Vec theta(2);
  theta << 0.5, 0.5;

  d.law = smp::CovarianceLaw::Affine;
  CHECK((d.cov_at(theta) - Mat::Identity(2, 2) * 5.0).norm() <= 1e-14);

  d.law = smp::CovarianceLaw::IndependentVertices;
  CHECK((d.cov_at(theta) - Mat::Identity(2, 2) * 2.5).norm() <= 1e-14);

  CHECK((d.mean_at(theta) - mu).norm() == 0.0);
}

TEST_CASE("a deadbeat deterministic loop zeroes the state after one step") {
  smp::ParametricGaussian d;
  d.n = 1;
  d.m = 1;
  d.d_theta = 1;
  Vec mu(2);
  mu << 1.0, 1.0;  // a = 1, b = 1
  d.means = {mu};
  d.covariances = {Mat::Zero(2, 2)};

  Mat K(1, 1);
  K << 1.0;  // closed loop a - b*K = 0
  Vec x0(1);
  x0 << 3.0;
  Vec theta(1);
  theta << 1.0;
  smp::TrajectoryEnsemble ens = smp::simulate(d, x0, K, {theta}, 5, 4, 99);
  REQUIRE(ens.M() == 4);
  for (const auto& path : ens.paths) {
    REQUIRE(path.size() == 6);
    CHECK(path[0](0) == 3.0);
    for (int t = 1; t <= 5; ++t) CHECK(path[static_cast<std::size_t>(t)](0) == 0.0);
  }
  // All states vanish from t = 1 on: no decay rate is identifiable.
  CHECK_THROWS_AS((void)smp::estimate_decay_rate(ens, 1, 5), std::runtime_error);
}

TEST_CASE("empirical second moment at t = 0 is exact with zero standard error") {
  smp::ParametricGaussian d;
  d.n = 2;
  d.m = 1;
  d.d_theta = 1;
  Vec mu = Vec::Zero(6);
  d.means = {mu};
  d.covariances = {Mat::Identity(6, 6)};
  Vec x0(2);
  x0 << 1.0, -2.0;
  Vec theta(1);
  theta << 1.0;
  smp::TrajectoryEnsemble ens = smp::simulate(d, x0, Mat::Zero(1, 2), {theta}, 3, 50, 5);
  auto [mean0, se0] = smp::empirical_second_moment(ens, 0);
  Vec expect = smp::vech(x0 * x0.transpose());
  CHECK((mean0 - expect).norm() == 0.0);
  CHECK(se0.norm() == 0.0);
  // Later steps are genuinely random, so standard errors turn positive.
  auto [mean1, se1] = smp::empirical_second_moment(ens, 1);
  CHECK(se1.minCoeff() > 0.0);
  CHECK(mean1.size() == 3);
}

TEST_CASE("a scalar deterministic contraction has exactly its pole as decay rate") {
  smp::ParametricGaussian d;
  d.n = 1;
  d.m = 1;
  d.d_theta = 1;
  Vec mu(2);
  mu << 0.5, 0.0;
  d.means = {mu};
  d.covariances = {Mat::Zero(2, 2)};
  Vec x0(1);
  x0 << 2.0;
  Vec theta(1);
  theta << 1.0;
  smp::TrajectoryEnsemble ens = smp::simulate(d, x0, Mat::Zero(1, 1), {theta}, 20, 3, 123);
  smp::DecayFit fit = smp::estimate_decay_rate(ens);
  CHECK(fit.beta_hat == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fit.points_used == 21);
}

TEST_CASE("ensembles are bitwise reproducible by seed") {
  smp::ParametricGaussian d;
  Vec mu(6);
  mu << 0.9, 0.05, 0.1, 0.8, 0.0, 1.0;
  d.n = 2;
  d.m = 1;
  d.d_theta = 1;
  d.means = {mu};
  d.covariances = {0.01 * Mat::Identity(6, 6)};
  Vec x0(2);
  x0 << 1.0, 1.0;
  Vec theta(1);
  theta << 1.0;

  smp::TrajectoryEnsemble a = smp::simulate(d, x0, Mat::Zero(1, 2), {theta}, 8, 20, 2024);
  smp::TrajectoryEnsemble b = smp::simulate(d, x0, Mat::Zero(1, 2), {theta}, 8, 20, 2024);
  smp::TrajectoryEnsemble c = smp::simulate(d, x0, Mat::Zero(1, 2), {theta}, 8, 20, 2025);
  bool all_equal = true, any_diff = false;
  for (Index p = 0; p < a.M(); ++p) {
    for (int t = 0; t <= 8; ++t) {
      const Vec& xa = a.paths[static_cast<std::size_t>(p)][static_cast<std::size_t>(t)];
      const Vec& xb = b.paths[static_cast<std::size_t>(p)][static_cast<std::size_t>(t)];
      const Vec& xc = c.paths[static_cast<std::size_t>(p)][static_cast<std::size_t>(t)];
      all_equal = all_equal && (xa - xb).norm() == 0.0;
      any_diff = any_diff || (xa - xc).norm() != 0.0;
    }
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("monte carlo second moments track the deterministic expanded prediction") {
  smp::SmpVertexSet s = smp::reference_study::model();
  smp::ParametricGaussian d = smp::reference_study::distribution();
  Vec theta = smp::reference_study::theta_center();
  Vec x0 = smp::reference_study::x0();
  const int T = 10;
  const Index M = 2000;

  smp::ExpandedVertices e = smp::block_moment_matrices(s);
  smp::ExpandedTrajectory pred =
      smp::propagate(e, {s.weights_for(theta)}, Mat::Zero(1, 2), smp::lift_state(x0), T);
  smp::TrajectoryEnsemble ens = smp::simulate(d, x0, Mat::Zero(1, 2), {theta}, T, M, 777);

  for (int t = 0; t <= T; ++t) {
    auto [emp, se] = smp::empirical_second_moment(ens, t);
    const Vec& predicted = pred.states[static_cast<std::size_t>(t)];
    for (Index i = 0; i < emp.size(); ++i) {
      double tol = 5.0 * se(i) + 1e-9 * (1.0 + std::abs(predicted(i)));
      CHECK(std::abs(emp(i) - predicted(i)) <= tol);
    }
  }
}

TEST_CASE("simulate validates its inputs") {
  smp::ParametricGaussian d;
  d.n = 1;
  d.m = 1;
  d.d_theta = 2;
  Vec mu = Vec::Zero(2);
  d.means = {mu, mu};
  d.covariances = {Mat::Zero(2, 2), Mat::Zero(2, 2)};
  Vec x0 = Vec::Ones(1);
  Vec good(2);
  good << 0.5, 0.5;
  Vec bad(2);
  bad << 0.9, 0.4;  // not on the simplex
  Vec wrong_dim = Vec::Ones(3);

  CHECK_THROWS_AS((void)smp::simulate(d, x0, Mat::Zero(1, 1), {bad}, 3, 2, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)smp::simulate(d, x0, Mat::Zero(1, 1), {wrong_dim}, 3, 2, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)smp::simulate(d, x0, Mat::Zero(1, 1), {good, good}, 3, 2, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)smp::simulate(d, x0, Mat::Zero(1, 1), {}, 3, 2, 1),
                  std::invalid_argument);
}
