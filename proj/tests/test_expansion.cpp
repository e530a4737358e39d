#include "doctest.h"

#include "smp/expansion.hpp"
#include "smp/linalg.hpp"
#include "smp/model.hpp"
#include "smp/reference_study.hpp"

#include <random>
#include <stdexcept>
#include <vector>

using smp::Index;
using smp::Mat;
using smp::Vec;

namespace {

// 6x6 symmetric matrix with distinct recognizable entries: M(r,c) = 100*min + max.
Mat tagged_symmetric_6x6() {
  Mat M(6, 6);
  for (Index r = 0; r < 6; ++r)
    for (Index c = 0; c < 6; ++c) M(r, c) = 100.0 * std::min(r, c) + std::max(r, c);
  return M;
}

smp::Mat random_mat(std::mt19937& gen, Index rows, Index cols) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat X(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) X(i, j) = u(gen);
  return X;
}

}  // namespace

TEST_CASE("block-moment extraction reads the expected entries (n=2, m=1)") {
  Mat M = tagged_symmetric_6x6();
  smp::SmpVertexSet s = smp::from_iid(M, 2, 1);
  smp::ExpandedVertices e = smp::block_moment_matrices(s);
  REQUIRE(e.N() == 1);
  REQUIRE(e.F_aa[0].rows() == 4);
  REQUIRE(e.F_aa[0].cols() == 4);
  REQUIRE(e.F_ab[0].rows() == 4);
  REQUIRE(e.F_ab[0].cols() == 2);
  REQUIRE(e.F_ba[0].rows() == 4);
  REQUIRE(e.F_ba[0].cols() == 2);
  REQUIRE(e.F_bb[0].rows() == 4);
  REQUIRE(e.F_bb[0].cols() == 1);

  // Hand-expanded columns. Entry M(r,c) carries the value 100*min(r,c)+max(r,c),
  // so every expected number below names the source entry unambiguously.
  Mat Faa(4, 4);
  Faa << 0, 2, 2, 202,  //
      1, 3, 102, 203,   //
      1, 102, 3, 203,   //
      101, 103, 103, 303;
  CHECK((e.F_aa[0] - Faa).norm() == 0.0);

  Mat Fab(4, 2);
  Fab << 4, 204,  //
      5, 205,     //
      104, 304,   //
      105, 305;
  CHECK((e.F_ab[0] - Fab).norm() == 0.0);

  Mat Fba(4, 2);
  Fba << 4, 204,  //
      104, 304,   //
      5, 205,     //
      105, 305;
  CHECK((e.F_ba[0] - Fba).norm() == 0.0);

  Mat Fbb(4, 1);
  Fbb << 404,  //
      405,     //
      405,     //
      505;
  CHECK((e.F_bb[0] - Fbb).norm() == 0.0);
}

TEST_CASE("a deterministic vertex reduces to plain Kronecker products") {
  std::mt19937 gen(31);
  for (int rep = 0; rep < 25; ++rep) {
    Mat A = random_mat(gen, 2, 2);
    Mat B = random_mat(gen, 2, 1);
    Mat AB(2, 3);
    AB << A, B;
    Vec v = smp::vec(AB);
    smp::SmpVertexSet s = smp::from_iid(v * v.transpose(), 2, 1);
    smp::ExpandedVertices e = smp::block_moment_matrices(s);

    CHECK((e.F_aa[0] - smp::kron(A, A)).norm() == 0.0);
    CHECK((e.F_ab[0] - smp::kron(A, B)).norm() == 0.0);
    CHECK((e.F_ba[0] - smp::kron(B, A)).norm() == 0.0);
    CHECK((e.F_bb[0] - smp::kron(B, B)).norm() == 0.0);

    // The closed-loop vertex polynomial collapses to (A-BK) kron (A-BK).
    Mat K = random_mat(gen, 1, 2);
    Mat F = smp::closed_loop_vertex(e, 0, K);
    Mat direct = smp::kron(A - B * K, A - B * K);
    CHECK((F - direct).norm() <= 1e-12 * (1.0 + direct.norm()));

    smp::WeightVector w;
    w.w = Vec::Ones(1);
    Mat Phi = smp::expanded_closed_loop(e, w, K);
    Mat Phi_direct = smp::compress(direct, 2);
    CHECK((Phi - Phi_direct).norm() <= 1e-12 * (1.0 + Phi_direct.norm()));
  }
}

TEST_CASE("expanded propagation of a deterministic system tracks vech of the outer product") {
  std::mt19937 gen(32);
  Mat A(2, 2);
  A << 0.6, 0.2,  //
      -0.1, 0.5;
  Mat B(2, 1);
  B << 1.0, 0.5;
  Mat K(1, 2);
  K << 0.3, -0.2;
  Mat AB(2, 3);
  AB << A, B;
  Vec v = smp::vec(AB);
  smp::SmpVertexSet s = smp::from_iid(v * v.transpose(), 2, 1);
  smp::ExpandedVertices e = smp::block_moment_matrices(s);

  Vec x0(2);
  x0 << 1.0, -2.0;
  const int T = 12;
  smp::WeightVector w;
  w.w = Vec::Ones(1);
  smp::ExpandedTrajectory traj = smp::propagate(e, {w}, K, smp::lift_state(x0), T);
  REQUIRE(traj.states.size() == static_cast<std::size_t>(T) + 1);

  Mat Acl = A - B * K;
  Vec x = x0;
  for (int t = 0; t <= T; ++t) {
    Vec expect = smp::vech(x * x.transpose());
    CHECK((traj.states[static_cast<std::size_t>(t)] - expect).norm() <=
          1e-10 * (1.0 + expect.norm()));
    x = Acl * x;
  }
}

TEST_CASE("reference study model expands to the expected shapes") {
  smp::SmpVertexSet s = smp::reference_study::model();
  smp::ExpandedVertices e = smp::block_moment_matrices(s);
  CHECK(e.N() == 9);
  CHECK(e.n == 2);
  CHECK(e.m == 1);
  CHECK(e.en() == 3);
  for (Index k = 0; k < e.N(); ++k) {
    CHECK(e.F_aa[static_cast<std::size_t>(k)].rows() == 4);
    CHECK(e.F_aa[static_cast<std::size_t>(k)].cols() == 4);
    CHECK(e.F_ab[static_cast<std::size_t>(k)].cols() == 2);
    CHECK(e.F_ba[static_cast<std::size_t>(k)].cols() == 2);
    CHECK(e.F_bb[static_cast<std::size_t>(k)].cols() == 1);
  }
}

TEST_CASE("lift_state and degenerate propagation") {
  Vec x0(2);
  x0 << 1.0, 1.0;
  Vec lifted = smp::lift_state(x0);
  REQUIRE(lifted.size() == 3);
  CHECK(lifted(0) == 1.0);
  CHECK(lifted(1) == 1.0);
  CHECK(lifted(2) == 1.0);

  smp::SmpVertexSet s = smp::reference_study::model();
  smp::ExpandedVertices e = smp::block_moment_matrices(s);
  smp::WeightVector w = s.weights_for(smp::reference_study::theta_center());
  Mat K = Mat::Zero(1, 2);
  smp::ExpandedTrajectory traj = smp::propagate(e, {w}, K, lifted, 0);
  REQUIRE(traj.states.size() == 1);
  CHECK((traj.states[0] - lifted).norm() == 0.0);

  CHECK_THROWS_AS((void)smp::propagate(e, {w}, K, lifted, -1), std::invalid_argument);
  CHECK_THROWS_AS((void)smp::propagate(e, {w, w}, K, lifted, 3), std::invalid_argument);
  Vec bad(2);
  bad << 1.0, 1.0;
  CHECK_THROWS_AS((void)smp::propagate(e, {w}, K, bad, 3), std::invalid_argument);
}

TEST_CASE("expanded transition matrix is linear in the vertex weights") {
  std::mt19937 gen(33);
  smp::SmpVertexSet s = smp::reference_study::model();
  smp::ExpandedVertices e = smp::block_moment_matrices(s);
  Mat K = random_mat(gen, 1, 2);

  std::uniform_real_distribution<double> u(0.01, 1.0);
  Vec t1(3), t2(3);
  for (Index i = 0; i < 3; ++i) {
    t1(i) = u(gen);
    t2(i) = u(gen);
  }
  t1 /= t1.sum();
  t2 /= t2.sum();
  smp::WeightVector w1 = s.weights_for(t1);
  smp::WeightVector w2 = s.weights_for(t2);

  const double alpha = 0.37;
  smp::WeightVector wm;
  wm.w = alpha * w1.w + (1.0 - alpha) * w2.w;
  Mat mixed = smp::expanded_closed_loop(e, wm, K);
  Mat blend = alpha * smp::expanded_closed_loop(e, w1, K) +
              (1.0 - alpha) * smp::expanded_closed_loop(e, w2, K);
  CHECK((mixed - blend).norm() <= 1e-12 * (1.0 + blend.norm()));
}
