#include "doctest.h"

#include "smp/linalg.hpp"

#include <cmath>
#include <random>

using smp::Index;
using smp::Mat;
using smp::Vec;

namespace {

Mat random_mat(std::mt19937& gen, Index rows, Index cols) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat X(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) X(i, j) = u(gen);
  return X;
}

Mat random_sym(std::mt19937& gen, Index n) {
  Mat X = random_mat(gen, n, n);
  return smp::symmetrize(X);
}

// A random matrix pushed safely away from singularity.
Mat random_invertible(std::mt19937& gen, Index n) {
  Mat X = random_mat(gen, n, n);
  return X + 2.0 * static_cast<double>(n) * Mat::Identity(n, n);
}

}  // namespace

TEST_CASE("vec stacks columns and unvec inverts it") {
  Mat X(2, 3);
  X << 1, 3, 5,  //
      2, 4, 6;
  Vec v = smp::vec(X);
  REQUIRE(v.size() == 6);
  for (Index i = 0; i < 6; ++i) CHECK(v(i) == static_cast<double>(i + 1));
  CHECK((smp::unvec(v, 2, 3) - X).norm() == 0.0);

  std::mt19937 gen(11);
  for (int rep = 0; rep < 20; ++rep) {
    Mat Y = random_mat(gen, 4, 5);
    CHECK((smp::unvec(smp::vec(Y), 4, 5) - Y).norm() == 0.0);
  }
}

TEST_CASE("vech stacks the lower triangle column by column") {
  Mat S(2, 2);
  S << 7, 5,  //
      5, 9;
  Vec h = smp::vech(S);
  REQUIRE(h.size() == 3);
  CHECK(h(0) == 7.0);
  CHECK(h(1) == 5.0);
  CHECK(h(2) == 9.0);
  CHECK((smp::unvech(h) - S).norm() == 0.0);

  Mat T(3, 3);
  T << 1, 2, 3,  //
      2, 4, 5,   //
      3, 5, 6;
  Vec ht = smp::vech(T);
  REQUIRE(ht.size() == 6);
  // Columnwise lower triangle: (0,0),(1,0),(2,0),(1,1),(2,1),(2,2).
  CHECK(ht(0) == 1.0);
  CHECK(ht(1) == 2.0);
  CHECK(ht(2) == 3.0);
  CHECK(ht(3) == 4.0);
  CHECK(ht(4) == 5.0);
  CHECK(ht(5) == 6.0);
  CHECK((smp::unvech(ht) - T).norm() == 0.0);

  std::mt19937 gen(12);
  for (Index n = 1; n <= 6; ++n) {
    Mat S2 = random_sym(gen, n);
    CHECK(smp::vech(S2).size() == smp::half_dim(n));
    CHECK((smp::unvech(smp::vech(S2)) - S2).norm() == 0.0);
  }
}

TEST_CASE("kron matches the hand-worked 2x2 example and the vec identity") {
  Mat A(2, 2), B(2, 2);
  A << 1, 2,  //
      3, 4;
  B << 0, 5,  //
      6, 7;
  Mat K = smp::kron(A, B);
  REQUIRE(K.rows() == 4);
  REQUIRE(K.cols() == 4);
  Mat expect(4, 4);
  expect << 0, 5, 0, 10,   //
      6, 7, 12, 14,        //
      0, 15, 0, 20,        //
      18, 21, 24, 28;
  CHECK((K - expect).norm() == 0.0);

  // vec(A X B) = (B^T kron A) vec(X), the defining property used downstream.
  std::mt19937 gen(13);
  for (int rep = 0; rep < 30; ++rep) {
    Mat A2 = random_mat(gen, 3, 4);
    Mat X = random_mat(gen, 4, 2);
    Mat B2 = random_mat(gen, 2, 5);
    Vec lhs = smp::vec(A2 * X * B2);
    Vec rhs = smp::kron(B2.transpose(), A2) * smp::vec(X);
    CHECK((lhs - rhs).norm() <= 1e-13 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("elimination and duplication matrices satisfy their defining identities") {
  std::mt19937 gen(14);
  for (Index n = 2; n <= 5; ++n) {
    Mat Ce = smp::elimination_matrix(n);
    Mat Cd = smp::duplication_matrix(n);
    Index nt = smp::half_dim(n);
    REQUIRE(Ce.rows() == nt);
    REQUIRE(Ce.cols() == n * n);
    REQUIRE(Cd.rows() == n * n);
    REQUIRE(Cd.cols() == nt);

    for (int rep = 0; rep < 10; ++rep) {
      Mat X = random_mat(gen, n, n);
      CHECK((Ce * smp::vec(X) - smp::vech(X)).norm() == 0.0);
      Mat S = random_sym(gen, n);
      CHECK((Cd * smp::vech(S) - smp::vec(S)).norm() == 0.0);
    }
    // One-sided inverse: eliminating after duplicating is the identity.
    CHECK((Ce * Cd - Mat::Identity(nt, nt)).norm() == 0.0);
  }
}

TEST_CASE("n=2 elimination and duplication matrices are the expected 0/1 patterns") {
  Mat Ce = smp::elimination_matrix(2);
  Mat expect_e(3, 4);
  expect_e << 1, 0, 0, 0,  //
      0, 1, 0, 0,          //
      0, 0, 0, 1;
  CHECK((Ce - expect_e).norm() == 0.0);

  Mat Cd = smp::duplication_matrix(2);
  Mat expect_d(4, 3);
  expect_d << 1, 0, 0,  //
      0, 1, 0,          //
      0, 1, 0,          //
      0, 0, 1;
  CHECK((Cd - expect_d).norm() == 0.0);
}

TEST_CASE("compress applies the elimination/duplication sandwich") {
  std::mt19937 gen(15);
  for (Index n = 2; n <= 4; ++n) {
    Mat Y = random_mat(gen, n * n, n * n);
    Mat direct = smp::elimination_matrix(n) * Y * smp::duplication_matrix(n);
    CHECK((smp::compress(Y, n) - direct).norm() == 0.0);
  }
}

TEST_CASE("compressed Kronecker squares behave like the full ones") {
  std::mt19937 gen(16);
  for (Index n = 2; n <= 4; ++n) {
    Mat Ce = smp::elimination_matrix(n);
    Mat Cd = smp::duplication_matrix(n);
    for (int rep = 0; rep < 100; ++rep) {
      Mat X = random_mat(gen, n, n);
      Mat XX = smp::kron(X, X);
      // Duplicating a compressed square-map output reproduces the full map on
      // the symmetric subspace: Cd Ce (X kron X) Cd = (X kron X) Cd.
      Mat lhs = Cd * Ce * XX * Cd;
      Mat rhs = XX * Cd;
      CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }
    for (int rep = 0; rep < 100; ++rep) {
      Mat X = random_invertible(gen, n);
      Mat C = smp::compress(smp::kron(X, X), n);
      // Determinant of the compressed square map.
      double lhs = C.determinant();
      double rhs = std::pow(X.determinant(), static_cast<double>(n + 1));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
      // Inverse of the compressed square map is the compressed square of the
      // inverse.
      Mat Cinv = smp::compress(smp::kron(X.inverse(), X.inverse()), n);
      CHECK((C * Cinv - Mat::Identity(C.rows(), C.cols())).norm() <= 1e-10);
    }
  }
}

TEST_CASE("sym_eig reconstructs, orders descending, and is deterministic") {
  std::mt19937 gen(17);
  for (int rep = 0; rep < 25; ++rep) {
    Mat S = random_sym(gen, 5);
    smp::SymEig e = smp::sym_eig(S);
    REQUIRE(e.values.size() == 5);
    // Descending order.
    for (Index i = 0; i + 1 < 5; ++i) CHECK(e.values(i) >= e.values(i + 1));
    // Orthonormal columns.
    CHECK((e.vectors.transpose() * e.vectors - Mat::Identity(5, 5)).norm() <= 1e-12);
    // Reconstruction.
    Mat R = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    CHECK((R - S).norm() <= 1e-12 * (1.0 + S.norm()));
    // Bitwise determinism of a repeated call.
    smp::SymEig e2 = smp::sym_eig(S);
    CHECK((e.values - e2.values).norm() == 0.0);
    CHECK((e.vectors - e2.vectors).norm() == 0.0);
  }

  Mat D = Vec::LinSpaced(4, 4.0, 1.0).asDiagonal();
  smp::SymEig ed = smp::sym_eig(D);
  for (Index i = 0; i < 4; ++i) CHECK(ed.values(i) == doctest::Approx(4.0 - i).epsilon(1e-14));
}

TEST_CASE("min_eig matches a known spectrum and handles asymmetric input via the symmetric part") {
  Mat S(2, 2);
  S << 2, 1,  //
      1, 2;
  CHECK(smp::min_eig(S) == doctest::Approx(1.0).epsilon(1e-12));

  // Asymmetric input: only the symmetric part matters.
  Mat A(2, 2);
  A << 2, 3,  //
      -1, 2;
  // Symmetric part is [[2,1],[1,2]] again.
  CHECK(smp::min_eig(A) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("psd_factor returns a square root of the PSD part") {
  std::mt19937 gen(18);
  for (int rep = 0; rep < 20; ++rep) {
    Mat B = random_mat(gen, 4, 4);
    Mat S = B * B.transpose();  // PSD by construction
    Mat R = smp::psd_factor(S);
    CHECK((R * R.transpose() - S).norm() <= 1e-11 * (1.0 + S.norm()));
  }
  // Singular PSD input: rank deficiency must not break the factor.
  Mat v(3, 1);
  v << 1, 2, 3;
  Mat S1 = v * v.transpose();
  Mat R1 = smp::psd_factor(S1);
  CHECK((R1 * R1.transpose() - S1).norm() <= 1e-11 * (1.0 + S1.norm()));
}
