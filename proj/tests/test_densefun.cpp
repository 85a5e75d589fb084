// Copyright 2026 The rkmf Authors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "rkmf/densefun.hpp"
#include "rkmf/types.hpp"

using namespace rkmf;
using densefun::FunctionSpec;

namespace {

// Random matrix with prescribed real spectrum and orthogonal eigenvectors,
// optionally reduced to upper Hessenberg form (spectrum preserved).
Matrix with_spectrum(const Vector& lam, std::uint64_t seed,
                     bool hessenberg) {
  const Index n = lam.size();
  const Matrix Q = oracle::random_orthonormal(n, n, seed);
  Matrix X = Q * lam.asDiagonal() * Q.transpose();
  if (hessenberg) {
    Eigen::HessenbergDecomposition<Matrix> hd(X);
    X = hd.matrixH();
  }
  return X;
}

}  // namespace

TEST_SUITE("densefun") {

TEST_CASE("thin_qr of the identity is (I, I)") {
  const Matrix I = Matrix::Identity(6, 6);
  const auto qr = densefun::thin_qr(I);
  CHECK((qr.Q - I).norm() == 0.0);
  CHECK((qr.T - I).norm() == 0.0);
  CHECK(!qr.rank_deficient);
}

TEST_CASE("thin_qr of an orthonormal block returns it with T = I") {
  const Matrix B = oracle::random_orthonormal(40, 8, 3);
  const auto qr = densefun::thin_qr(B);
  CHECK((qr.T - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK((qr.Q - B).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("thin_qr reconstructs a random 100x20 input") {
  const Matrix B = oracle::random_matrix(100, 20, 17);
  const auto qr = densefun::thin_qr(B);
  CHECK((qr.Q * qr.T - B).norm() <= 1e-13 * B.norm());
  CHECK((qr.Q.transpose() * qr.Q - Matrix::Identity(20, 20))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
  for (Index j = 0; j < 20; ++j) {
    CHECK(qr.T(j, j) >= 0.0);
    for (Index i = j + 1; i < 20; ++i) CHECK(qr.T(i, j) == 0.0);
  }
}

TEST_CASE("thin_qr flags rank deficiency without throwing") {
  Matrix B = oracle::random_matrix(30, 4, 21);
  B.col(3) = B.col(0);  // exact rank 3
  CHECK(densefun::thin_qr(B).rank_deficient);
}

TEST_CASE("expm of zero and of a diagonal") {
  CHECK((densefun::expm(Matrix::Zero(5, 5)) - Matrix::Identity(5, 5))
            .norm() == 0.0);
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = std::log(2.0);
  const Matrix E = densefun::expm(D);
  CHECK(E(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(E(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(E(0, 1) == 0.0);
  CHECK(E(1, 0) == 0.0);
}

TEST_CASE("expm matches the eigendecomposition reference on 20x20 inputs") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Matrix X = oracle::random_matrix(20, 20, seed, 1.0 / 4.5);
    const Matrix want = oracle::eig_fun(-X, FunctionSpec::exp_neg(1.0));
    CHECK(oracle::rel_err(densefun::expm(X), want) <= 1e-10);
  }
}

TEST_CASE("expm squaring identity") {
  for (std::uint64_t seed : {5u, 6u}) {
    Matrix X = oracle::random_matrix(15, 15, seed);
    X *= 10.0 / X.cwiseAbs().colwise().sum().maxCoeff();  // ||X||_1 = 10
    const Matrix half = densefun::expm(0.5 * X);
    CHECK(oracle::rel_err(half * half, densefun::expm(X)) <= 1e-11);
  }
}

TEST_CASE("expm overflow is reported") {
  Matrix X = Matrix::Zero(2, 2);
  X(0, 0) = 20000.0;
  CHECK_THROWS_WITH_AS(densefun::expm(X), doctest::Contains("overflow"),
                       NumericalError);
}

TEST_CASE("phi1m limit, scalar value, and defining identity") {
  CHECK((densefun::phi1m(Matrix::Zero(4, 4)) - Matrix::Identity(4, 4))
            .norm() == 0.0);

  Matrix one(1, 1);
  one(0, 0) = 1.0;
  CHECK(densefun::phi1m(one)(0, 0) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));

  for (std::uint64_t seed : {9u, 10u}) {
    const Matrix X = oracle::random_matrix(20, 20, seed, 1.0 / 4.0);
    const Matrix P = densefun::phi1m(X);
    const Matrix want = densefun::expm(X) - Matrix::Identity(20, 20);
    CHECK(oracle::rel_err(X * P, want) <= 1e-10);
  }
}

TEST_CASE("phi1m matches a short Taylor series for small inputs") {
  Matrix X = oracle::random_matrix(10, 10, 13);
  X *= 0.1 / X.norm();
  Matrix want = Matrix::Identity(10, 10);
  Matrix term = Matrix::Identity(10, 10);
  for (int k = 1; k <= 10; ++k) {
    term = term * X / Real(k + 1);
    want += term;
  }
  CHECK(oracle::rel_err(densefun::phi1m(X), want) <= 1e-12);
}

TEST_CASE("funm on a diagonal evaluates the scalar map exactly") {
  Vector lam(4);
  lam << 1.0, 4.0, 9.0, 25.0;
  const Matrix X = lam.asDiagonal();
  const FunctionSpec f = FunctionSpec::cos_sqrt(2.0, 0.7);
  const Matrix F = densefun::funm(X, f);
  for (Index i = 0; i < 4; ++i)
    CHECK(F(i, i) == doctest::Approx(std::cos(2.0 * 0.7 * std::sqrt(lam(i))))
                         .epsilon(1e-12));
  CHECK(F.cwiseAbs().sum() ==
        doctest::Approx(F.diagonal().cwiseAbs().sum()).epsilon(1e-12));
}

TEST_CASE("funm with ExpNeg(0) is the identity") {
  const Matrix X = oracle::random_matrix(8, 8, 31);
  CHECK((densefun::funm(X, FunctionSpec::exp_neg(0.0)) -
         Matrix::Identity(8, 8))
            .cwiseAbs()
            .maxCoeff() <= 1e-14);
}

TEST_CASE("cos-sqrt on a Hessenberg matrix matches the eig reference") {
  std::mt19937_64 gen(55);
  std::uniform_real_distribution<Real> U(1.0, 100.0);
  Vector lam(30);
  for (Index i = 0; i < lam.size(); ++i) lam(i) = U(gen);
  const Matrix X = with_spectrum(lam, 19, /*hessenberg=*/true);
  const FunctionSpec f = FunctionSpec::cos_sqrt(1.0, 1.0);
  CHECK(oracle::rel_err(densefun::funm(X, f), oracle::eig_fun(X, f)) <=
        1e-9);
}

TEST_CASE("cos-sqrt is branch-free: matches the entire series when small") {
  Matrix X = oracle::random_matrix(12, 12, 23);
  X *= 0.8 / X.cwiseAbs().colwise().sum().maxCoeff();
  const Real nut = 0.9;
  // g(z) = sum_k (-1)^k (nu t)^{2k} z^k / (2k)!
  Matrix want = Matrix::Identity(12, 12);
  Matrix pw = Matrix::Identity(12, 12);
  Real coef = 1.0;
  for (int k = 1; k <= 20; ++k) {
    pw = pw * X;
    coef *= -nut * nut / Real((2 * k - 1) * (2 * k));
    want += coef * pw;
  }
  const Matrix got = densefun::funm(X, FunctionSpec::cos_sqrt(nut, 1.0));
  CHECK(oracle::rel_err(got, want) <= 1e-12);
}

TEST_CASE("cos-sqrt handles negative and clustered spectra") {
  // cos(nu t sqrt(z)) is entire, so negative eigenvalues (cosh territory)
  // and repeated eigenvalues must both work.
  SUBCASE("negative spectrum") {
    Vector lam(6);
    lam << -9.0, -4.0, -1.0, 1.0, 4.0, 9.0;
    const Matrix X = with_spectrum(lam, 3, false);
    const FunctionSpec f = FunctionSpec::cos_sqrt(1.0, 0.5);
    CHECK(oracle::rel_err(densefun::funm(X, f), oracle::eig_fun(X, f)) <=
          1e-10);
  }
  SUBCASE("clustered spectrum") {
    Vector lam(8);
    lam << 4.0, 4.0, 4.0 + 1e-9, 9.0, 9.0, 16.0, 16.0 + 1e-10, 25.0;
    const Matrix X = with_spectrum(lam, 4, false);
    const FunctionSpec f = FunctionSpec::cos_sqrt(1.2, 1.0);
    // eig reference is unreliable for confluent spectra; use the scalar map
    // through the orthogonal eigenbasis instead.
    const Matrix Q = oracle::random_orthonormal(8, 8, 4);
    Vector flam(8);
    for (Index i = 0; i < 8; ++i)
      flam(i) = std::cos(1.2 * std::sqrt(lam(i)));
    const Matrix want = Q * flam.asDiagonal() * Q.transpose();
    CHECK(oracle::rel_err(densefun::funm(X, f), want) <= 1e-9);
  }
}

TEST_CASE("funm keeps block-lower-triangular structure") {
  // [[A, 0], [B, C]] with well-separated diagonal blocks: f of it has f(A),
  // f(C) on the diagonal and an exactly/near-zero upper-right block.
  const Index na = 6, nc = 5;
  Vector la(na), lc(nc);
  la << 1, 2, 3, 4, 5, 6;
  lc << 30, 34, 38, 42, 46;
  const Matrix A = with_spectrum(la, 7, false);
  const Matrix C = with_spectrum(lc, 8, false);
  Matrix X = Matrix::Zero(na + nc, na + nc);
  X.topLeftCorner(na, na) = A;
  X.bottomRightCorner(nc, nc) = C;
  X.bottomLeftCorner(nc, na) = oracle::random_matrix(nc, na, 9);

  for (const FunctionSpec& f :
       {FunctionSpec::exp_neg(0.4), FunctionSpec::phi1_neg(0.4),
        FunctionSpec::cos_sqrt(1.0, 0.6)}) {
    const Matrix F = densefun::funm(X, f);
    CHECK(F.topRightCorner(na, nc).cwiseAbs().maxCoeff() <=
          1e-11 * F.cwiseAbs().maxCoeff());
    CHECK(oracle::rel_err(Matrix(F.topLeftCorner(na, na)),
                          densefun::funm(A, f)) <= 1e-9);
    CHECK(oracle::rel_err(Matrix(F.bottomRightCorner(nc, nc)),
                          densefun::funm(C, f)) <= 1e-9);
  }
}

TEST_CASE("scalar-table funm evaluates a resolvent") {
  Vector lam(10);
  lam << 1, 2, 3.5, 5, 7, 9, 12, 15, 19, 24;
  const Matrix X = with_spectrum(lam, 41, false);
  const FunctionSpec f = FunctionSpec::scalar_table(
      "resolvent", [](Complex z) { return 1.0 / (1.0 + z); });
  const Matrix want =
      (Matrix::Identity(10, 10) + X).partialPivLu().solve(
          Matrix::Identity(10, 10));
  CHECK(oracle::rel_err(densefun::funm(X, f), want) <= 1e-10);
}

TEST_CASE("dense_eig_oracle on diagonal, symmetric, and zero inputs") {
  Vector lam(5);
  lam << 0.5, 1.0, 2.0, 4.0, 8.0;
  const Vector b = oracle::random_vector(5, 2);

  const Matrix D = lam.asDiagonal();
  const FunctionSpec f = FunctionSpec::exp_neg(0.3);
  const Vector got = densefun::dense_eig_oracle(D, f, b);
  for (Index i = 0; i < 5; ++i)
    CHECK(got(i) ==
          doctest::Approx(std::exp(-0.3 * lam(i)) * b(i)).epsilon(1e-12));

  const Matrix X = with_spectrum(lam, 77, false);
  CHECK(oracle::rel_err(densefun::dense_eig_oracle(X, f, b),
                        densefun::funm(X, f) * b) <= 1e-11);

  CHECK((densefun::dense_eig_oracle(Matrix::Zero(5, 5), f, b) - b).norm() <=
        1e-14 * b.norm());
}

TEST_CASE("function spec parameter validation") {
  CHECK_THROWS_AS(FunctionSpec::exp_neg(-1.0), ParameterError);
  CHECK_THROWS_AS(FunctionSpec::phi1_neg(-0.5), ParameterError);
  CHECK_THROWS_AS(FunctionSpec::cos_sqrt(0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(FunctionSpec::cos_sqrt(-2.0, 1.0), ParameterError);
}

TEST_CASE("funm rejects non-square and non-finite input") {
  CHECK_THROWS_AS(
      densefun::funm(Matrix::Zero(3, 4), FunctionSpec::exp_neg(1.0)), Error);
  Matrix X = Matrix::Zero(3, 3);
  X(1, 1) = std::numeric_limits<Real>::infinity();
  CHECK_THROWS_AS(densefun::funm(X, FunctionSpec::exp_neg(1.0)), Error);
}

}  // TEST_SUITE
