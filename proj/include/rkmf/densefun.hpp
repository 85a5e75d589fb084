// Copyright 2026 The rkmf Authors.
// SPDX-License-Identifier: Apache-2.0
#ifndef RKMF_DENSEFUN_HPP
#define RKMF_DENSEFUN_HPP

#include <functional>
#include <string>

#include "rkmf/types.hpp"

namespace rkmf::densefun {

// Which scalar function f is applied to the compressed operator.
//   ExpNeg(t):      f(z) = exp(-t z)
//   Phi1Neg(t):     f(z) = phi1(-t z),  phi1(w) = (e^w - 1)/w
//   CosSqrt(nu,t):  f(z) = cos(nu t sqrt(z))  (even in sqrt(z), branch-free)
//   ScalarTable:    arbitrary scalar callable, evaluated by point
//                   Schur-Parlett (requires well-separated eigenvalues)
struct FunctionSpec {
  enum class Kind { ExpNeg, Phi1Neg, CosSqrt, ScalarTable };
  Kind kind = Kind::ExpNeg;
  Real t = 1.0;
  Real nu = 1.0;
  std::function<Complex(Complex)> table;
  std::string table_id;

  static FunctionSpec exp_neg(Real t);
  static FunctionSpec phi1_neg(Real t);
  static FunctionSpec cos_sqrt(Real nu, Real t);
  static FunctionSpec scalar_table(std::string id,
                                   std::function<Complex(Complex)> fn);
};

// f at a single (possibly complex) spectrum point.
Complex eval_scalar(const FunctionSpec& f, Complex z);

// phi1(w) = (e^w - 1)/w with a series branch near 0.
Complex phi1_scalar(Complex w);

struct ThinQrResult {
  Matrix Q;  // orthonormal columns
  Matrix T;  // upper triangular, nonnegative diagonal
  bool rank_deficient = false;
};

// Thin QR with the diagonal-sign convention T(i,i) >= 0. Near-zero diagonal
// sets rank_deficient instead of failing.
ThinQrResult thin_qr(const Matrix& B);

// Scaling-and-squaring matrix exponential (diagonal Pade, degree 13).
Matrix expm(const Matrix& X);

// phi1(X) by scaling + Taylor + the doubling phi1(2Z) = (e^Z + I) phi1(Z)/2
// (the companion exponential comes along via e^Z = I + Z phi1(Z)).
Matrix phi1m(const Matrix& X);

// cos(a sqrt(X)). Entire-series evaluation when a^2*||X||_1 <= 1, complex
// Schur + blocked Parlett recurrence otherwise. Both strategies are exposed
// so they can be cross-checked.
Matrix cosm_sqrt(const Matrix& X, Real a);
Matrix cosm_sqrt_taylor(const Matrix& X, Real a);
Matrix cosm_sqrt_schur(const Matrix& X, Real a);

// Generic dispatch used by every approximant: f(X) for the FunctionSpec
// kinds above. Throws NumericalError on overflow/NaN or Schur failure.
Matrix funm(const Matrix& X, const FunctionSpec& f);

// Reference-quality f(X)b via complex eigendecomposition. Warns on stderr
// when the eigenvector condition exceeds 1e8 and throws beyond 1e12
// (near-defective input). Test/reference use only.
Vector dense_eig_oracle(const Matrix& X, const FunctionSpec& f,
                        const Vector& b);

}  // namespace rkmf::densefun

#endif  // RKMF_DENSEFUN_HPP
