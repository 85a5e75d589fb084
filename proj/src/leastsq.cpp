// Copyright 2026 The rkmf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "rkmf/leastsq.hpp"

#include <cmath>

#include "rkmf/densefun.hpp"

namespace rkmf::leastsq {

LsqReport lsmr(const std::function<Vector(const Vector&)>& apply,
               const std::function<Vector(const Vector&)>& applyT, Index rows,
               Index cols, const Vector& rhs, Real atol, Real btol,
               Index max_iter) {
  if (rhs.size() != rows) throw ShapeError("lsmr: rhs length mismatch");
  if (max_iter <= 0) max_iter = 4 * cols;

  LsqReport rep;
  rep.solution = Vector::Zero(cols);

  // Golub-Kahan start.
  Vector u = rhs;
  Real beta = u.norm();
  const Real normb = beta;
  if (beta == 0.0) {
    rep.converged = true;
    return rep;
  }
  u /= beta;
  Vector v = applyT(u);
  Real alpha = v.norm();
  if (alpha == 0.0) {
    rep.converged = true;  // B^T rhs = 0: x = 0 already stationary
    rep.residual_norm = normb;
    return rep;
  }
  v /= alpha;

  // Fong & Saunders recurrence state (damp = 0).
  Real zetabar = alpha * beta;
  Real alphabar = alpha;
  Real rho = 1.0, rhobar = 1.0, cbar = 1.0, sbar = 0.0;
  Vector h = v;
  Vector hbar = Vector::Zero(cols);
  Real betadd = beta, betad = 0.0;
  Real rhodold = 1.0, tautildeold = 0.0, thetatilde = 0.0, zeta = 0.0;
  Real normA2 = alpha * alpha;
  Real normr = beta, normar = std::abs(zetabar);

  for (Index iter = 1; iter <= max_iter; ++iter) {
    u = apply(v) - alpha * u;
    beta = u.norm();
    if (beta > 0.0) u /= beta;
    normA2 += beta * beta;
    v = applyT(u) - beta * v;
    alpha = v.norm();
    if (alpha > 0.0) v /= alpha;
    normA2 += alpha * alpha;

    // Plane rotation P_k eliminating beta_{k+1}.
    const Real rhoold = rho;
    rho = std::hypot(alphabar, beta);
    const Real c = alphabar / rho;
    const Real s = beta / rho;
    const Real thetanew = s * alpha;
    alphabar = c * alpha;

    // Rotation Pbar_k.
    const Real rhobarold = rhobar;
    const Real zetaold = zeta;
    const Real thetabar = sbar * rho;
    const Real rhotemp = cbar * rho;
    rhobar = std::hypot(rhotemp, thetanew);
    cbar = rhotemp / rhobar;
    sbar = thetanew / rhobar;
    zeta = cbar * zetabar;
    zetabar = -sbar * zetabar;

    hbar = h - (thetabar * rho / (rhoold * rhobarold)) * hbar;
    rep.solution += (zeta / (rho * rhobar)) * hbar;
    h = v - (thetanew / rho) * h;

    // ||r|| estimate.
    const Real betahat = c * betadd;
    betadd = -s * betadd;
    const Real thetatildeold = thetatilde;
    const Real rhotildeold = std::hypot(rhodold, thetabar);
    const Real ctildeold = rhodold / rhotildeold;
    const Real stildeold = thetabar / rhotildeold;
    thetatilde = stildeold * rhobar;
    rhodold = ctildeold * rhobar;
    betad = -stildeold * betad + ctildeold * betahat;
    tautildeold = (zetaold - thetatildeold * tautildeold) / rhotildeold;
    const Real taud = (zeta - thetatilde * tautildeold) / rhodold;
    normr = std::hypot(betad - taud, betadd);

    normar = std::abs(zetabar);
    rep.normar_history.push_back(normar);
    rep.iterations = iter;

    const Real normA = std::sqrt(normA2);
    const Real normx = rep.solution.norm();
    if (normar <= atol * normA * normr ||
        normr <= btol * normb + atol * normA * normx) {
      rep.converged = true;
      break;
    }
  }
  rep.residual_norm = normr;
  rep.normal_residual_norm = normar;
  return rep;
}

LsqReport lsmr(const Matrix& B, const Vector& rhs, Real atol, Real btol,
               Index max_iter) {
  return lsmr([&B](const Vector& x) -> Vector { return B * x; },
              [&B](const Vector& u) -> Vector { return B.transpose() * u; },
              B.rows(), B.cols(), rhs, atol, btol, max_iter);
}

LsqReport sketch_precondition_lsq(const Matrix& W, const Vector& w_next,
                                  const sketch::SketchOperator& S) {
  const Index n = W.rows();
  const Index m = W.cols();
  if (w_next.size() != n)
    throw ShapeError("sketch_precondition_lsq: rhs length mismatch");
  if (S.n != n)
    throw ShapeError("sketch_precondition_lsq: sketch width mismatch");
  if (S.d < m + 1)
    throw ParameterError("sketch_precondition_lsq: need d >= cols(W) + 1");

  const Matrix SW = sketch::sketch_apply(S, W);
  const auto qr = densefun::thin_qr(SW);
  const Real dmax = qr.T.diagonal().cwiseAbs().maxCoeff();
  if (qr.T.diagonal().cwiseAbs().minCoeff() <= 1e-14 * dmax)
    throw NumericalError("sketch_precondition_lsq: whitening breakdown");
  const auto Tview = qr.T.triangularView<Eigen::Upper>();

  // Sketched solution as the initial guess.
  const Vector y0 = Tview.solve(qr.Q.transpose() * sketch::sketch_apply(S, w_next));
  const Vector r0 = w_next - W * y0;

  // Polish min ||(W T^{-1}) dz - r0|| with LSMR; the whitened operator has
  // singular values within the sketch distortion of 1.
  LsqReport inner = lsmr(
      [&](const Vector& z) -> Vector { return W * Tview.solve(z); },
      [&](const Vector& u) -> Vector {
        return qr.T.triangularView<Eigen::Upper>().transpose().solve(
            W.transpose() * u);
      },
      n, m, r0);

  LsqReport rep;
  rep.solution = y0 + Tview.solve(inner.solution);
  rep.iterations = inner.iterations;
  rep.converged = inner.converged;
  rep.normar_history = std::move(inner.normar_history);
  const Vector resid = w_next - W * rep.solution;
  rep.residual_norm = resid.norm();
  rep.normal_residual_norm = (W.transpose() * resid).norm();
  return rep;
}

}  // namespace rkmf::leastsq
