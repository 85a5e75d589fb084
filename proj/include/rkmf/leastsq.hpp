// Copyright 2026 The rkmf Authors.
// SPDX-License-Identifier: Apache-2.0
#ifndef RKMF_LEASTSQ_HPP
#define RKMF_LEASTSQ_HPP

#include <functional>
#include <vector>

#include "rkmf/sketch.hpp"
#include "rkmf/types.hpp"

namespace rkmf::leastsq {

struct LsqReport {
  Vector solution;
  Index iterations = 0;
  Real residual_norm = 0.0;         // estimate of ||rhs - B x||
  Real normal_residual_norm = 0.0;  // estimate of ||B^T (rhs - B x)||
  bool converged = false;
  std::vector<Real> normar_history;  // ||B^T r|| estimate per iteration
};

// LSMR (Golub-Kahan bidiagonalization, minimizes ||B^T r|| monotonically)
// in operator form: apply(x) = B x (rows-long), applyT(u) = B^T u
// (cols-long). max_iter = 0 means 4 * cols.
LsqReport lsmr(const std::function<Vector(const Vector&)>& apply,
               const std::function<Vector(const Vector&)>& applyT,
               Index rows, Index cols, const Vector& rhs, Real atol = 1e-12,
               Real btol = 1e-12, Index max_iter = 0);

LsqReport lsmr(const Matrix& B, const Vector& rhs, Real atol = 1e-12,
               Real btol = 1e-12, Index max_iter = 0);

// Sketch-and-precondition solve of min_y ||W y - w_next||: whitens with the
// thin QR of S W, takes the sketched solution as the initial guess and
// polishes with LSMR on the preconditioned operator W T^{-1}.
LsqReport sketch_precondition_lsq(const Matrix& W, const Vector& w_next,
                                  const sketch::SketchOperator& S);

}  // namespace rkmf::leastsq

#endif  // RKMF_LEASTSQ_HPP
