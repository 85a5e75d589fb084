// Copyright 2026 The rkmf Authors.
// SPDX-License-Identifier: Apache-2.0
#ifndef RKMF_PROBLEMS_HPP
#define RKMF_PROBLEMS_HPP

#include <cstdint>
#include <string>

#include "rkmf/densefun.hpp"
#include "rkmf/sparse.hpp"
#include "rkmf/types.hpp"

namespace rkmf::problems {

enum class ProblemKind { ConvDiff, Membrane, External };

// Paper: Dirichlet on the two x-faces (u=0 inflow, u=1 outflow), Neumann
// mirror on the remaining faces. AllDirichlet: every face clamped (the
// outflow face still carries u=1).
enum class ConvDiffBoundary { Paper, AllDirichlet };

struct ProblemMeta {
  Index nx = 0, ny = 0, nz = 1;
  Index n_r = 0;
  Real alpha = 0.0, beta = 0.0;
  Real nu = 0.0, t = 0.0;
  std::uint64_t seed = 0;
  int p = 0, zero_index = 0;
  ConvDiffBoundary boundary = ConvDiffBoundary::Paper;
};

struct ProblemInstance {
  sparse::SparseMatrix L;
  Vector b;
  densefun::FunctionSpec f;
  Vector u0;
  ProblemKind kind = ProblemKind::External;
  ProblemMeta meta;
};

// Convection-diffusion -alpha*Lap(u) + beta*du/dx on the unit square/cube,
// centered differences, uniform lumped mass. Dirichlet rows are identity
// rows, so L has the block form [[L11, L12], [0, I]]. b = g - L*u0 with
// g the indicator of the u=1 face; interior u0 entries are N(0.5, 0.25)
// draws (variance 0.25). f = Phi1Neg(t). Node (ix,iy,iz) sits at flat
// index (ix*ny + iy)*nz + iz.
ProblemInstance gen_conv_diff(
    Index nx, Index ny, Index nz, Real alpha, Real beta, Real t,
    std::uint64_t seed,
    ConvDiffBoundary boundary = ConvDiffBoundary::Paper);

// 5-point Laplacian on the unit disk (h = 1/n_r); the ring of exterior
// nodes adjacent to the disk is clamped via identity rows. b_i =
// J_p(eta_{p,zero_index} * min(r_i, 1)); f = CosSqrt(nu, t); u0 = b.
ProblemInstance gen_membrane(Index n_r, Real nu, Real t, int p,
                             int zero_index);

// Bessel function of the first kind, integer order. Power series with
// compensated summation while the series is numerically safe; backward
// (Miller) recurrence beyond. Domain 0 <= p <= 20, 0 <= x <= 60.
Real bessel_j(int p, Real x);

// k-th positive zero of J_p (1 <= k <= 20): McMahon-sized sign scan plus
// bisection to an interval of 1e-12. Throws if no bracket exists in the
// supported range.
Real bessel_zero(int p, int k);

// External-kind instance from a Matrix Market file and a vector file.
ProblemInstance load_problem(const std::string& matrix_path,
                             const std::string& b_path,
                             const densefun::FunctionSpec& f);

// Reference values of f(L) b computed from problem structure instead of a
// Krylov method. ConvDiff uses the exact tensor splitting of the interior
// block (per-factor eigendecompositions when they are well conditioned;
// otherwise exp factorizes directly and phi1 integrates exp via adaptive
// Gauss-Legendre). Membrane uses the symmetric interior eigendecomposition.
Vector conv_diff_reference(const ProblemInstance& prob,
                           const densefun::FunctionSpec& f);
Vector membrane_reference(const ProblemInstance& prob,
                          const densefun::FunctionSpec& f);

// Dispatch on kind; External falls back to the dense eigenvector oracle
// (guarded to n <= 2500).
Vector reference_solution(const ProblemInstance& prob);

}  // namespace rkmf::problems

#endif  // RKMF_PROBLEMS_HPP
