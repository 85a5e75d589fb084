// Copyright 2026 The rkmf Authors.
// SPDX-License-Identifier: Apache-2.0
#ifndef RKMF_RESTART_HPP
#define RKMF_RESTART_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rkmf/basis.hpp"
#include "rkmf/densefun.hpp"
#include "rkmf/problems.hpp"
#include "rkmf/sketch.hpp"
#include "rkmf/sparse.hpp"
#include "rkmf/types.hpp"

namespace rkmf::restart {

struct RestartOptions {
  Index m_r = 20;
  Real tol = 1e-10;          // stop when ||y_k|| <= tol
  Index k_max = 100;
  Index budget_total_m = 4000;  // cap on k*m_r (f(R_accum) cost is cubic)
  Real divergence_factor = 1e6;
};

struct CycleRecord {
  Index cycle = 0;  // 1-based
  Index total_m = 0;
  long long total_matvecs = 0;
  Real update_norm = 0.0;
  std::optional<Real> error_vs_reference;
  Real kappa_W = 0.0;        // condition of this cycle's basis block
  Real leftmost_ritz_re = 0.0;  // of this cycle's compression
  Real alpha_dev = 0.0;      // |start_norm - 1| of inner rebuilds (k >= 2)
  Real elapsed_ms = 0.0;
  Real build_ms = 0.0;  // basis-build share of elapsed_ms
  Real funm_ms = 0.0;   // dense-function share of elapsed_ms
};

// Test-only hook: fired after each cycle's update with the cycle basis
// block (as built, before it is discarded), the accumulated compression,
// and the running approximation.
struct CycleInfo {
  Index cycle;
  const Matrix& W;        // n x m_k (+1 if a next vector exists)
  Index m_k;              // columns used by the update
  const Matrix& R_accum;  // M_k x M_k
  const Vector& update;
  const Vector& f_hat;
  Real alpha;             // global scale from cycle 1
};
using CycleObserver = std::function<void(const CycleInfo&)>;

struct RestartResult {
  Vector f_hat;
  std::vector<CycleRecord> history;
  Matrix R_accum;
  bool converged = false;
  Real alpha = 0.0;
  Index cycles = 0;
  Index total_m = 0;
  PerfCounters counters;
};

// Restarted (randomized) Krylov evaluation of f(A) b. S == nullptr selects
// the classical builder; otherwise the same sketch is reused every cycle.
// Each cycle appends its Hessenberg block to R_accum (coupling entry =
// previous subdiagonal scaled by the rebuild's start norm), recomputes
// F = f(R_accum) in full, and adds y_k = alpha * W^(k) * F[rows of block k,
// column 1]. Stops on ||y_k|| <= tol, happy breakdown, k_max, or the
// total-m budget. Throws "restart divergence" on NaN or a 1e6x update blowup.
RestartResult restarted_krylov(const sparse::SparseMatrix& A, const Vector& b,
                               const densefun::FunctionSpec& f,
                               const RestartOptions& opts,
                               const sketch::SketchOperator* S = nullptr,
                               const CycleObserver& observer = nullptr,
                               const Vector* reference = nullptr);

// --- Convergence sweeps over methods (backs the CLI `run` subcommand) ---

struct MethodSpec {
  std::string name;  // arnoldi | incomplete | rand | rand-ls | sfom |
                     // restart | restart-rand
  Index m = 100;     // max Krylov dimension (m_r for restarted methods)
  // Sampled m values for one-shot methods. Unset = {m}; an explicitly empty
  // grid yields no records for the method.
  std::optional<std::vector<Index>> m_grid;
  Index k_trunc = 5;
  Index d = 0;       // 0 = default (4m one-shot, 16 m_r restarted)
  Index zeta = 4;
  Real tol = 1e-10;
  Index k_max = 100;
  std::uint64_t seed = 0;
  bool precond = true;  // rand-ls least-squares path
};

struct SweepRecord {
  std::string method;
  Index n = 0;
  Index m_or_totalm = 0;
  Index cycle = 0;  // 0 for one-shot rows
  long long matvecs = 0;
  Real rel_error = std::numeric_limits<Real>::quiet_NaN();
  Real update_norm = 0.0;
  Real kappa_W = 0.0;
  Real leftmost_ritz_re = 0.0;
  Real elapsed_ms = 0.0;
  std::string note;
  // Phase shares (not CSV columns; the CLI aggregates them for its timing
  // summary). Basis build vs dense-function-plus-update evaluation.
  Real phase_build_ms = 0.0;
  Real phase_eval_ms = 0.0;
};

// Runs every method against the problem; a method failure becomes a single
// NaN row carrying the error text, and the sweep continues. reference may
// be empty (rel_error stays NaN). with_timing controls elapsed_ms capture
// (off keeps output byte-deterministic). threads > 1 runs method cells in
// parallel; row order stays the config order.
std::vector<SweepRecord> convergence_sweep(
    const problems::ProblemInstance& problem,
    const std::vector<MethodSpec>& methods, const Vector& reference,
    bool with_timing = false, int threads = 1);

}  // namespace rkmf::restart

#endif  // RKMF_RESTART_HPP
