// Copyright 2026 The rkmf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "rkmf/restart.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "rkmf/approximants.hpp"

namespace rkmf::restart {

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string cycle_tag(Index k) { return " (cycle " + std::to_string(k) + ")"; }

}  // namespace

RestartResult restarted_krylov(const sparse::SparseMatrix& A, const Vector& b,
                               const densefun::FunctionSpec& f,
                               const RestartOptions& opts,
                               const sketch::SketchOperator* S,
                               const CycleObserver& observer,
                               const Vector* reference) {
  if (opts.m_r < 1) throw ParameterError("restart: m_r must be >= 1");
  if (opts.k_max < 1) throw ParameterError("restart: k_max must be >= 1");
  if (!(opts.tol > 0.0)) throw ParameterError("restart: tol must be > 0");
  if (opts.budget_total_m < opts.m_r)
    throw ParameterError("restart: total-m budget below one cycle");
  const Index m_eff = std::min(opts.m_r, A.n_rows);

  RestartResult res;
  res.f_hat = Vector::Zero(A.n_rows);
  Vector start = b;
  Matrix Raccum;
  Index M = 0;
  Real coupling = 0.0;
  Real first_update = -1.0;
  const Real ref_norm = reference ? reference->norm() : 0.0;

  for (Index k = 1; k <= opts.k_max; ++k) {
    if (M + m_eff > opts.budget_total_m) break;
    const double t0 = now_ms();

    basis::KrylovDecomposition dec =
        S ? basis::randomized_arnoldi(A, *S, start, m_eff)
          : basis::arnoldi(A, start, m_eff);
    const double t_built = now_ms();
    const Index mk = dec.m();
    if (k == 1) res.alpha = dec.start_norm;
    res.counters += dec.counters;

    Matrix grown = Matrix::Zero(M + mk, M + mk);
    if (M > 0) {
      grown.topLeftCorner(M, M) = Raccum;
      // The previous residual vector enters this cycle scaled by its
      // (near-unit) start norm; fold that into the coupling entry so the
      // accumulated relation stays exact.
      grown(M, M - 1) = coupling * dec.start_norm;
    }
    grown.block(M, M, mk, mk) = dec.Rm();
    Raccum = std::move(grown);

    Matrix F;
    try {
      F = densefun::funm(Raccum, f);
    } catch (const Error& e) {
      throw NumericalError(std::string("restart: function evaluation failed") +
                           cycle_tag(k) + ": " + e.what());
    }
    const double t_funm = now_ms();
    const Vector y =
        res.alpha * (dec.W.leftCols(mk) * F.col(0).segment(M, mk));
    if (!y.allFinite())
      throw NumericalError("restart divergence" + cycle_tag(k));
    res.f_hat += y;
    const Real yn = y.norm();
    if (first_update < 0.0)
      first_update = yn;
    else if (yn > opts.divergence_factor * first_update)
      throw NumericalError("restart divergence" + cycle_tag(k));

    if (observer)
      observer(CycleInfo{k, dec.W, mk, Raccum, y, res.f_hat, res.alpha});

    CycleRecord rec;
    rec.cycle = k;
    rec.total_m = M + mk;
    rec.total_matvecs = res.counters.matvecs;
    rec.update_norm = yn;
    if (reference && ref_norm > 0.0)
      rec.error_vs_reference = (res.f_hat - *reference).norm() / ref_norm;
    rec.kappa_W = approx::basis_condition(dec);
    rec.alpha_dev = (k == 1) ? 0.0 : std::abs(dec.start_norm - 1.0);
    rec.leftmost_ritz_re = approx::ritz_values(dec).front().real();
    rec.elapsed_ms = now_ms() - t0;
    rec.build_ms = t_built - t0;
    rec.funm_ms = t_funm - t_built;
    res.history.push_back(rec);

    M += mk;
    res.cycles = k;
    res.total_m = M;

    if (yn <= opts.tol || dec.breakdown_at) {
      res.converged = true;
      break;
    }
    coupling = dec.subdiag();
    start = dec.W.col(mk);
  }
  res.R_accum = std::move(Raccum);
  return res;
}

namespace {

std::string sanitize_note(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::vector<Index> sample_grid(const MethodSpec& ms, Index n) {
  std::vector<Index> grid =
      ms.m_grid ? *ms.m_grid : std::vector<Index>{ms.m};
  for (Index& g : grid) g = std::min(g, n);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (!grid.empty() && grid.front() < 1)
    throw ParameterError("sweep: sampled m values must be >= 1");
  return grid;
}

bool is_one_shot(const std::string& name) {
  return name == "arnoldi" || name == "incomplete" || name == "rand" ||
         name == "rand-ls" || name == "sfom";
}

std::vector<SweepRecord> run_method_cell(
    const problems::ProblemInstance& prob, const MethodSpec& ms,
    const Vector& reference, bool with_timing) {
  const Index n = prob.L.n_rows;
  const Real ref_norm = reference.size() ? reference.norm() : 0.0;
  std::vector<SweepRecord> rows;
  if (ms.m_grid && ms.m_grid->empty()) return rows;

  auto base_row = [&]() {
    SweepRecord r;
    r.method = ms.name;
    r.n = n;
    return r;
  };

  if (is_one_shot(ms.name)) {
    const std::vector<Index> grid = sample_grid(ms, n);
    const Index m_max = grid.back();
    const bool randomized =
        ms.name == "rand" || ms.name == "rand-ls" || ms.name == "sfom";

    std::optional<sketch::SketchOperator> S;
    if (randomized) {
      const Index d = ms.d > 0 ? ms.d : 4 * m_max;
      S = sketch::make_sketch(d, n, ms.zeta, ms.seed);
    }

    double t0 = now_ms();
    basis::KrylovDecomposition dec;
    if (ms.name == "rand" || ms.name == "rand-ls")
      dec = basis::randomized_arnoldi(prob.L, *S, prob.b, m_max);
    else if (ms.name == "arnoldi")
      dec = basis::arnoldi(prob.L, prob.b, m_max);
    else  // incomplete, sfom
      dec = basis::incomplete_arnoldi(prob.L, prob.b, m_max, ms.k_trunc);
    const double build_ms = now_ms() - t0;

    Vector prev = Vector::Zero(n);
    bool first = true;
    for (Index mh : grid) {
      // A builder that stopped early (happy breakdown) caps the sampled
      // dimension; the first capped row is also the last.
      const bool capped = mh >= dec.m();
      mh = std::min(mh, dec.m());
      t0 = now_ms();
      const basis::KrylovDecomposition tdec = basis::truncated(dec, mh);
      approx::Approximant ap;
      if (ms.name == "arnoldi" || ms.name == "incomplete")
        ap = approx::fom(tdec, prob.f);
      else if (ms.name == "rand")
        ap = approx::rand_fom(tdec, prob.f);
      else if (ms.name == "rand-ls")
        ap = approx::rand_ls(tdec, prob.L, *S, prob.f, ms.precond);
      else
        ap = approx::sfom(tdec, *S, prob.b, prob.f);

      SweepRecord r = base_row();
      r.m_or_totalm = mh;
      r.cycle = 0;
      r.matvecs = tdec.counters.matvecs;
      if (ref_norm > 0.0)
        r.rel_error = (ap.value - reference).norm() / ref_norm;
      r.update_norm = (ap.value - prev).norm();
      r.kappa_W = ap.diag.kappa_W;
      r.leftmost_ritz_re = ap.diag.ritz.front().real();
      if (with_timing) {
        r.phase_eval_ms = now_ms() - t0;
        r.elapsed_ms = r.phase_eval_ms;
        if (first) {
          r.elapsed_ms += build_ms;
          r.phase_build_ms = build_ms;
        }
      }
      first = false;
      prev = ap.value;
      rows.push_back(std::move(r));
      if (capped) break;
    }
    return rows;
  }

  if (ms.name == "restart" || ms.name == "restart-rand") {
    RestartOptions ro;
    ro.m_r = ms.m;
    ro.tol = ms.tol;
    ro.k_max = ms.k_max;
    std::optional<sketch::SketchOperator> S;
    if (ms.name == "restart-rand") {
      const Index d = ms.d > 0 ? ms.d : 16 * ms.m;
      S = sketch::make_sketch(d, n, ms.zeta, ms.seed);
    }
    const Vector* ref = reference.size() ? &reference : nullptr;
    const RestartResult res =
        restarted_krylov(prob.L, prob.b, prob.f, ro,
                         S ? &*S : nullptr, nullptr, ref);
    for (const CycleRecord& c : res.history) {
      SweepRecord r = base_row();
      r.m_or_totalm = c.total_m;
      r.cycle = c.cycle;
      r.matvecs = c.total_matvecs;
      if (c.error_vs_reference) r.rel_error = *c.error_vs_reference;
      r.update_norm = c.update_norm;
      r.kappa_W = c.kappa_W;
      r.leftmost_ritz_re = c.leftmost_ritz_re;
      if (with_timing) {
        r.elapsed_ms = c.elapsed_ms;
        r.phase_build_ms = c.build_ms;
        r.phase_eval_ms = c.elapsed_ms - c.build_ms;
      }
      rows.push_back(std::move(r));
    }
    return rows;
  }

  throw ParameterError("sweep: unknown method name '" + ms.name + "'");
}

}  // namespace

std::vector<SweepRecord> convergence_sweep(
    const problems::ProblemInstance& problem,
    const std::vector<MethodSpec>& methods, const Vector& reference,
    bool with_timing, int threads) {
  std::vector<std::vector<SweepRecord>> cells(methods.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= methods.size()) return;
      try {
        cells[i] = run_method_cell(problem, methods[i], reference,
                                   with_timing);
      } catch (const std::exception& e) {
        SweepRecord r;
        r.method = methods[i].name;
        r.n = problem.L.n_rows;
        r.note = sanitize_note(e.what());
        cells[i] = {r};
      }
    }
  };

  const int nw = std::max(1, std::min<int>(threads, int(methods.size())));
  if (nw <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<SweepRecord> out;
  for (auto& cell : cells)
    for (auto& r : cell) out.push_back(std::move(r));
  return out;
}

}  // namespace rkmf::restart
