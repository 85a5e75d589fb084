// Copyright 2026 The rkmf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "rkmf/problems.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "rkmf/rng.hpp"

namespace rkmf::problems {

namespace {

constexpr Real kPi = 3.14159265358979323846;
constexpr std::uint64_t kU0Tag = 0x75305f6472617773ULL;  // u0 draw stream

// ---------------------------------------------------------------------------
// Convection-diffusion generator
// ---------------------------------------------------------------------------

struct GridSpec {
  Index nx, ny, nz;
  Real hx, hy, hz;
  bool all_dirichlet;

  Index node(Index ix, Index iy, Index iz) const {
    return (ix * ny + iy) * nz + iz;
  }
  bool dirichlet(Index ix, Index iy, Index iz) const {
    if (ix == 0 || ix == nx - 1) return true;
    if (!all_dirichlet) return false;
    if (iy == 0 || iy == ny - 1) return true;
    if (nz > 1 && (iz == 0 || iz == nz - 1)) return true;
    return false;
  }
};

GridSpec make_grid(const ProblemMeta& meta) {
  GridSpec g;
  g.nx = meta.nx;
  g.ny = meta.ny;
  g.nz = meta.nz;
  g.hx = 1.0 / Real(g.nx - 1);
  g.hy = 1.0 / Real(g.ny - 1);
  g.hz = g.nz > 1 ? 1.0 / Real(g.nz - 1) : 1.0;
  g.all_dirichlet = meta.boundary == ConvDiffBoundary::AllDirichlet;
  return g;
}

// ---------------------------------------------------------------------------
// Tensor utilities for the separable interior block
// ---------------------------------------------------------------------------

struct TensorDims {
  std::array<Index, 3> d{1, 1, 1};
  Index total() const { return d[0] * d[1] * d[2]; }
};

template <typename Scal>
void mode_apply(Eigen::Matrix<Scal, Eigen::Dynamic, 1>& v,
                const Eigen::Matrix<Scal, Eigen::Dynamic, Eigen::Dynamic>& M,
                const TensorDims& td, int axis) {
  const Index D = td.d[axis];
  if (D == 1 && M.rows() == 1) {
    v *= M(0, 0);
    return;
  }
  Index outer = 1, inner = 1;
  for (int a = 0; a < axis; ++a) outer *= td.d[a];
  for (int a = axis + 1; a < 3; ++a) inner *= td.d[a];
  Eigen::Matrix<Scal, Eigen::Dynamic, 1> buf(D), out(D);
  for (Index o = 0; o < outer; ++o) {
    const Index base = o * D * inner;
    for (Index i = 0; i < inner; ++i) {
      for (Index r = 0; r < D; ++r) buf(r) = v(base + r * inner + i);
      out.noalias() = M * buf;
      for (Index r = 0; r < D; ++r) v(base + r * inner + i) = out(r);
    }
  }
}

// Per-axis 1-D factors of the interior block: L_II acts as the Kronecker
// sum of these (the geometry is a full tensor grid in both boundary modes).
struct Factors {
  std::vector<Matrix> A;       // size 3, unused axes are 1x1 zero
  std::array<Index, 3> lo{};   // first non-Dirichlet grid index per axis
  TensorDims td;
};

Matrix dirichlet_factor(Index dim, Real alpha, Real h, Real beta) {
  Matrix A = Matrix::Zero(dim, dim);
  const Real d2 = alpha / (h * h);
  const Real cv = beta / (2.0 * h);
  for (Index r = 0; r < dim; ++r) {
    A(r, r) = 2.0 * d2;
    if (r > 0) A(r, r - 1) = -d2 - cv;
    if (r + 1 < dim) A(r, r + 1) = -d2 + cv;
  }
  return A;
}

Matrix mirror_factor(Index dim, Real alpha, Real h) {
  Matrix A = Matrix::Zero(dim, dim);
  const Real d2 = alpha / (h * h);
  for (Index r = 0; r < dim; ++r) {
    A(r, r) = 2.0 * d2;
    if (r == 0)
      A(r, r + 1) = -2.0 * d2;
    else if (r == dim - 1)
      A(r, r - 1) = -2.0 * d2;
    else {
      A(r, r - 1) = -d2;
      A(r, r + 1) = -d2;
    }
  }
  return A;
}

Factors conv_diff_factors(const ProblemMeta& meta) {
  const GridSpec g = make_grid(meta);
  Factors f;
  f.A.assign(3, Matrix::Zero(1, 1));
  f.A[0] = dirichlet_factor(g.nx - 2, meta.alpha, g.hx, meta.beta);
  f.lo[0] = 1;
  f.td.d[0] = g.nx - 2;
  if (g.all_dirichlet) {
    f.A[1] = dirichlet_factor(g.ny - 2, meta.alpha, g.hy, 0.0);
    f.lo[1] = 1;
    f.td.d[1] = g.ny - 2;
    if (g.nz > 1) {
      f.A[2] = dirichlet_factor(g.nz - 2, meta.alpha, g.hz, 0.0);
      f.lo[2] = 1;
      f.td.d[2] = g.nz - 2;
    }
  } else {
    f.A[1] = mirror_factor(g.ny, meta.alpha, g.hy);
    f.lo[1] = 0;
    f.td.d[1] = g.ny;
    if (g.nz > 1) {
      f.A[2] = mirror_factor(g.nz, meta.alpha, g.hz);
      f.lo[2] = 0;
      f.td.d[2] = g.nz;
    }
  }
  return f;
}

// Gauss-Legendre nodes/weights on [0,1] (Newton on the Legendre recurrence).
void gauss_legendre01(int nq, std::vector<Real>& theta, std::vector<Real>& wt) {
  theta.assign(nq, 0.0);
  wt.assign(nq, 0.0);
  for (int i = 0; i < (nq + 1) / 2; ++i) {
    Real x = std::cos(kPi * (i + 0.75) / (nq + 0.5));
    Real dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      Real p0 = 1.0, p1 = x;
      for (int k = 2; k <= nq; ++k) {
        const Real p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / Real(k);
        p0 = p1;
        p1 = p2;
      }
      dp = nq * (x * p1 - p0) / (x * x - 1.0);
      const Real dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const Real w = 2.0 / ((1.0 - x * x) * dp * dp);
    theta[i] = (1.0 - x) / 2.0;
    theta[nq - 1 - i] = (1.0 + x) / 2.0;
    wt[i] = w / 2.0;
    wt[nq - 1 - i] = w / 2.0;
  }
}

Vector quadrature_phi1(const Factors& fac, Real t, const Vector& bI) {
  // phi1(-tL) = int_0^1 exp(-theta t L) dtheta; the integrand factorizes
  // exactly over the axes, so each node costs three small expm's plus
  // mode applications. Node counts double until the result settles.
  Vector best;
  std::vector<Real> theta, wt;
  for (int nq : {16, 32, 64, 128, 256}) {
    gauss_legendre01(nq, theta, wt);
    Vector acc = Vector::Zero(bI.size());
    for (int q = 0; q < nq; ++q) {
      std::array<Matrix, 3> E;
      for (int a = 0; a < 3; ++a)
        E[a] = densefun::expm(-theta[q] * t * fac.A[a]);
      Vector node = bI;
      for (int a = 0; a < 3; ++a) mode_apply<Real>(node, E[a], fac.td, a);
      acc += wt[q] * node;
    }
    if (best.size() > 0 &&
        (acc - best).norm() <= 1e-13 * (acc.norm() + 1e-300)) {
      return acc;
    }
    best = acc;
  }
  throw NumericalError(
      "conv_diff_reference: quadrature did not converge (use a restart-based "
      "reference instead)");
}

Vector exp_tensor(const Factors& fac, Real t, const Vector& bI) {
  Vector out = bI;
  for (int a = 0; a < 3; ++a) {
    const Matrix E = densefun::expm(-t * fac.A[a]);
    mode_apply<Real>(out, E, fac.td, a);
  }
  return out;
}

struct FactorEig {
  ComplexMatrix V, Vinv;
  ComplexVector lambda;
  Real cond = 0.0;
};

FactorEig factor_eig(const Matrix& A) {
  FactorEig fe;
  const Eigen::ComplexEigenSolver<Matrix> es(A);
  if (es.info() != Eigen::Success)
    throw NumericalError("conv_diff_reference: factor eigensolve failed");
  fe.V = es.eigenvectors();
  fe.lambda = es.eigenvalues();
  fe.cond = std::numeric_limits<Real>::infinity();
  if (fe.V.allFinite() && fe.lambda.allFinite()) {
    const Eigen::JacobiSVD<ComplexMatrix> svd(fe.V);
    const auto& sv = svd.singularValues();
    // Non-finite or zero ratios stay pinned at infinity.
    if (sv(sv.size() - 1) > 0.0 && std::isfinite(sv(0) / sv(sv.size() - 1)))
      fe.cond = sv(0) / sv(sv.size() - 1);
  }
  if (std::isfinite(fe.cond))
    fe.Vinv = fe.V.partialPivLu().solve(
        ComplexMatrix::Identity(fe.V.rows(), fe.V.cols()));
  return fe;
}

Vector eig_tensor(const Factors& fac, const densefun::FunctionSpec& f,
                  const Vector& bI) {
  std::array<FactorEig, 3> fe;
  for (int a = 0; a < 3; ++a) fe[a] = factor_eig(fac.A[a]);
  ComplexVector v = bI.cast<Complex>();
  for (int a = 0; a < 3; ++a) mode_apply<Complex>(v, fe[a].Vinv, fac.td, a);
  Index i = 0;
  for (Index r0 = 0; r0 < fac.td.d[0]; ++r0)
    for (Index r1 = 0; r1 < fac.td.d[1]; ++r1)
      for (Index r2 = 0; r2 < fac.td.d[2]; ++r2, ++i) {
        const Complex lam =
            fe[0].lambda(r0) + fe[1].lambda(r1) + fe[2].lambda(r2);
        v(i) *= densefun::eval_scalar(f, lam);
      }
  for (int a = 0; a < 3; ++a) mode_apply<Complex>(v, fe[a].V, fac.td, a);
  return v.real();
}

// ---------------------------------------------------------------------------
// Bessel pieces
// ---------------------------------------------------------------------------

Real bessel_series(int p, Real x) {
  Real t0 = 1.0;
  for (int i = 1; i <= p; ++i) t0 *= (x / 2.0) / Real(i);
  Real sum = t0, comp = 0.0, term = t0;
  const Real q = x * x / 4.0;
  for (int k = 0; k < 400; ++k) {
    term *= -q / ((k + 1.0) * (k + 1.0 + p));
    const Real y = term - comp;
    const Real s2 = sum + y;
    comp = (s2 - sum) - y;
    sum = s2;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

std::vector<char> identity_rows(const sparse::SparseMatrix& L) {
  std::vector<char> is_id(L.n_rows, 0);
  for (Index i = 0; i < L.n_rows; ++i) {
    const Index b = L.row_ptr[i], e = L.row_ptr[i + 1];
    if (e - b == 1 && L.col_idx[b] == i && L.values[b] == 1.0) is_id[i] = 1;
  }
  return is_id;
}

}  // namespace

ProblemInstance gen_conv_diff(Index nx, Index ny, Index nz, Real alpha,
                              Real beta, Real t, std::uint64_t seed,
                              ConvDiffBoundary boundary) {
  if (nx < 3 || ny < 3)
    throw ParameterError("gen_conv_diff: need nx >= 3 and ny >= 3");
  if (nz != 1 && nz < 3)
    throw ParameterError("gen_conv_diff: nz must be 1 (2-D) or >= 3");
  if (alpha < 0.0 || beta < 0.0 || (alpha == 0.0 && beta == 0.0))
    throw ParameterError(
        "gen_conv_diff: need alpha >= 0, beta >= 0, not both zero");
  if (t < 0.0) throw ParameterError("gen_conv_diff: t must be >= 0");

  ProblemInstance prob;
  prob.kind = ProblemKind::ConvDiff;
  prob.meta.nx = nx;
  prob.meta.ny = ny;
  prob.meta.nz = nz;
  prob.meta.alpha = alpha;
  prob.meta.beta = beta;
  prob.meta.t = t;
  prob.meta.seed = seed;
  prob.meta.boundary = boundary;

  const GridSpec g = make_grid(prob.meta);
  const Index n = nx * ny * nz;
  const Real dx2 = alpha / (g.hx * g.hx);
  const Real dy2 = alpha / (g.hy * g.hy);
  const Real dz2 = alpha / (g.hz * g.hz);
  const Real cv = beta / (2.0 * g.hx);

  std::vector<sparse::Triplet> trips;
  trips.reserve(7 * static_cast<std::size_t>(n));
  for (Index ix = 0; ix < nx; ++ix)
    for (Index iy = 0; iy < ny; ++iy)
      for (Index iz = 0; iz < nz; ++iz) {
        const Index i = g.node(ix, iy, iz);
        if (g.dirichlet(ix, iy, iz)) {
          trips.push_back({i, i, 1.0});
          continue;
        }
        Real diag = 2.0 * dx2;
        trips.push_back({i, g.node(ix + 1, iy, iz), -dx2 + cv});
        trips.push_back({i, g.node(ix - 1, iy, iz), -dx2 - cv});
        diag += 2.0 * dy2;
        if (!g.all_dirichlet && iy == 0)
          trips.push_back({i, g.node(ix, 1, iz), -2.0 * dy2});
        else if (!g.all_dirichlet && iy == ny - 1)
          trips.push_back({i, g.node(ix, ny - 2, iz), -2.0 * dy2});
        else {
          trips.push_back({i, g.node(ix, iy - 1, iz), -dy2});
          trips.push_back({i, g.node(ix, iy + 1, iz), -dy2});
        }
        if (nz > 1) {
          diag += 2.0 * dz2;
          if (!g.all_dirichlet && iz == 0)
            trips.push_back({i, g.node(ix, iy, 1), -2.0 * dz2});
          else if (!g.all_dirichlet && iz == nz - 1)
            trips.push_back({i, g.node(ix, iy, nz - 2), -2.0 * dz2});
          else {
            trips.push_back({i, g.node(ix, iy, iz - 1), -dz2});
            trips.push_back({i, g.node(ix, iy, iz + 1), -dz2});
          }
        }
        trips.push_back({i, i, diag});
      }
  prob.L = sparse::from_triplets(n, n, trips);

  // u0: clamped faces carry their boundary values; interior entries are
  // seeded N(0.5, 0.25) draws (variance 0.25), in node order.
  SplitMix64 rng(SplitMix64::derive(seed, kU0Tag));
  Vector u0(n), gvec = Vector::Zero(n);
  for (Index ix = 0; ix < nx; ++ix)
    for (Index iy = 0; iy < ny; ++iy)
      for (Index iz = 0; iz < nz; ++iz) {
        const Index i = g.node(ix, iy, iz);
        if (ix == nx - 1) gvec(i) = 1.0;
        if (g.dirichlet(ix, iy, iz))
          u0(i) = (ix == nx - 1) ? 1.0 : 0.0;
        else
          u0(i) = rng.next_gaussian(0.5, 0.5);
      }
  prob.u0 = u0;
  prob.b = gvec - sparse::spmv(prob.L, u0);
  prob.f = densefun::FunctionSpec::phi1_neg(t);
  return prob;
}

ProblemInstance gen_membrane(Index n_r, Real nu, Real t, int p,
                             int zero_index) {
  if (n_r < 8) throw ParameterError("gen_membrane: need n_r >= 8");
  if (nu <= 0.0) throw ParameterError("gen_membrane: nu must be > 0");
  if (t < 0.0) throw ParameterError("gen_membrane: t must be >= 0");
  // bessel_j / bessel_zero validate p and zero_index.
  const Real eta = bessel_zero(p, zero_index);

  const Real h = 1.0 / Real(n_r);
  const Index width = 2 * n_r + 1;
  auto cell = [&](Index i, Index j) { return (i + n_r) * width + (j + n_r); };
  auto interior = [&](Index i, Index j) { return i * i + j * j < n_r * n_r; };

  std::vector<Index> id(width * width, -1);
  std::vector<std::pair<Index, Index>> coords;
  for (Index i = -n_r; i <= n_r; ++i)
    for (Index j = -n_r; j <= n_r; ++j) {
      bool keep = interior(i, j);
      if (!keep) {
        keep = (i > -n_r && interior(i - 1, j)) ||
               (i < n_r && interior(i + 1, j)) ||
               (j > -n_r && interior(i, j - 1)) ||
               (j < n_r && interior(i, j + 1));
      }
      if (keep) {
        id[cell(i, j)] = Index(coords.size());
        coords.emplace_back(i, j);
      }
    }
  const Index n = Index(coords.size());

  std::vector<sparse::Triplet> trips;
  trips.reserve(5 * static_cast<std::size_t>(n));
  const Real ih2 = 1.0 / (h * h);
  for (Index r = 0; r < n; ++r) {
    const auto [i, j] = coords[r];
    if (!interior(i, j)) {
      trips.push_back({r, r, 1.0});
      continue;
    }
    trips.push_back({r, r, 4.0 * ih2});
    trips.push_back({r, id[cell(i - 1, j)], -ih2});
    trips.push_back({r, id[cell(i + 1, j)], -ih2});
    trips.push_back({r, id[cell(i, j - 1)], -ih2});
    trips.push_back({r, id[cell(i, j + 1)], -ih2});
  }

  ProblemInstance prob;
  prob.kind = ProblemKind::Membrane;
  prob.meta.n_r = n_r;
  prob.meta.nu = nu;
  prob.meta.t = t;
  prob.meta.p = p;
  prob.meta.zero_index = zero_index;
  prob.L = sparse::from_triplets(n, n, trips);
  prob.b.resize(n);
  for (Index r = 0; r < n; ++r) {
    const auto [i, j] = coords[r];
    const Real radius = h * std::sqrt(Real(i * i + j * j));
    prob.b(r) = bessel_j(p, eta * std::min(radius, 1.0));
  }
  prob.u0 = prob.b;
  prob.f = densefun::FunctionSpec::cos_sqrt(nu, t);
  return prob;
}

Real bessel_j(int p, Real x) {
  if (p < 0 || p > 20)
    throw ParameterError("bessel_j: order must be in [0, 20]");
  if (!(x >= 0.0) || x > 60.0)
    throw ParameterError("bessel_j: argument must be in [0, 60]");
  if (x == 0.0) return p == 0 ? 1.0 : 0.0;
  // The alternating series loses ~e^x/sqrt(2 pi x) * eps absolutely, so it
  // is trusted only where that noise stays near 1e-12.
  if (x <= 10.0) return bessel_series(p, x);
  return std::cyl_bessel_j(Real(p), x);
}

Real bessel_zero(int p, int k) {
  if (p < 0 || p > 20)
    throw ParameterError("bessel_zero: order must be in [0, 20]");
  if (k < 1 || k > 20)
    throw ParameterError("bessel_zero: index must be in [1, 20]");
  // McMahon's expansion sizes the scan window for the k-th zero.
  const Real bmc = (k + 0.5 * p - 0.25) * kPi;
  const Real upper =
      std::min(60.0, bmc - (4.0 * p * p - 1.0) / (8.0 * bmc) + 2.0);
  Real xa = 0.0, va = 1.0;  // J_p(0+) > 0 for every p
  int found = 0;
  for (Real xb = 0.25; xb <= upper + 1e-9; xb += 0.25) {
    const Real vb = bessel_j(p, xb);
    if ((va > 0.0) != (vb > 0.0)) {
      ++found;
      if (found == k) {
        Real lo = xa, hi = xb, flo = va;
        for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
          const Real mid = 0.5 * (lo + hi);
          const Real fm = bessel_j(p, mid);
          if ((flo > 0.0) != (fm > 0.0))
            hi = mid;
          else {
            lo = mid;
            flo = fm;
          }
        }
        return 0.5 * (lo + hi);
      }
    }
    xa = xb;
    va = vb;
  }
  throw ParameterError(
      "bessel_zero: bracket failure (zero outside the supported range)");
}

ProblemInstance load_problem(const std::string& matrix_path,
                             const std::string& b_path,
                             const densefun::FunctionSpec& f) {
  ProblemInstance prob;
  prob.L = sparse::load_matrix_market(matrix_path);
  if (prob.L.n_rows != prob.L.n_cols)
    throw ShapeError("load_problem: matrix must be square");
  prob.b = sparse::load_vector(b_path);
  if (prob.b.size() != prob.L.n_rows)
    throw ShapeError("load_problem: vector length does not match matrix");
  prob.f = f;
  prob.u0 = Vector::Zero(prob.L.n_rows);
  prob.kind = ProblemKind::External;
  return prob;
}

Vector conv_diff_reference(const ProblemInstance& prob,
                           const densefun::FunctionSpec& f) {
  if (prob.kind != ProblemKind::ConvDiff)
    throw ParameterError("conv_diff_reference: not a ConvDiff instance");
  const GridSpec g = make_grid(prob.meta);
  const Factors fac = conv_diff_factors(prob.meta);
  const Index n = prob.L.n_rows;

  // The clamped rows are identity rows and the generated b vanishes there
  // exactly, so f(L) b = [f(L_II) b_I; f(1) b_B] with no coupling term.
  Vector bI(fac.td.total());
  Real bnd_norm = 0.0;
  {
    Index iI = 0;
    for (Index ix = 0; ix < g.nx; ++ix)
      for (Index iy = 0; iy < g.ny; ++iy)
        for (Index iz = 0; iz < g.nz; ++iz) {
          const Index i = g.node(ix, iy, iz);
          if (g.dirichlet(ix, iy, iz))
            bnd_norm = std::max(bnd_norm, std::abs(prob.b(i)));
          else
            bI(iI++) = prob.b(i);
        }
    if (iI != fac.td.total())
      throw NumericalError("conv_diff_reference: interior block mismatch");
  }
  if (bnd_norm > 1e-12 * (prob.b.norm() + 1e-300))
    throw NumericalError(
        "conv_diff_reference: nonzero boundary data breaks the separable "
        "form");

  Real cond_max = 1.0;
  for (int a = 0; a < 3; ++a)
    cond_max = std::max(cond_max, factor_eig(fac.A[a]).cond);

  Vector fI;
  if (cond_max <= 1e6) {
    fI = eig_tensor(fac, f, bI);
  } else if (f.kind == densefun::FunctionSpec::Kind::ExpNeg) {
    fI = exp_tensor(fac, f.t, bI);
  } else if (f.kind == densefun::FunctionSpec::Kind::Phi1Neg) {
    fI = quadrature_phi1(fac, f.t, bI);
  } else {
    throw NumericalError(
        "conv_diff_reference: factors too ill-conditioned for this "
        "function kind");
  }

  const Real f1 = densefun::eval_scalar(f, Complex(1.0, 0.0)).real();
  Vector res(n);
  Index iI = 0;
  for (Index ix = 0; ix < g.nx; ++ix)
    for (Index iy = 0; iy < g.ny; ++iy)
      for (Index iz = 0; iz < g.nz; ++iz) {
        const Index i = g.node(ix, iy, iz);
        res(i) = g.dirichlet(ix, iy, iz) ? f1 * prob.b(i) : fI(iI++);
      }
  return res;
}

Vector membrane_reference(const ProblemInstance& prob,
                          const densefun::FunctionSpec& f) {
  if (prob.kind != ProblemKind::Membrane)
    throw ParameterError("membrane_reference: not a Membrane instance");
  const Index n = prob.L.n_rows;
  const std::vector<char> is_id = identity_rows(prob.L);
  std::vector<Index> to_int(n, -1);
  std::vector<Index> ids;
  for (Index i = 0; i < n; ++i)
    if (!is_id[i]) {
      to_int[i] = Index(ids.size());
      ids.push_back(i);
    }
  const Index nI = Index(ids.size());

  Matrix LII = Matrix::Zero(nI, nI);
  for (Index r = 0; r < nI; ++r) {
    const Index i = ids[r];
    for (Index e = prob.L.row_ptr[i]; e < prob.L.row_ptr[i + 1]; ++e) {
      const Index c = prob.L.col_idx[e];
      if (!is_id[c]) LII(r, to_int[c]) = prob.L.values[e];
    }
  }
  const Real asym = (LII - LII.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * LII.cwiseAbs().maxCoeff())
    throw NumericalError("membrane_reference: interior block not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> es(LII);
  if (es.info() != Eigen::Success)
    throw NumericalError("membrane_reference: eigensolve failed");
  Vector bI(nI);
  for (Index r = 0; r < nI; ++r) bI(r) = prob.b(ids[r]);
  Vector c = es.eigenvectors().transpose() * bI;
  for (Index r = 0; r < nI; ++r)
    c(r) *= densefun::eval_scalar(f, Complex(es.eigenvalues()(r), 0.0)).real();
  const Vector fI = es.eigenvectors() * c;

  const Real f1 = densefun::eval_scalar(f, Complex(1.0, 0.0)).real();
  Vector res(n);
  for (Index i = 0; i < n; ++i)
    res(i) = is_id[i] ? f1 * prob.b(i) : fI(to_int[i]);
  return res;
}

Vector reference_solution(const ProblemInstance& prob) {
  switch (prob.kind) {
    case ProblemKind::ConvDiff:
      return conv_diff_reference(prob, prob.f);
    case ProblemKind::Membrane:
      return membrane_reference(prob, prob.f);
    case ProblemKind::External:
    default: {
      if (prob.L.n_rows > 2500)
        throw ParameterError(
            "reference_solution: problem too large for the dense oracle");
      return densefun::dense_eig_oracle(sparse::densify(prob.L), prob.f,
                                        prob.b);
    }
  }
}

}  // namespace rkmf::problems
