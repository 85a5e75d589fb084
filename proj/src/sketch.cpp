// Copyright 2026 The rkmf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "rkmf/sketch.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "rkmf/rng.hpp"

namespace rkmf::sketch {

SketchOperator make_sketch(Index d, Index n, Index zeta, std::uint64_t seed) {
  if (zeta < 1) throw ParameterError("sketch: zeta must be >= 1");
  if (zeta > d) throw ParameterError("sketch: zeta must not exceed d");
  if (d > n) throw ParameterError("sketch: d must not exceed n");

  SketchOperator S;
  S.d = d;
  S.n = n;
  S.zeta = zeta;
  S.seed = seed;
  S.scale = 1.0 / std::sqrt(static_cast<Real>(zeta));
  S.rows.resize(static_cast<size_t>(n) * static_cast<size_t>(zeta));
  S.signs.resize(S.rows.size());

  std::vector<Index> chosen;
  chosen.reserve(static_cast<size_t>(zeta));
  for (Index j = 0; j < n; ++j) {
    SplitMix64 gen(SplitMix64::derive(seed, static_cast<std::uint64_t>(j)));
    chosen.clear();
    // Floyd's sampling: zeta distinct rows out of d, O(zeta) draws.
    for (Index i = d - zeta; i < d; ++i) {
      const Index t = static_cast<Index>(
          gen.next_below(static_cast<std::uint64_t>(i) + 1));
      if (std::find(chosen.begin(), chosen.end(), t) == chosen.end())
        chosen.push_back(t);
      else
        chosen.push_back(i);
    }
    std::sort(chosen.begin(), chosen.end());
    const size_t base = static_cast<size_t>(j) * static_cast<size_t>(zeta);
    for (Index k = 0; k < zeta; ++k) {
      S.rows[base + static_cast<size_t>(k)] = chosen[static_cast<size_t>(k)];
      S.signs[base + static_cast<size_t>(k)] = gen.next_sign() ? 1 : -1;
    }
  }
  return S;
}

Vector sketch_apply(const SketchOperator& S, const Vector& x) {
  if (x.size() != S.n) throw ShapeError("shape: sketch_apply expects len(x) == n");
  Vector y = Vector::Zero(S.d);
  const size_t z = static_cast<size_t>(S.zeta);
  for (Index j = 0; j < S.n; ++j) {
    const Real xj = S.scale * x[j];
    if (xj == 0.0) continue;
    const size_t base = static_cast<size_t>(j) * z;
    for (size_t k = 0; k < z; ++k)
      y[S.rows[base + k]] += S.signs[base + k] > 0 ? xj : -xj;
  }
  return y;
}

Matrix sketch_apply(const SketchOperator& S, const Matrix& B) {
  if (B.rows() != S.n) throw ShapeError("shape: sketch_apply expects rows(B) == n");
  Matrix Y = Matrix::Zero(S.d, B.cols());
  const size_t z = static_cast<size_t>(S.zeta);
  for (Index j = 0; j < S.n; ++j) {
    const size_t base = static_cast<size_t>(j) * z;
    for (size_t k = 0; k < z; ++k) {
      const Real s = S.signs[base + k] > 0 ? S.scale : -S.scale;
      Y.row(S.rows[base + k]) += s * B.row(j);
    }
  }
  return Y;
}

Real estimate_distortion(const SketchOperator& S, const Matrix& basis,
                         Index trials) {
  if (basis.rows() != S.n) throw ShapeError("shape: basis rows must equal n");
  if (basis.cols() < 1) throw ParameterError("distortion: empty basis");
  const Index m = basis.cols();
  const Matrix gram = basis.transpose() * basis;
  if ((gram - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-8)
    throw ParameterError("distortion: basis columns are not orthonormal");

  const Matrix M = sketch_apply(S, basis);
  Real eps_hat = 0.0;
  auto probe = [&](const Vector& c) {
    const Real nc2 = c.squaredNorm();
    if (nc2 == 0.0) return;
    const Real r = (M * c).squaredNorm() / nc2;
    eps_hat = std::max(eps_hat, std::abs(r - 1.0));
  };

  // Extremal singular directions of S*basis pin the exact subspace
  // distortion; random probes are kept as a cross-check of the bound.
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinV);
  probe(svd.matrixV().col(0));
  probe(svd.matrixV().col(m - 1));

  SplitMix64 gen(SplitMix64::derive(S.seed, 0x64697374ULL));
  for (Index t = 0; t < trials; ++t) {
    Vector c(m);
    for (Index i = 0; i < m; ++i) c[i] = gen.next_gaussian(0.0, 1.0);
    probe(c);
  }
  return eps_hat;
}

}  // namespace rkmf::sketch
