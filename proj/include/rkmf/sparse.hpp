// Copyright 2026 The rkmf Authors.
// SPDX-License-Identifier: Apache-2.0
#ifndef RKMF_SPARSE_HPP
#define RKMF_SPARSE_HPP

#include <string>
#include <vector>

#include "rkmf/types.hpp"

namespace rkmf::sparse {

// CSR storage. Immutable after construction; rows hold strictly increasing,
// duplicate-free column indices. All higher modules touch A only through
// spmv on this type.
struct SparseMatrix {
  Index n_rows = 0;
  Index n_cols = 0;
  std::vector<Index> row_ptr;  // n_rows+1 offsets, row_ptr[0] == 0
  std::vector<Index> col_idx;  // nnz column indices
  std::vector<Real> values;    // nnz entries

  Index nnz() const { return static_cast<Index>(values.size()); }
};

struct Triplet {
  Index row;
  Index col;
  Real value;
};

// Builds CSR from an arbitrary-order triplet list; duplicate (row,col)
// entries are summed, rows come out sorted.
SparseMatrix from_triplets(Index n_rows, Index n_cols,
                           std::vector<Triplet> entries);

SparseMatrix identity(Index n);

// Throws if a CSR invariant is violated (monotone row_ptr, sorted
// duplicate-free columns, indices in range, finite values).
void validate(const SparseMatrix& A);

// y = A*x. Bumps ctr->matvecs when a counter context is supplied.
Vector spmv(const SparseMatrix& A, const Vector& x,
            PerfCounters* ctr = nullptr);

// Max absolute column sum; the scale used by breakdown tolerances.
Real norm1(const SparseMatrix& A);

Matrix densify(const SparseMatrix& A);

// A + c*I (test/diagnostic helper; result is a fresh CSR).
SparseMatrix add_scaled_identity(const SparseMatrix& A, Real c);

// Matrix Market "coordinate real {general|symmetric}" interchange.
// Symmetric inputs are expanded to full storage on load; 1-based indices
// are converted; duplicates summed. Parse failures carry the line number.
SparseMatrix load_matrix_market(const std::string& path);

// Writes coordinate-real-general at full precision (17 significant digits).
void save_matrix_market(const SparseMatrix& A, const std::string& path);

// Plain-text vector interchange: one decimal value per line ('%' comments
// and blank lines are skipped on load).
Vector load_vector(const std::string& path);
void save_vector(const Vector& v, const std::string& path);

}  // namespace rkmf::sparse

#endif  // RKMF_SPARSE_HPP
