// Copyright 2026 The rkmf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "rkmf/sparse.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rkmf::sparse {

SparseMatrix from_triplets(Index n_rows, Index n_cols,
                           std::vector<Triplet> entries) {
  if (n_rows < 0 || n_cols < 0) throw ParameterError("negative matrix size");
  for (const Triplet& t : entries) {
    if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols)
      throw ShapeError("triplet index out of range");
  }
  std::sort(entries.begin(), entries.end(),
            [](const Triplet& a, const Triplet& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });

  SparseMatrix A;
  A.n_rows = n_rows;
  A.n_cols = n_cols;
  A.row_ptr.assign(static_cast<size_t>(n_rows) + 1, 0);
  A.col_idx.reserve(entries.size());
  A.values.reserve(entries.size());
  size_t i = 0;
  while (i < entries.size()) {
    const Index r = entries[i].row, c = entries[i].col;
    Real v = entries[i].value;
    ++i;
    while (i < entries.size() && entries[i].row == r && entries[i].col == c) {
      v += entries[i].value;  // duplicates summed
      ++i;
    }
    A.col_idx.push_back(c);
    A.values.push_back(v);
    ++A.row_ptr[static_cast<size_t>(r) + 1];
  }
  for (Index r = 0; r < n_rows; ++r)
    A.row_ptr[static_cast<size_t>(r) + 1] += A.row_ptr[static_cast<size_t>(r)];
  return A;
}

SparseMatrix identity(Index n) {
  SparseMatrix A;
  A.n_rows = A.n_cols = n;
  A.row_ptr.resize(static_cast<size_t>(n) + 1);
  A.col_idx.resize(static_cast<size_t>(n));
  A.values.assign(static_cast<size_t>(n), 1.0);
  for (Index i = 0; i <= n; ++i) A.row_ptr[static_cast<size_t>(i)] = i;
  for (Index i = 0; i < n; ++i) A.col_idx[static_cast<size_t>(i)] = i;
  return A;
}

void validate(const SparseMatrix& A) {
  if (A.n_rows < 0 || A.n_cols < 0) throw ShapeError("negative dimension");
  if (A.row_ptr.size() != static_cast<size_t>(A.n_rows) + 1)
    throw ShapeError("row_ptr length != n_rows+1");
  if (A.row_ptr.front() != 0) throw ShapeError("row_ptr[0] != 0");
  if (A.row_ptr.back() != A.nnz()) throw ShapeError("row_ptr[n_rows] != nnz");
  if (A.col_idx.size() != A.values.size()) throw ShapeError("col/value length mismatch");
  for (Index r = 0; r < A.n_rows; ++r) {
    const Index lo = A.row_ptr[static_cast<size_t>(r)];
    const Index hi = A.row_ptr[static_cast<size_t>(r) + 1];
    if (hi < lo) throw ShapeError("row_ptr not nondecreasing");
    for (Index k = lo; k < hi; ++k) {
      const Index c = A.col_idx[static_cast<size_t>(k)];
      if (c < 0 || c >= A.n_cols) throw ShapeError("column index out of range");
      if (k > lo && c <= A.col_idx[static_cast<size_t>(k) - 1])
        throw ShapeError("columns not strictly increasing within a row");
      if (!std::isfinite(A.values[static_cast<size_t>(k)]))
        throw NumericalError("non-finite matrix entry");
    }
  }
}

Vector spmv(const SparseMatrix& A, const Vector& x, PerfCounters* ctr) {
  if (x.size() != A.n_cols) throw ShapeError("shape: spmv expects len(x) == n_cols");
  Vector y = Vector::Zero(A.n_rows);
  for (Index r = 0; r < A.n_rows; ++r) {
    Real acc = 0.0;
    const Index hi = A.row_ptr[static_cast<size_t>(r) + 1];
    for (Index k = A.row_ptr[static_cast<size_t>(r)]; k < hi; ++k)
      acc += A.values[static_cast<size_t>(k)] * x[A.col_idx[static_cast<size_t>(k)]];
    y[r] = acc;
  }
  if (ctr) ++ctr->matvecs;
  return y;
}

Real norm1(const SparseMatrix& A) {
  Vector colsum = Vector::Zero(A.n_cols);
  for (size_t k = 0; k < A.values.size(); ++k)
    colsum[A.col_idx[k]] += std::abs(A.values[k]);
  return A.n_cols == 0 ? 0.0 : colsum.maxCoeff();
}

Matrix densify(const SparseMatrix& A) {
  Matrix D = Matrix::Zero(A.n_rows, A.n_cols);
  for (Index r = 0; r < A.n_rows; ++r)
    for (Index k = A.row_ptr[static_cast<size_t>(r)];
         k < A.row_ptr[static_cast<size_t>(r) + 1]; ++k)
      D(r, A.col_idx[static_cast<size_t>(k)]) = A.values[static_cast<size_t>(k)];
  return D;
}

SparseMatrix add_scaled_identity(const SparseMatrix& A, Real c) {
  if (A.n_rows != A.n_cols) throw ShapeError("shape: A + c*I needs square A");
  std::vector<Triplet> t;
  t.reserve(A.values.size() + static_cast<size_t>(A.n_rows));
  for (Index r = 0; r < A.n_rows; ++r)
    for (Index k = A.row_ptr[static_cast<size_t>(r)];
         k < A.row_ptr[static_cast<size_t>(r) + 1]; ++k)
      t.push_back({r, A.col_idx[static_cast<size_t>(k)], A.values[static_cast<size_t>(k)]});
  for (Index r = 0; r < A.n_rows; ++r) t.push_back({r, r, c});
  return from_triplets(A.n_rows, A.n_cols, std::move(t));
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, long line, const std::string& what) {
  std::ostringstream os;
  os << path << ":" << line << ": " << what;
  throw ParseError(os.str());
}

std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

SparseMatrix load_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::string line;
  long lineno = 0;

  if (!std::getline(in, line)) parse_fail(path, 1, "empty file");
  ++lineno;
  std::istringstream hs(line);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lowercase(object) != "matrix")
    parse_fail(path, lineno, "malformed MatrixMarket header");
  if (lowercase(format) != "coordinate")
    parse_fail(path, lineno, "only coordinate format is supported");
  if (lowercase(field) != "real")
    parse_fail(path, lineno, "only real field is supported");
  const std::string sym = lowercase(symmetry);
  if (sym != "general" && sym != "symmetric")
    parse_fail(path, lineno, "only general/symmetric qualifiers are supported");

  Index rows = -1, cols = -1;
  long declared = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    if (!(ss >> rows >> cols >> declared))
      parse_fail(path, lineno, "malformed size line");
    break;
  }
  if (rows < 0 || cols < 0 || declared < 0)
    parse_fail(path, lineno, "missing size line");

  std::vector<Triplet> entries;
  entries.reserve(static_cast<size_t>(declared) * (sym == "symmetric" ? 2 : 1));
  long seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    long r = 0, c = 0;
    double v = 0.0;
    if (!(ss >> r >> c >> v))
      parse_fail(path, lineno, "malformed coordinate line (expected: row col real-value)");
    if (r < 1 || r > rows || c < 1 || c > cols)
      parse_fail(path, lineno, "index out of range");
    entries.push_back({static_cast<Index>(r - 1), static_cast<Index>(c - 1), v});
    if (sym == "symmetric" && r != c)
      entries.push_back({static_cast<Index>(c - 1), static_cast<Index>(r - 1), v});
    ++seen;
  }
  if (seen != declared)
    parse_fail(path, lineno, "entry count does not match header");
  return from_triplets(rows, cols, std::move(entries));
}

void save_matrix_market(const SparseMatrix& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot open for writing");
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.n_rows << " " << A.n_cols << " " << A.nnz() << "\n";
  char buf[64];
  for (Index r = 0; r < A.n_rows; ++r)
    for (Index k = A.row_ptr[static_cast<size_t>(r)];
         k < A.row_ptr[static_cast<size_t>(r) + 1]; ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", A.values[static_cast<size_t>(k)]);
      out << (r + 1) << " " << (A.col_idx[static_cast<size_t>(k)] + 1) << " " << buf << "\n";
    }
  if (!out) throw Error(path + ": write failure");
}

Vector load_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::vector<Real> vals;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    double v = 0.0;
    if (!(ss >> v)) parse_fail(path, lineno, "expected one decimal value");
    std::string trailing;
    if (ss >> trailing) parse_fail(path, lineno, "expected one value per line");
    vals.push_back(v);
  }
  Vector v(static_cast<Index>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) v[static_cast<Index>(i)] = vals[i];
  return v;
}

void save_vector(const Vector& v, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot open for writing");
  char buf[64];
  for (Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
    out << buf << "\n";
  }
  if (!out) throw Error(path + ": write failure");
}

}  // namespace rkmf::sparse
