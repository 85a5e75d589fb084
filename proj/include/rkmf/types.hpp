// Copyright 2026 The rkmf Authors.
// SPDX-License-Identifier: Apache-2.0
#ifndef RKMF_TYPES_HPP
#define RKMF_TYPES_HPP

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rkmf {

using Real = double;
using Complex = std::complex<double>;
using Index = Eigen::Index;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

// Error hierarchy. Every throwing operation in the library uses one of these;
// the CLI maps ParseError/ParameterError to exit code 1 and the rest to 2.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& msg) : Error(msg) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

// Per-context instrumentation. Counters are owned by whoever drives a
// computation (a basis builder, the restart engine, a test); nothing global.
//   matvecs         sparse A*x products
//   dot_n           length-n inner products spent on orthogonalization
//   dot_d           length-d inner products spent on sketched orthogonalization
//   basis_updates   length-n basis-vector formations (one per Krylov step)
//   peak_basis_cols high-water mark of simultaneously stored basis vectors
struct PerfCounters {
  long long matvecs = 0;
  long long dot_n = 0;
  long long dot_d = 0;
  long long basis_updates = 0;
  Index peak_basis_cols = 0;

  void note_basis_cols(Index cols) {
    if (cols > peak_basis_cols) peak_basis_cols = cols;
  }
  PerfCounters& operator+=(const PerfCounters& o) {
    matvecs += o.matvecs;
    dot_n += o.dot_n;
    dot_d += o.dot_d;
    basis_updates += o.basis_updates;
    if (o.peak_basis_cols > peak_basis_cols) peak_basis_cols = o.peak_basis_cols;
    return *this;
  }
};

}  // namespace rkmf

#endif  // RKMF_TYPES_HPP
