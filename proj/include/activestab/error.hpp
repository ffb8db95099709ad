// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace activestab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model was asked to evaluate at parameters where it is undefined (e.g. a zero carrying capacity).
class DegenerateParameterError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

/// Non-finite model output at a finite-difference stencil point.
class GradientEvaluationError : public Error {
 public:
  GradientEvaluationError(const std::string& what, std::vector<double> stencil_point)
      : Error(what), stencil_point_(std::move(stencil_point)) {}

  const std::vector<double>& stencil_point() const noexcept { return stencil_point_; }

 private:
  std::vector<double> stencil_point_;
};

/// One entry per failed point of a gradient batch.
class GradientBatchError : public Error {
 public:
  struct Failure {
    std::size_t index;
    std::string message;
  };

  explicit GradientBatchError(std::vector<Failure> failures);

  const std::vector<Failure>& failures() const noexcept { return failures_; }

 private:
  std::vector<Failure> failures_;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class DegenerateSpectrumError : public Error {
 public:
  using Error::Error;
};

class UndefinedIndicesError : public Error {
 public:
  using Error::Error;
};

class UnderdeterminedError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// Wraps an error raised while analysing one region of a sweep.
class RegionError : public Error {
 public:
  RegionError(std::size_t region_index, const std::string& what)
      : Error("region " + std::to_string(region_index) + ": " + what), region_index_(region_index) {}

  std::size_t region_index() const noexcept { return region_index_; }

 private:
  std::size_t region_index_;
};

}  // namespace activestab
