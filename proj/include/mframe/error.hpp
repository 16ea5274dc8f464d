#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace mframe {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands do not fit together: algebra, module, shape or index-count mismatch.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold for the input.
class PreconditionError : public Error {
 public:
  PreconditionError(const std::string& what, double defect = 0.0)
      : Error(what), defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

/// Inversion of a numerically singular element or operator.
class SingularityError : public Error {
 public:
  SingularityError(std::size_t block, double eigenvalue)
      : Error("singular element: block " + std::to_string(block) +
              " has eigenvalue " + std::to_string(eigenvalue)),
        block_(block),
        eigenvalue_(eigenvalue) {}
  std::size_t block() const noexcept { return block_; }
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  std::size_t block_;
  double eigenvalue_;
};

/// Functional calculus applied outside its domain (non-Hermitian or non-positive input).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input document; `path()` points at the offending field.
class ValidationError : public Error {
 public:
  ValidationError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)), message_(message) {}
  const std::string& path() const noexcept { return path_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string path_;
  std::string message_;
};

}  // namespace mframe
