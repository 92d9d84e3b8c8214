#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace nfold {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position` is a 0-based character offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Malformed model file; `line` is 1-based.
class ModelSyntaxError : public Error {
 public:
  ModelSyntaxError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public EvalError {
 public:
  SingularityError(const std::string& what, std::complex<double> at)
      : EvalError(what), at_(at) {}
  std::complex<double> at() const { return at_; }

 private:
  std::complex<double> at_;
};

class QuadratureError : public EvalError {
 public:
  using EvalError::EvalError;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// A model or operator fails a structural precondition.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace nfold
