#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bspeig {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Breaks the rules of the BSP machine (bad addressee, memory limit in strict mode, ...).
class ModelViolation : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, double residual = 0.0)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Wraps a failure raised inside one eigensolver stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what, bool numerical)
      : Error(stage + ": " + what), stage_(std::move(stage)), numerical_(numerical) {}
  const std::string& stage() const { return stage_; }
  bool numerical() const { return numerical_; }

 private:
  std::string stage_;
  bool numerical_;
};

}  // namespace bspeig
