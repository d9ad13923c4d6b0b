#pragma once

#include <stdexcept>
#include <string>

namespace slim {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text (CSV cell, JSON, LP file, solution file).
class ParseError : public Error {
 public:
  using Error::Error;
};

class LabelError : public Error {
 public:
  using Error::Error;
};

class EmptyDataError : public Error {
 public:
  using Error::Error;
};

/// A single-class dataset where both classes are required.
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// An external MIP solution breaks a constraint.
class InfeasibleSolutionError : public Error {
 public:
  using Error::Error;
};

/// An external MIP solution is feasible but its objective disagrees with evaluate().
class VerificationError : public Error {
 public:
  using Error::Error;
};

class NotApplicableError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace slim
