#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace coarse {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed presentation or word text. `position` is a byte offset.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& expected)
      : Error("syntax error at position " + std::to_string(position) +
              ": expected " + expected),
        position(position),
        expected(expected) {}
  std::size_t position;
  std::string expected;
};

class EmptyGeneratorSet : public Error {
 public:
  EmptyGeneratorSet() : Error("presentation has an empty generator set") {}
};

class EmptyWord : public Error {
 public:
  explicit EmptyWord(const std::string& op)
      : Error(op + ": word must be nonempty") {}
};

class InvalidParameter : public Error {
 public:
  explicit InvalidParameter(const std::string& what) : Error(what) {}
};

class EmptyPath : public Error {
 public:
  explicit EmptyPath(const std::string& op)
      : Error(op + ": path must be nonempty") {}
};

class NoRelators : public Error {
 public:
  NoRelators() : Error("presentation has no relators") {}
};

/// No path joins the endpoints outside the forbidden ball: the model is
/// not one-ended at this window.
class NoAvoidingPath : public Error {
 public:
  explicit NoAvoidingPath(const std::string& what) : Error(what) {}
};

class NoPresentation : public Error {
 public:
  explicit NoPresentation(const std::string& model)
      : Error("model '" + model + "' carries no finite presentation") {}
};

class UnknownGenerator : public Error {
 public:
  explicit UnknownGenerator(const std::string& what) : Error(what) {}
};

class RadiusOutOfRange : public Error {
 public:
  explicit RadiusOutOfRange(const std::string& what) : Error(what) {}
};

/// A bounded search or construction ran past its configured budget.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, long long estimated_size)
      : Error(what), estimated_size(estimated_size) {}
  long long estimated_size;
};

class NotIdentityError : public Error {
 public:
  explicit NotIdentityError(const std::string& what) : Error(what) {}
};

class NonPlanarAssembly : public Error {
 public:
  explicit NonPlanarAssembly(const std::string& what) : Error(what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

/// An internal invariant failed; callers map this to a diagnostic dump.
class InternalError : public Error {
 public:
  explicit InternalError(const std::string& what) : Error(what) {}
};

}  // namespace coarse
