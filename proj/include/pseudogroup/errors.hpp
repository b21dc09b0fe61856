#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pseudogroup {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the byte offset of the offending token.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::string expected, const std::string& message)
      : Error(message), offset_(offset), expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

/// Evaluation outside the natural domain of an expression (x/0, log of y <= 0, overflow).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A point lies outside the image of a generator, so it has no preimage.
class NotInRange : public Error {
 public:
  using Error::Error;
};

/// A word could not be evaluated: the input to letter `letter` left (-1,1).
class OutOfDomain : public Error {
 public:
  OutOfDomain(int letter, const std::string& message) : Error(message), letter_(letter) {}
  int letter() const noexcept { return letter_; }

 private:
  int letter_;
};

class EmptyDomain : public Error {
 public:
  using Error::Error;
};

class NotIncreasing : public Error {
 public:
  using Error::Error;
};

class NotDegreeOne : public Error {
 public:
  using Error::Error;
};

/// The two rotation-number estimators disagree; indicates a bug upstream.
class EstimatorMismatch : public Error {
 public:
  using Error::Error;
};

class FixedPointInput : public Error {
 public:
  using Error::Error;
};

class CommutatorNotFixed : public Error {
 public:
  using Error::Error;
};

/// A lemma-level guarantee was violated numerically (e.g. k(n) outside {0,1}).
class InternalConsistency : public Error {
 public:
  using Error::Error;
};

class ResolutionFailure : public Error {
 public:
  using Error::Error;
};

class RationalityMismatch : public Error {
 public:
  using Error::Error;
};

class ChainInconsistent : public Error {
 public:
  using Error::Error;
};

/// The nilpotency hypothesis needed by a pipeline stage does not hold.
class HypothesisFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace pseudogroup
