#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sslp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Interpolation or fitting problem without a unique solution.
class IllPosedError : public Error {
 public:
  using Error::Error;
};

/// Input outside the supported envelope (dimension, degree, size caps).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Two independent computations disagreed; always a bug.
class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Precision escalation exhausted without a certified decision.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// The oracle handed to a reduction driver answered inconsistently.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// The second stage is infeasible on a set of positive measure.
class RecourseIncompleteError : public Error {
 public:
  RecourseIncompleteError(const std::string& what, std::string deficit, std::vector<std::string> witness)
      : Error(what), deficit_(std::move(deficit)), witness_(std::move(witness)) {}
  /// Uncovered fraction of the box as "p/q"; empty when unknown.
  const std::string& deficit() const { return deficit_; }
  /// A xi at which the second stage is infeasible, as "p/q" strings; may be empty.
  const std::vector<std::string>& witness() const { return witness_; }

 private:
  std::string deficit_;
  std::vector<std::string> witness_;
};

/// The second stage is unbounded on a set of positive measure.
class UnboundedRecourseError : public Error {
 public:
  using Error::Error;
};

/// An iterative method hit its iteration cap.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::string gap) : Error(what), gap_(std::move(gap)) {}
  const std::string& gap() const { return gap_; }

 private:
  std::string gap_;
};

}  // namespace sslp
