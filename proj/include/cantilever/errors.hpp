#pragma once

// Exception types shared by all cantilever modules.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cantilever {

/// Argument outside the mathematical domain of an operation (e.g. t ∉ [0,1]).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A stated precondition of an operation does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed nonlinearity text. `position` is the 0-based character offset.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A syntactically valid nonlinearity that violates a structural requirement
/// (gaps, overlaps, discontinuity, negativity).
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive refinement hit its cap before the requested tolerance.
class ToleranceNotMet : public std::runtime_error {
 public:
  ToleranceNotMet(const std::string& what, double last_estimate, double gap)
      : std::runtime_error(what), last_estimate_(last_estimate), gap_(gap) {}
  double last_estimate() const noexcept { return last_estimate_; }
  double gap() const noexcept { return gap_; }

 private:
  double last_estimate_;
  double gap_;
};

/// Fixed-point iteration blew up. Carries the residual history.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::vector<double> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

/// Monotone iteration produced an out-of-order iterate: the start was not a
/// valid sub/supersolution.
class OrderingError : public std::runtime_error {
 public:
  OrderingError(const std::string& what, std::size_t node, double violation)
      : std::runtime_error(what), node_(node), violation_(violation) {}
  std::size_t node() const noexcept { return node_; }
  double violation() const noexcept { return violation_; }

 private:
  std::size_t node_;
  double violation_;
};

class SingularJacobian : public std::runtime_error {
 public:
  SingularJacobian(const std::string& what, double rcond)
      : std::runtime_error(what), rcond_(rcond) {}
  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

/// Damped Newton could not reduce the residual. `last_iterate` holds node values.
class LineSearchFailure : public std::runtime_error {
 public:
  LineSearchFailure(const std::string& what, std::vector<double> last_iterate)
      : std::runtime_error(what), last_iterate_(std::move(last_iterate)) {}
  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

 private:
  std::vector<double> last_iterate_;
};

class InfeasibleShell : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cantilever
