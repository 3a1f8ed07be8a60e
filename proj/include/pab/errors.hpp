#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pab {

// Base class for all library errors. Subclasses exist so callers can
// distinguish bad inputs (exit code 1 at the CLI) from solver
// non-convergence (exit code 2).
class Error : public std::runtime_error {
 public:
  explicit Error(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// Input / model errors -------------------------------------------------------

struct InvalidModel : Error {
  using Error::Error;
};

struct InvalidProfile : Error {
  using Error::Error;
};

// Signals a broken demand model: the clearing equation has no root in
// [0, p_hat]. Cannot occur for models that pass validation.
struct NoRoot : Error {
  using Error::Error;
};

struct LipschitzViolation : Error {
  using Error::Error;
};

struct InconsistentDomain : Error {
  using Error::Error;
};

struct OutOfRange : Error {
  using Error::Error;
};

struct NotAffine : Error {
  using Error::Error;
};

struct NotQuadratic : Error {
  using Error::Error;
};

struct HeterogeneousB : Error {
  using Error::Error;
};

struct AlphaOutOfRange : Error {
  using Error::Error;
};

struct NonPositiveParams : Error {
  using Error::Error;
};

struct UnsupportedScenario : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

// Solver errors ---------------------------------------------------------------

// Iterative solver ran out of iterations. Carries the last iterate so the
// caller can inspect it or retry with damping.
struct NoConvergence : Error {
  std::vector<double> last_iterate;
  int iterations = 0;
  NoConvergence(std::string msg, std::vector<double> last, int iters)
      : Error(std::move(msg)), last_iterate(std::move(last)), iterations(iters) {}
  explicit NoConvergence(std::string msg) : Error(std::move(msg)) {}
};

struct NewtonDivergence : Error {
  using Error::Error;
};

}  // namespace pab
