#pragma once

#include <stdexcept>
#include <string>

namespace robest {

/// Raised when an input violates an operation's precondition (shape mismatch,
/// non-Hurwitz dynamics, nonnegative log-norm in strict mode, ...).
/// The CLI maps it to exit code 2.
class PreconditionError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Raised when a computation breaks down numerically (blow-up, singular solve,
/// quadrature not converging). The CLI maps it to exit code 3.
class NumericalError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

namespace detail {
[[noreturn]] inline void reject(const std::string& what) { throw PreconditionError(what); }
}  // namespace detail

}  // namespace robest
