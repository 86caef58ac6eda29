#pragma once

#include <stdexcept>
#include <string>

namespace rbm {

/// Invalid input: bad arity, ordering violations, out-of-range parameters.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure did not reach its tolerance. Carries the achieved error.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double achieved_error)
        : std::runtime_error(what), achieved_error_(achieved_error) {}
    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

/// Floating-point overflow in an unnormalized evaluation.
class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rbm
