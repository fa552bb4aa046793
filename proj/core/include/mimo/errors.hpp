#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace mimo {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DegenerateLayout : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    SingularMatrix(const std::string& what, double condition)
        : Error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

// Near-coincident eigenvalues that the caller must perturb away.
class DegenerateSpectrum : public Error {
public:
    using Error::Error;
};

class NumericFailure : public Error {
public:
    using Error::Error;
};

class ConvergenceFailure : public Error {
public:
    ConvergenceFailure(const std::string& what, double best)
        : Error(what), best_(best) {}
    double best_value() const noexcept { return best_; }

private:
    double best_;
};

namespace detail {

inline void check_positive(double v, const char* name) {
    if (!(v > 0.0))
        throw InvalidArgument(std::string(name) + " must be positive");
}

inline void check_finite(double v, const char* name) {
    if (!std::isfinite(v))
        throw InvalidArgument(std::string(name) + " must be finite");
}

}  // namespace detail
}  // namespace mimo
