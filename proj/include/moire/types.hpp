#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace moire {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Mat2c = Eigen::Matrix2cd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user input: bad parameters, malformed configuration, violated preconditions.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure could not deliver its contract (non-convergence, gap closure, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace moire
