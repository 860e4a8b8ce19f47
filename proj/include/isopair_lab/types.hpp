#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace isopair_lab {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (maps to CLI exit code 2).
class InputError : public Error {
public:
  using Error::Error;
};

/// A mathematical precondition does not hold for the given data.
class DomainError : public Error {
public:
  using Error::Error;
};

inline constexpr double kPi = 3.14159265358979323846;

inline Complex unit_circle(double theta) { return std::polar(1.0, theta); }

} // namespace isopair_lab
