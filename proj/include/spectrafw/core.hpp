#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace spectrafw {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dense symmetric matrix. Symmetry is a convention checked at API
/// boundaries with `require_symmetric`, not enforced by the type.
using SymMatrix = Matrix;

/// Every random draw in the library goes through a caller-owned generator.
using Rng = std::mt19937_64;

/// Malformed or out-of-range arguments.
class InputError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Solver configuration that cannot be honoured (e.g. sketching with an
/// algorithm that needs the dense iterate).
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A precondition on the mathematical input failed (zero eigengap, missing
/// strict complementarity, ...).
class PreconditionError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Malformed instance files.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An iterative method ran out of iterations.
class ConvergenceError : public std::runtime_error {
  public:
    ConvergenceError(const std::string &what, Vector residuals)
        : std::runtime_error(what), residuals_(std::move(residuals)) {}
    const Vector &residuals() const { return residuals_; }

  private:
    Vector residuals_;
};

/// Throws InputError unless M is square, finite and symmetric to
/// 1e-12 * max(1, max|M|).
void require_symmetric(const Matrix &M, const char *what);

inline Matrix symmetrize(const Matrix &M) { return 0.5 * (M + M.transpose()); }

} // namespace spectrafw
