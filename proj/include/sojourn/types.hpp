#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace sojourn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Point of a phase space, expressed in the chart of its owning system.
struct PhasePoint {
    Vec coords;
    int chart = 0;
};

/// Quadrature, summation or integration machinery failed to reach its
/// target accuracy; the message carries the diagnostics.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A cutoff function was used outside its hypothesis class (e.g. the sharp
/// ball cutoff where two derivatives are required).
struct UnsupportedFunctionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed run configuration or system parameters.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace sojourn
