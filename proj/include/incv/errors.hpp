#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "incv/numerics/solver_report.hpp"

namespace incv {

/// Invalid caller input: bad arguments, malformed files, degenerate cohorts.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not deliver a result at the requested accuracy.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, std::vector<double> partial, double error_estimate)
        : NumericalError(what), partial_(std::move(partial)), error_estimate_(error_estimate) {}

    /// Components of the best estimate available when the routine gave up.
    const std::vector<double>& partial_estimate() const noexcept { return partial_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    std::vector<double> partial_;
    double error_estimate_;
};

class SolverError : public NumericalError {
public:
    SolverError(const std::string& what, numerics::SolverReport report)
        : NumericalError(what), report_(report) {}

    const numerics::SolverReport& report() const noexcept { return report_; }

private:
    numerics::SolverReport report_;
};

} // namespace incv
