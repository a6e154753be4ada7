#pragma once

namespace incv::numerics {

struct SolverReport {
    bool converged = false;
    int iterations = 0;
    double residual_norm = 0.0;
};

} // namespace incv::numerics
