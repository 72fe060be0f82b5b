#pragma once

#include "rsnet/matrixlab.hpp"

namespace rsnet {

struct LpResult {
    Vector x;
    double objective = 0.0;
    long pivots = 0;
};

/// Dense two-phase tableau simplex with Bland's rule for
///   min c^T x  s.t.  A x <= b,  x >= 0.
/// Throws SolverFailure if the problem is infeasible or unbounded, or if the
/// pivot guard is exceeded.
LpResult simplex_minimize(const Vector& c, const Matrix& a, const Vector& b);

}  // namespace rsnet
