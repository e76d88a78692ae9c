#pragma once

#include <functional>

namespace merton {

struct Interval {
    double lower;
    double upper;
};

struct ScalarMinimum {
    double argmin;
    double value;
    int iterations;   // golden-section refinements
    int evaluations;  // objective calls, scan included
    bool boundary_hit;
    /// Other scan basins whose refined minimum is within `ambiguity_tol` of
    /// the best value (only searched when ambiguity_tol > 0).
    int alternative_minima = 0;
    double alternative_argmin = 0.0;  // the best of them, when any
};

struct MinimizeOptions {
    double tol = 1e-8;
    int scan_points = 64;
    /// When positive, every other local minimum of the scan is refined too and
    /// counted as an alternative if its value is <= best + ambiguity_tol.
    double ambiguity_tol = 0.0;
};

/// Deterministic bounded minimizer: evaluates a uniform scan of
/// `scan_points` abscissae (endpoints included), then golden-section refines
/// the bracket formed by the best scan point and its neighbours until it is
/// narrower than `tol`. The returned point is the best one ever evaluated, so
/// its value never exceeds the value at either endpoint.
///
/// The objective may return +inf to mark infeasible points. A NaN value throws
/// NanObjective with the offending abscissa. If every scanned point is
/// infeasible the result carries value = +inf; callers decide whether that is
/// an error.
ScalarMinimum minimize_scalar(const std::function<double(double)>& objective, Interval bounds,
                              const MinimizeOptions& options = {});

}  // namespace merton
