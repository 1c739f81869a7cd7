#pragma once

#include <stdexcept>
#include <string>

namespace pfopt {

/// Every weight in a normalization request is zero. Callers treat this as
/// total particle degeneracy and decide whether to reset or abort.
struct AllWeightsZero : std::runtime_error {
    AllWeightsZero() : std::runtime_error("all weights are zero") {}
};

/// A matrix expected to be positive semi-definite could not be factorized
/// even after diagonal jitter escalation.
struct NotPsd : std::runtime_error {
    explicit NotPsd(const std::string& what) : std::runtime_error(what) {}
};

/// Sigma-point scaling is invalid (n + lambda <= 0).
struct BadScaling : std::runtime_error {
    explicit BadScaling(const std::string& what) : std::runtime_error(what) {}
};

/// An ellipsoid matrix stayed singular through the whole regularization
/// schedule.
struct SingularEllipsoid : std::runtime_error {
    explicit SingularEllipsoid(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

/// An objective has no recorded optimum, so scoring against it is impossible.
struct MissingOptimum : std::runtime_error {
    explicit MissingOptimum(const std::string& what) : std::runtime_error(what) {}
};

/// A function-evaluation checkpoint precedes the first recorded iteration.
struct CheckpointBeforeFirstIteration : std::runtime_error {
    explicit CheckpointBeforeFirstIteration(const std::string& what)
        : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pfopt
