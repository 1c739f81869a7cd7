#pragma once

#include <cmath>

#include "pfopt/core.hpp"
#include "pfopt/errors.hpp"
#include "pfopt/objective.hpp"
#include "pfopt/rng.hpp"

namespace pfopt {

/// 2n+1 deterministically placed samples around a center, with weights
/// w0 = lambda/(n+lambda) and wj = 1/(2(n+lambda)). A single weight set is
/// used for both mean and covariance.
struct SigmaSet {
    Matrix points;  // (2n+1) x n, row 0 is the center
    Vector weights; // length 2n+1
    double lambda = 1.0;

    int dim() const { return static_cast<int>(points.cols()); }
    int count() const { return static_cast<int>(points.rows()); }
};

/// First two output moments after pushing a sigma set through an objective.
struct UtMoments {
    double y_mean = 0.0;
    double y_var = 0.0;
    Vector transformed; // length 2n+1, kept for the ellipsoid construction
};

/// Offsets are the rows of the matrix square root of (n + lambda) * P.
inline SigmaSet sigma_points(const Vector& center, const Matrix& p, double lambda) {
    const int n = static_cast<int>(center.size());
    if (p.rows() != n || p.cols() != n)
        throw DimensionMismatch("sigma_points: covariance does not match center");
    const double scale = static_cast<double>(n) + lambda;
    if (!(scale > 0.0)) throw BadScaling("sigma_points requires n + lambda > 0");

    const Matrix root = psd_sqrt(scale * p);
    SigmaSet s;
    s.lambda = lambda;
    s.points.resize(2 * n + 1, n);
    s.weights.resize(2 * n + 1);
    s.points.row(0) = center.transpose();
    s.weights[0] = lambda / scale;
    for (int j = 0; j < n; ++j) {
        s.points.row(1 + j) = center.transpose() + root.row(j);
        s.points.row(1 + n + j) = center.transpose() - root.row(j);
        s.weights[1 + j] = 0.5 / scale;
        s.weights[1 + n + j] = 0.5 / scale;
    }
    return s;
}

/// Evaluate every sigma point through the noisy objective (2n+1 evaluations,
/// counted by the caller) and form the weighted output moments. `r` is the
/// measurement-noise floor added to the variance. Each point evaluates on
/// its own substream, so the result is independent of evaluation order.
inline UtMoments ut_propagate(const SigmaSet& s, const NoisyObjective& obj,
                              double r, RngStream& rng) {
    const int m = s.count();
    UtMoments out;
    out.transformed.resize(m);
    for (int j = 0; j < m; ++j) {
        RngStream sub = rng.substream(static_cast<std::uint64_t>(j));
        out.transformed[j] = obj.eval_noisy(s.points.row(j).transpose(), sub);
    }
    out.y_mean = s.weights.dot(out.transformed);
    double var = 0.0;
    for (int j = 0; j < m; ++j) {
        const double d = out.transformed[j] - out.y_mean;
        var += s.weights[j] * d * d;
    }
    out.y_var = var + r;
    return out;
}

}  // namespace pfopt
