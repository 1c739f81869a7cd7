#pragma once

#include <Eigen/Cholesky>
#include <cmath>

#include "pfopt/core.hpp"
#include "pfopt/errors.hpp"
#include "pfopt/rng.hpp"
#include "pfopt/unscented.hpp"

namespace pfopt {

/// Sigma points augmented with their transformed values, plus the empirical
/// covariance of that cloud. The covariance ellipsoid of c_xy drives the
/// per-particle step size.
struct AugmentedCloud {
    Matrix xi;     // (2n+1) x (n+1), rows [X_j, Y_j]
    Vector xi_bar; // column means, length n+1
    Matrix c_xy;   // (n+1) x (n+1)
};

struct TransitionParams {
    double gamma = 1.0; // step gain
    Matrix q;           // exploration noise covariance, n x n PSD
};

/// Empirical covariance of the augmented cloud, with the 1/(2n) divisor.
inline AugmentedCloud augmented_cloud(const SigmaSet& sigma, const Vector& transformed) {
    const int n = sigma.dim();
    const int m = sigma.count();
    if (transformed.size() != m)
        throw DimensionMismatch("augmented_cloud: transformed length mismatch");

    AugmentedCloud cloud;
    cloud.xi.resize(m, n + 1);
    cloud.xi.leftCols(n) = sigma.points;
    cloud.xi.col(n) = transformed;
    cloud.xi_bar = cloud.xi.colwise().mean();
    const Matrix centered = cloud.xi.rowwise() - cloud.xi_bar.transpose();
    cloud.c_xy = centered.transpose() * centered / (2.0 * n);
    cloud.c_xy = 0.5 * (cloud.c_xy + cloud.c_xy.transpose());
    return cloud;
}

/// Augmented direction from a particle toward the previous estimate.
inline Vector direction(const Particle& p, const Vector& x_hat_prev, double y_hat_prev) {
    if (p.x.size() != x_hat_prev.size())
        throw DimensionMismatch("direction: estimate dimension mismatch");
    Vector d(p.x.size() + 1);
    d.head(p.x.size()) = x_hat_prev - p.x;
    d[p.x.size()] = y_hat_prev - p.y;
    return d;
}

namespace detail {

/// Shared regularization policy: add eps*tr/dim to the diagonal, escalating
/// eps from 1e-10 to 1e-4 until the matrix factorizes.
inline Eigen::LLT<Matrix> regularized_llt(const Matrix& sym) {
    const Eigen::Index n = sym.rows();
    const double tr = sym.trace();
    for (double eps = 1e-10; eps <= 1.000001e-4; eps *= 10.0) {
        Matrix reg = sym;
        reg.diagonal().array() += eps * tr / static_cast<double>(n);
        Eigen::LLT<Matrix> llt(reg);
        if (llt.info() == Eigen::Success) return llt;
    }
    throw SingularEllipsoid("ellipsoid matrix stayed singular after regularization");
}

}  // namespace detail

/// Piecewise step size: the full distance when the direction lies inside the
/// covariance ellipsoid, otherwise shrunk by the Mahalanobis excess. A zero
/// direction short-circuits to zero.
inline double step_size(const Vector& d, const Matrix& c_xy) {
    if (d.size() != c_xy.rows() || c_xy.rows() != c_xy.cols())
        throw DimensionMismatch("step_size: dimension mismatch");
    const double d2 = d.squaredNorm();
    if (d2 == 0.0) return 0.0;
    auto llt = detail::regularized_llt(c_xy);
    const double mahal2 = d.dot(llt.solve(d));
    if (mahal2 <= 1.0) return std::sqrt(d2);
    return std::sqrt(d2 / mahal2);
}

/// Draw the next position: Gaussian around x + gamma*s*(x_hat - x) with
/// covariance Q, clamped to the search box. Only the x-block of the
/// direction enters the mean.
inline Vector propose(const Particle& p, const Vector& x_hat_prev, double s,
                      const TransitionParams& params, const SearchDomain& domain,
                      RngStream& rng) {
    if (!(s >= 0.0)) throw std::invalid_argument("propose: step size must be >= 0");
    Vector mean = p.x + params.gamma * s * (x_hat_prev - p.x);
    const Matrix root = psd_sqrt(params.q);
    Vector z(mean.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = rng.normal();
    return domain.clamp(mean + root.transpose() * z);
}

/// Rank-one scatter around the previous estimate plus exploration noise.
inline Matrix particle_prior_cov(const Vector& x_new, const Vector& x_hat_prev,
                                 const Matrix& q) {
    if (x_new.size() != x_hat_prev.size())
        throw DimensionMismatch("particle_prior_cov: dimension mismatch");
    const Vector offset = x_new - x_hat_prev;
    return offset * offset.transpose() + q;
}

}  // namespace pfopt
