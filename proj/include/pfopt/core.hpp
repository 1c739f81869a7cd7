#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "pfopt/errors.hpp"
#include "pfopt/rng.hpp"

namespace pfopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Axis-aligned box the optimizer is allowed to search.
struct SearchDomain {
    Vector lower;
    Vector upper;

    SearchDomain() = default;

    SearchDomain(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
        if (lower.size() != upper.size() || lower.size() == 0)
            throw DimensionMismatch("domain bounds must have equal, positive length");
        for (Eigen::Index j = 0; j < lower.size(); ++j)
            if (!(lower[j] < upper[j]))
                throw std::invalid_argument("domain requires lower < upper per dimension");
    }

    static SearchDomain box1d(double lo, double hi) {
        Vector l(1), u(1);
        l[0] = lo;
        u[0] = hi;
        return SearchDomain(std::move(l), std::move(u));
    }

    static SearchDomain box2d(double lo1, double hi1, double lo2, double hi2) {
        Vector l(2), u(2);
        l << lo1, lo2;
        u << hi1, hi2;
        return SearchDomain(std::move(l), std::move(u));
    }

    int dim() const { return static_cast<int>(lower.size()); }

    Vector clamp(Vector x) const {
        for (Eigen::Index j = 0; j < x.size(); ++j)
            x[j] = std::min(std::max(x[j], lower[j]), upper[j]);
        return x;
    }

    bool contains(const Vector& x) const {
        for (Eigen::Index j = 0; j < x.size(); ++j)
            if (x[j] < lower[j] || x[j] > upper[j]) return false;
        return true;
    }

    Vector sample_uniform(RngStream& rng) const {
        Vector x(lower.size());
        for (Eigen::Index j = 0; j < x.size(); ++j)
            x[j] = rng.uniform(lower[j], upper[j]);
        return x;
    }
};

/// One candidate solution: position, normalized weight, and the output
/// moments produced by the most recent unscented pass.
struct Particle {
    Vector x;
    double w = 0.0;
    double y = 0.0;   // transformed mean at x
    Matrix p_x;       // local position covariance
    double p_y = 0.0; // transformed variance (scalar objective)
};

/// The full particle population plus its current estimates.
struct Ensemble {
    std::vector<Particle> particles;
    Vector x_hat;
    double y_hat = 0.0;
    Matrix p_xx;
    double p_yy = 0.0;
    int iteration = 0;
    long long fes = 0; // cumulative objective evaluations

    std::vector<double> weights() const {
        std::vector<double> w(particles.size());
        for (std::size_t i = 0; i < particles.size(); ++i) w[i] = particles[i].w;
        return w;
    }
};

/// Scale nonnegative weights to sum to one.
/// Throws AllWeightsZero when there is no mass to normalize.
inline std::vector<double> normalize_weights(std::vector<double> w) {
    double total = 0.0;
    for (double v : w) total += v;
    if (!(total > 0.0)) throw AllWeightsZero();
    for (double& v : w) v /= total;
    return w;
}

/// 1 / sum(w_i^2) for normalized weights; ranges over [1, N].
inline double effective_sample_size(const std::vector<double>& w) {
    double s2 = 0.0;
    for (double v : w) s2 += v * v;
    return 1.0 / s2;
}

/// Systematic resampling: strata (u + i)/n_out walked against the weight CDF.
/// `u01` is a single uniform draw on [0,1). The copy count of index i is
/// guaranteed to be floor(n_out*w_i) or ceil(n_out*w_i).
inline std::vector<std::size_t> systematic_resample_indices(
    const std::vector<double>& weights, std::size_t n_out, double u01) {
    std::vector<std::size_t> out;
    out.reserve(n_out);
    const double u = u01 / static_cast<double>(n_out);
    std::size_t j = 0;
    double cum = weights.empty() ? 0.0 : weights[0];
    for (std::size_t i = 0; i < n_out; ++i) {
        const double p = u + static_cast<double>(i) / static_cast<double>(n_out);
        while (p >= cum && j + 1 < weights.size()) {
            ++j;
            cum += weights[j];
        }
        out.push_back(j);
    }
    return out;
}

/// Resample an ensemble back to uniform weights. Estimates and covariances
/// are left stale; the caller recomputes them after the reduce phase.
inline Ensemble systematic_resample(const Ensemble& ens, RngStream& rng) {
    const std::size_t n = ens.particles.size();
    auto idx = systematic_resample_indices(ens.weights(), n, rng.uniform01());
    Ensemble out = ens;
    for (std::size_t i = 0; i < n; ++i) {
        out.particles[i] = ens.particles[idx[i]];
        out.particles[i].w = 1.0 / static_cast<double>(n);
    }
    return out;
}

/// Matrix square root U of a symmetric PSD matrix M with U^T U = M; the rows
/// of U are the offset vectors used for sigma-point placement. Cholesky with
/// diagonal jitter escalation from 1e-12*tr/n to 1e-6*tr/n.
inline Matrix psd_sqrt(const Matrix& m) {
    if (m.rows() != m.cols())
        throw DimensionMismatch("psd_sqrt expects a square matrix");
    const Eigen::Index n = m.rows();
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) return Matrix::Zero(n, n);
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, scale))
        throw std::invalid_argument("psd_sqrt expects a symmetric matrix");

    const Matrix sym = 0.5 * (m + m.transpose());
    const double tr = sym.trace();
    if (!(tr > 0.0)) throw NotPsd("nonpositive trace in psd_sqrt");

    Eigen::LLT<Matrix> llt(sym);
    if (llt.info() == Eigen::Success) return llt.matrixU();
    for (double eps = 1e-12; eps <= 1.000001e-6; eps *= 10.0) {
        Matrix jittered = sym;
        jittered.diagonal().array() += eps * tr / static_cast<double>(n);
        llt.compute(jittered);
        if (llt.info() == Eigen::Success) return llt.matrixU();
    }
    throw NotPsd("Cholesky failed through the jitter schedule");
}

/// Largest absolute eigenvalue of a symmetric matrix.
inline double spectral_norm(const Matrix& sym) {
    if (sym.size() == 0) return 0.0;
    if (sym.rows() == 1) return std::abs(sym(0, 0));
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace pfopt
