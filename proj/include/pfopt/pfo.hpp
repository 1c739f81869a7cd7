#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "pfopt/core.hpp"
#include "pfopt/errors.hpp"
#include "pfopt/objective.hpp"
#include "pfopt/rng.hpp"
#include "pfopt/stats.hpp"
#include "pfopt/transition.hpp"
#include "pfopt/unscented.hpp"

namespace pfopt {

enum class EstimateMode { mmse, map };

/// All tunables of the particle-filter optimizer.
struct PfoConfig {
    int n_particles = 50;
    int k_max = 100;
    double n_thr = 25.0;  // resample when ESS drops below this
    double lambda = 1.0;  // sigma-point scaling, must stay positive
    double gamma = 1.0;   // step gain
    Matrix q;             // exploration noise covariance
    double r = 0.0;       // measurement-noise variance fed to the transform
    double sigma_x = 1e-5;
    double sigma_y = 1e-5;
    EstimateMode estimate_mode = EstimateMode::mmse;
    bool resample = true;
    bool converge_both = false; // true: both covariances must drop; false: either
    std::uint64_t seed = 0;

    void validate(int dim) const {
        if (n_particles < 2) throw std::invalid_argument("n_particles must be >= 2");
        if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
        if (!(n_thr > 0.0) || n_thr > n_particles)
            throw std::invalid_argument("n_thr must lie in (0, N]");
        if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
        if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
        if (!(sigma_x > 0.0) || !(sigma_y > 0.0))
            throw std::invalid_argument("convergence thresholds must be > 0");
        if (r < 0.0) throw std::invalid_argument("r must be >= 0");
        if (q.rows() != dim || q.cols() != dim)
            throw DimensionMismatch("Q does not match the problem dimension");
    }

    /// Isotropic exploration covariance helper.
    PfoConfig& set_q_scalar(double qval, int dim) {
        q = qval * Matrix::Identity(dim, dim);
        return *this;
    }
};

struct IterationRecord {
    int k = 0;
    Vector x_hat;
    double y_hat = 0.0;
    Matrix p_xx;
    double p_yy = 0.0;
    double ess = 0.0;
    long long fes = 0;
    bool resampled = false;
};

enum class StopReason { converged, k_max };

struct RunTrace {
    std::vector<IterationRecord> records;
    StopReason reason = StopReason::k_max;
    Vector best_x;
    double best_y = std::numeric_limits<double>::quiet_NaN();
};

/// Elliptical credible region around an estimate, membership tested against
/// the chi-squared radius for the requested level.
class CredibleRegion {
  public:
    CredibleRegion(Vector center, Matrix shape, double level)
        : center_(std::move(center)), shape_(std::move(shape)), level_(level),
          radius2_(chi2_quantile(level, static_cast<int>(center_.size()))),
          llt_(detail::regularized_llt(shape_)) {}

    const Vector& center() const { return center_; }
    const Matrix& shape() const { return shape_; }
    double level() const { return level_; }
    double radius2() const { return radius2_; }

    bool contains(const Vector& x) const {
        const Vector d = x - center_;
        return d.dot(llt_.solve(d)) <= radius2_;
    }

  private:
    Vector center_;
    Matrix shape_;
    double level_;
    double radius2_;
    Eigen::LLT<Matrix> llt_;
};

namespace pfo_detail {

constexpr std::uint64_t kPhaseInit = 1;
constexpr std::uint64_t kPhaseUt = 2;
constexpr std::uint64_t kPhasePropose = 3;
constexpr std::uint64_t kPhaseResample = 4;

}  // namespace pfo_detail

/// Ensemble plus the per-particle sigma clouds and the running best
/// transformed mean, which anchors the likelihood.
struct PfoState {
    Ensemble ensemble;
    std::vector<AugmentedCloud> clouds;
    double y_best = std::numeric_limits<double>::infinity();
};

/// Posterior weights given a reference observation: each particle is scored
/// by the Gaussian density of its transformed mean around y_ref under its
/// own transformed variance. Computed in log space and normalized.
inline std::vector<double> weight_update(const std::vector<Particle>& particles,
                                         double y_ref,
                                         const std::vector<double>& w_prev) {
    if (!std::isfinite(y_ref))
        throw std::invalid_argument("weight_update: y_ref must be finite");
    if (particles.size() != w_prev.size())
        throw DimensionMismatch("weight_update: weight count mismatch");
    const std::size_t n = particles.size();
    std::vector<double> logw(n);
    double max_logw = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double lw = (w_prev[i] > 0.0 ? std::log(w_prev[i])
                                           : -std::numeric_limits<double>::infinity()) +
                          normal_log_pdf(particles[i].y, y_ref, particles[i].p_y);
        logw[i] = lw;
        max_logw = std::max(max_logw, lw);
    }
    if (!std::isfinite(max_logw)) throw AllWeightsZero();
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = std::exp(logw[i] - max_logw);
    return normalize_weights(std::move(w));
}

/// Point estimate from the weighted ensemble. MMSE is the weighted mean;
/// MAP is the heaviest particle, ties broken by lower y then lower index.
inline std::pair<Vector, double> estimate(const Ensemble& ens, EstimateMode mode) {
    const auto& ps = ens.particles;
    if (mode == EstimateMode::map) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < ps.size(); ++i) {
            if (ps[i].w > ps[best].w ||
                (ps[i].w == ps[best].w && ps[i].y < ps[best].y))
                best = i;
        }
        return {ps[best].x, ps[best].y};
    }
    Vector x_hat = Vector::Zero(ps.front().x.size());
    double y_hat = 0.0;
    for (const auto& p : ps) {
        x_hat += p.w * p.x;
        y_hat += p.w * p.y;
    }
    return {x_hat, y_hat};
}

/// Weighted scatter of positions and transformed means about the ensemble's
/// current estimates.
inline std::pair<Matrix, double> empirical_covariances(const Ensemble& ens) {
    const auto& ps = ens.particles;
    const Eigen::Index n = ps.front().x.size();
    Matrix p_xx = Matrix::Zero(n, n);
    double p_yy = 0.0;
    for (const auto& p : ps) {
        const Vector dx = p.x - ens.x_hat;
        p_xx += p.w * dx * dx.transpose();
        const double dy = p.y - ens.y_hat;
        p_yy += p.w * dy * dy;
    }
    p_xx = 0.5 * (p_xx + p_xx.transpose());
    return {p_xx, p_yy};
}

/// Spectral-norm test of the position covariance against sigma_x and of the
/// value variance against sigma_y, strict inequalities.
inline bool converged(const Ensemble& ens, const PfoConfig& cfg) {
    const bool x_ok = spectral_norm(ens.p_xx) < cfg.sigma_x;
    const bool y_ok = ens.p_yy < cfg.sigma_y;
    return cfg.converge_both ? (x_ok && y_ok) : (x_ok || y_ok);
}

/// Uniform draw over the box, uniform weights, and one unscented pass per
/// particle with the exploration covariance as the local spread.
inline PfoState initialize(const PfoConfig& cfg, const NoisyObjective& obj) {
    const int n = obj.dim();
    cfg.validate(n);
    const int N = cfg.n_particles;

    PfoState st;
    st.ensemble.particles.resize(N);
    st.clouds.resize(N);
    for (int i = 0; i < N; ++i) {
        RngStream rpos(cfg.seed, stream_key(pfo_detail::kPhaseInit, 0, i));
        Particle& p = st.ensemble.particles[i];
        p.x = obj.domain.sample_uniform(rpos);
        p.w = 1.0 / N;
        p.p_x = cfg.q;
        SigmaSet sig = sigma_points(p.x, p.p_x, cfg.lambda);
        RngStream rut(cfg.seed, stream_key(pfo_detail::kPhaseUt, 0, i));
        UtMoments m = ut_propagate(sig, obj, cfg.r, rut);
        p.y = m.y_mean;
        p.p_y = m.y_var;
        st.clouds[i] = augmented_cloud(sig, m.transformed);
        st.y_best = std::min(st.y_best, p.y);
    }
    st.ensemble.fes = static_cast<long long>(N) * (2 * n + 1);
    st.ensemble.iteration = 0;
    auto [xm, ym] = estimate(st.ensemble, EstimateMode::mmse);
    st.ensemble.x_hat = xm;
    st.ensemble.y_hat = ym;
    auto [pxx, pyy] = empirical_covariances(st.ensemble);
    st.ensemble.p_xx = pxx;
    st.ensemble.p_yy = pyy;
    return st;
}

struct StepInfo {
    double ess = 0.0;
    bool resampled = false;
};

/// One full iteration: per particle propose / unscented pass / cloud, then
/// the reduce phase (reweight, resample, estimate, covariances). The first
/// iteration has no usable previous cloud, so its step is capped at
/// min(1, |d|).
inline StepInfo step(PfoState& st, const NoisyObjective& obj, const PfoConfig& cfg) {
    Ensemble& ens = st.ensemble;
    const int k = ens.iteration + 1;
    const int n = obj.dim();
    const int N = cfg.n_particles;
    const TransitionParams params{cfg.gamma, cfg.q};

    std::vector<Particle> next(N);
    std::vector<AugmentedCloud> next_clouds(N);
    for (int i = 0; i < N; ++i) {
        const Particle& p = ens.particles[i];
        const Vector d = direction(p, ens.x_hat, ens.y_hat);
        const double s = (k == 1) ? std::min(1.0, d.norm())
                                  : step_size(d, st.clouds[i].c_xy);
        RngStream rprop(cfg.seed, stream_key(pfo_detail::kPhasePropose, k, i));
        Vector x_new = propose(p, ens.x_hat, s, params, obj.domain, rprop);
        Matrix p_x = particle_prior_cov(x_new, ens.x_hat, cfg.q);
        SigmaSet sig = sigma_points(x_new, p_x, cfg.lambda);
        RngStream rut(cfg.seed, stream_key(pfo_detail::kPhaseUt, k, i));
        UtMoments m = ut_propagate(sig, obj, cfg.r, rut);
        next[i] = Particle{std::move(x_new), p.w, m.y_mean, std::move(p_x), m.y_var};
        next_clouds[i] = augmented_cloud(sig, m.transformed);
    }
    ens.fes += static_cast<long long>(N) * (2 * n + 1);

    for (const auto& p : next) st.y_best = std::min(st.y_best, p.y);
    std::vector<double> w_prev(N);
    for (int i = 0; i < N; ++i) w_prev[i] = next[i].w;
    std::vector<double> w;
    try {
        w = weight_update(next, st.y_best, w_prev);
    } catch (const AllWeightsZero&) {
        // Numerical degeneracy, not evidence: restart from uniform weights.
        w.assign(N, 1.0 / N);
    }
    for (int i = 0; i < N; ++i) next[i].w = w[i];
    ens.particles = std::move(next);
    st.clouds = std::move(next_clouds);

    StepInfo info;
    double ess = effective_sample_size(w);
    if (cfg.resample && ess < cfg.n_thr) {
        RngStream rres(cfg.seed, stream_key(pfo_detail::kPhaseResample, k, 0));
        auto idx = systematic_resample_indices(w, static_cast<std::size_t>(N),
                                               rres.uniform01());
        std::vector<Particle> res(N);
        std::vector<AugmentedCloud> res_clouds(N);
        for (int i = 0; i < N; ++i) {
            res[i] = ens.particles[idx[i]];
            res[i].w = 1.0 / N;
            res_clouds[i] = st.clouds[idx[i]];
        }
        ens.particles = std::move(res);
        st.clouds = std::move(res_clouds);
        info.resampled = true;
        ess = static_cast<double>(N);
    }
    info.ess = ess;

    auto [xm, ym] = estimate(ens, cfg.estimate_mode);
    ens.x_hat = xm;
    ens.y_hat = ym;
    auto [pxx, pyy] = empirical_covariances(ens);
    ens.p_xx = pxx;
    ens.p_yy = pyy;
    ens.iteration = k;
    return info;
}

/// Drive the filter until the covariances contract below threshold or the
/// iteration budget runs out. The terminal best is the recorded estimate
/// with the lowest transformed mean.
inline RunTrace run(const PfoConfig& cfg, const NoisyObjective& obj) {
    PfoState st = initialize(cfg, obj);
    RunTrace trace;
    trace.reason = StopReason::k_max;
    for (int k = 1; k <= cfg.k_max; ++k) {
        StepInfo info = step(st, obj, cfg);
        trace.records.push_back({k, st.ensemble.x_hat, st.ensemble.y_hat,
                                 st.ensemble.p_xx, st.ensemble.p_yy, info.ess,
                                 st.ensemble.fes, info.resampled});
        if (converged(st.ensemble, cfg)) {
            trace.reason = StopReason::converged;
            break;
        }
    }
    const IterationRecord* best = &trace.records.front();
    for (const auto& rec : trace.records)
        if (rec.y_hat < best->y_hat) best = &rec;
    trace.best_x = best->x_hat;
    trace.best_y = best->y_hat;
    return trace;
}

inline CredibleRegion credible_region(const Vector& center, const Matrix& shape,
                                      double level) {
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("credible level must lie in (0,1)");
    return CredibleRegion(center, shape, level);
}

inline CredibleRegion credible_region(const Ensemble& ens, double level) {
    return credible_region(ens.x_hat, ens.p_xx, level);
}

}  // namespace pfopt
