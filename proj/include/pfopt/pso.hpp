#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "pfopt/core.hpp"
#include "pfopt/errors.hpp"
#include "pfopt/objective.hpp"
#include "pfopt/pfo.hpp"
#include "pfopt/rng.hpp"

namespace pfopt {

/// Swarm optimizer tunables: nearest-neighbor influence plus linearly
/// decaying inertia between w_max and w_min.
struct PsoConfig {
    int n_particles = 100;
    int sigma_nn = 5;    // neighborhood size, clamped to N-1 internally
    double v_max = 1.0;  // symmetric velocity clamp
    double phi_p_max = 0.37;
    double phi_n_max = 3.68;
    double phi_g_max = 7.4;
    double w_max = 0.9;
    double w_min = 0.25;
    int k_max = 100;
    std::uint64_t seed = 0;
    std::optional<double> target_error; // stop when |y_best - y*| drops below

    void validate() const {
        if (n_particles < 1) throw std::invalid_argument("n_particles must be >= 1");
        if (sigma_nn < 1) throw std::invalid_argument("sigma_nn must be >= 1");
        if (!(v_max > 0.0)) throw std::invalid_argument("v_max must be > 0");
        if (phi_p_max < 0.0 || phi_n_max < 0.0 || phi_g_max < 0.0)
            throw std::invalid_argument("influence caps must be >= 0");
        if (!(w_max >= w_min) || w_min < 0.0)
            throw std::invalid_argument("inertia bounds need w_max >= w_min >= 0");
        if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
    }
};

/// Read-only view of the swarm after an iteration; used by tests and plots.
struct PsoFrame {
    int k;
    const std::vector<Vector>& positions;
    const std::vector<Vector>& velocities;
    const std::vector<Vector>& best_positions;
    const std::vector<double>& best_values;
    const std::vector<double>& current_values;
    const Vector& global_best;
    double global_best_value;
};

using PsoObserver = std::function<void(const PsoFrame&)>;

namespace pso_detail {

constexpr std::uint64_t kPhaseInit = 11;
constexpr std::uint64_t kPhaseMove = 12;
constexpr std::uint64_t kPhaseEval = 13;

/// Unweighted position covariance; recorded as the swarm-spread diagnostic.
inline Matrix position_scatter(const std::vector<Vector>& xs, const Vector& mean) {
    const Eigen::Index n = mean.size();
    Matrix cov = Matrix::Zero(n, n);
    for (const auto& x : xs) {
        const Vector d = x - mean;
        cov += d * d.transpose();
    }
    return cov / static_cast<double>(xs.size());
}

}  // namespace pso_detail

/// Index of the best-valued particle among the `nn` Euclidean-nearest
/// neighbors of particle i (self excluded); -1 when the neighborhood is
/// empty. Exhaustive scan, fine at swarm scale.
inline int neighborhood_best(const std::vector<Vector>& positions,
                             const std::vector<double>& values, int i, int nn) {
    const int n = static_cast<int>(positions.size());
    nn = std::min(nn, n - 1);
    if (nn <= 0) return -1;
    std::vector<std::pair<double, int>> dist;
    dist.reserve(n - 1);
    for (int o = 0; o < n; ++o)
        if (o != i) dist.emplace_back((positions[o] - positions[i]).squaredNorm(), o);
    std::partial_sort(dist.begin(), dist.begin() + nn, dist.end());
    int best = dist[0].second;
    for (int m = 1; m < nn; ++m)
        if (values[dist[m].second] < values[best]) best = dist[m].second;
    return best;
}

/// Swarm search with personal, neighborhood, and global attraction.
/// Neighborhoods are the sigma_nn nearest particles of the previous
/// iteration's snapshot; influence vectors are drawn componentwise uniform
/// on [0, cap]. Bests compare raw measurements, so noisy objectives corrupt
/// them by design.
inline RunTrace pso_run(const PsoConfig& cfg, const NoisyObjective& obj,
                        const PsoObserver& observer = {}) {
    cfg.validate();
    const int n = obj.dim();
    const int N = cfg.n_particles;
    const int nn = std::min(cfg.sigma_nn, N - 1);
    if (cfg.target_error && !obj.known_optimum)
        throw MissingOptimum("target_error requires a known optimum");

    std::vector<Vector> x(N), v(N), b(N);
    std::vector<double> fb(N), fx(N);
    for (int i = 0; i < N; ++i) {
        RngStream r(cfg.seed, stream_key(pso_detail::kPhaseInit, 0, i));
        x[i].resize(n);
        v[i].resize(n);
        for (int j = 0; j < n; ++j)
            x[i][j] = r.uniform(obj.domain.lower[j], obj.domain.upper[j]);
        for (int j = 0; j < n; ++j) v[i][j] = r.uniform(-cfg.v_max, cfg.v_max);
        RngStream re(cfg.seed, stream_key(pso_detail::kPhaseEval, 0, i));
        fx[i] = obj.eval_noisy(x[i], re);
        b[i] = x[i];
        fb[i] = fx[i];
    }
    long long fes = N;

    int gi = 0;
    for (int i = 1; i < N; ++i)
        if (fb[i] < fb[gi]) gi = i;
    Vector g = b[gi];
    double yg = fb[gi];

    RunTrace trace;
    trace.reason = StopReason::k_max;
    for (int k = 1; k <= cfg.k_max; ++k) {
        const double omega =
            cfg.w_max - (cfg.w_max - cfg.w_min) *
                            (static_cast<double>(k - 1) /
                             std::max(1, cfg.k_max - 1));
        const std::vector<Vector> snapshot_x = x;
        const std::vector<double> snapshot_f = fx;

        for (int i = 0; i < N; ++i) {
            const int hbest = neighborhood_best(snapshot_x, snapshot_f, i, nn);
            const Vector& h = (hbest >= 0) ? snapshot_x[hbest] : b[i];

            RngStream rm(cfg.seed, stream_key(pso_detail::kPhaseMove, k, i));
            for (int j = 0; j < n; ++j) {
                const double phi_p = rm.uniform(0.0, cfg.phi_p_max);
                const double phi_n = rm.uniform(0.0, cfg.phi_n_max);
                const double phi_g = rm.uniform(0.0, cfg.phi_g_max);
                double vj = omega * v[i][j] + phi_p * (b[i][j] - x[i][j]) +
                            phi_n * (h[j] - x[i][j]) + phi_g * (g[j] - x[i][j]);
                v[i][j] = std::clamp(vj, -cfg.v_max, cfg.v_max);
            }
            x[i] = obj.domain.clamp(x[i] + v[i]);
            RngStream re(cfg.seed, stream_key(pso_detail::kPhaseEval, k, i));
            fx[i] = obj.eval_noisy(x[i], re);
            ++fes;
            if (fx[i] < fb[i]) {
                fb[i] = fx[i];
                b[i] = x[i];
            }
        }
        gi = 0;
        for (int i = 1; i < N; ++i)
            if (fb[i] < fb[gi]) gi = i;
        g = b[gi];
        yg = fb[gi];

        Vector mean = Vector::Zero(n);
        for (const auto& xi : x) mean += xi;
        mean /= static_cast<double>(N);
        Matrix scatter = pso_detail::position_scatter(x, mean);
        double fmean = 0.0;
        for (double f : fx) fmean += f;
        fmean /= static_cast<double>(N);
        double fvar = 0.0;
        for (double f : fx) fvar += (f - fmean) * (f - fmean);
        fvar /= static_cast<double>(N);

        trace.records.push_back({k, g, yg, std::move(scatter), fvar,
                                 static_cast<double>(N), fes, false});
        if (observer) observer(PsoFrame{k, x, v, b, fb, fx, g, yg});
        if (cfg.target_error &&
            std::fabs(yg - obj.known_optimum->second) < *cfg.target_error) {
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

}  // namespace pfopt
