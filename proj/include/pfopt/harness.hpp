#pragma once

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "pfopt/errors.hpp"
#include "pfopt/objective.hpp"
#include "pfopt/pfo.hpp"
#include "pfopt/presets.hpp"
#include "pfopt/pso.hpp"

namespace pfopt {

enum class Optimizer { pfo, pso };

inline std::string to_string(Optimizer o) { return o == Optimizer::pfo ? "pfo" : "pso"; }

/// Shortest round-trip decimal form of a double; keeps text output both
/// readable and bit-exact on re-parse.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Run fn(0..n-1) on up to n_threads workers. Work items write only to their
/// own index, so the result is identical for any worker count.
template <class Fn>
void parallel_for(int n, int n_threads, Fn&& fn) {
    if (n <= 0) return;
    const int workers = std::max(1, std::min(n_threads, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

/// One aggregated point of a Monte-Carlo study; i.e. one CSV row.
struct McCurvePoint {
    int k = 0;
    double rmse_x = 0.0;
    double rmse_y = 0.0;
    double mean_pxx = 0.0;
    double mean_pyy = 0.0;
    double mean_ess = 0.0;
    long long fes = 0;
};

/// A repeated-trials experiment on one objective. Trial t runs with seed
/// base_seed + t; traces stay per-trial so tables and curves can both be
/// derived from the same run.
struct McStudy {
    std::string objective;
    Optimizer optimizer = Optimizer::pfo;
    PfoConfig pfo_config;
    PsoConfig pso_config;
    int n_trials = 10;
    std::uint64_t base_seed = 0;

    std::vector<RunTrace> traces;
    std::vector<McCurvePoint> curve;
};

namespace harness_detail {

inline const IterationRecord& padded_record(const RunTrace& t, std::size_t k_index) {
    // Early-terminated trials hold their terminal estimate.
    if (k_index < t.records.size()) return t.records[k_index];
    return t.records.back();
}

/// Error statistic for tables: |best estimate-so-far - y*| at the last
/// record whose evaluation count fits the budget.
inline double error_at_budget(const RunTrace& t, long long fes_budget, double y_star) {
    if (t.records.empty() || t.records.front().fes > fes_budget)
        throw CheckpointBeforeFirstIteration(
            "checkpoint " + std::to_string(fes_budget) +
            " precedes the first recorded iteration");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& rec : t.records) {
        if (rec.fes > fes_budget) break;
        best = std::min(best, rec.y_hat);
    }
    return std::fabs(best - y_star);
}

}  // namespace harness_detail

/// Run all trials (optionally in parallel; results are worker-count
/// invariant) and aggregate RMSE-versus-iteration curves against the known
/// optimum. Shorter trials are padded with their terminal record.
inline void run_mc(McStudy& study, int n_threads = 1) {
    const NoisyObjective& raw = find_objective(study.objective);
    if (!raw.known_optimum)
        throw MissingOptimum("objective '" + study.objective +
                             "' has no recorded optimum");
    const NoisyObjective obj = raw.minimizing_view();
    const Vector& x_star = obj.known_optimum->first;
    const double y_star = obj.known_optimum->second;

    study.traces.assign(study.n_trials, RunTrace{});
    parallel_for(study.n_trials, n_threads, [&](int t) {
        if (study.optimizer == Optimizer::pfo) {
            PfoConfig cfg = study.pfo_config;
            cfg.seed = study.base_seed + static_cast<std::uint64_t>(t);
            study.traces[t] = run(cfg, obj);
        } else {
            PsoConfig cfg = study.pso_config;
            cfg.seed = study.base_seed + static_cast<std::uint64_t>(t);
            study.traces[t] = pso_run(cfg, obj);
        }
    });

    std::size_t k_len = 0;
    for (const auto& t : study.traces) k_len = std::max(k_len, t.records.size());
    study.curve.clear();
    study.curve.reserve(k_len);
    const double m = static_cast<double>(study.n_trials);
    for (std::size_t ki = 0; ki < k_len; ++ki) {
        McCurvePoint pt;
        pt.k = static_cast<int>(ki) + 1;
        for (const auto& t : study.traces) {
            const auto& rec = harness_detail::padded_record(t, ki);
            pt.rmse_x += (rec.x_hat - x_star).squaredNorm();
            const double ey = rec.y_hat - y_star;
            pt.rmse_y += ey * ey;
            pt.mean_pxx += spectral_norm(rec.p_xx);
            pt.mean_pyy += rec.p_yy;
            pt.mean_ess += rec.ess;
            if (ki < t.records.size()) pt.fes = std::max(pt.fes, rec.fes);
        }
        pt.rmse_x = std::sqrt(pt.rmse_x / m);
        pt.rmse_y = std::sqrt(pt.rmse_y / m);
        pt.mean_pxx /= m;
        pt.mean_pyy /= m;
        pt.mean_ess /= m;
        study.curve.push_back(pt);
    }
}

/// Rank statistics of per-trial errors at one evaluation budget.
struct QuantileRow {
    long long fes = 0;
    double best = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
    double worst = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
};

/// Per-checkpoint rank table. With 25 trials the rank positions are exactly
/// 1st/7th/13th/19th/25th; other counts interpolate the same quartile grid.
inline std::vector<QuantileRow> quantile_table(const McStudy& study,
                                               const std::vector<long long>& checkpoints) {
    const NoisyObjective obj = find_objective(study.objective).minimizing_view();
    if (!obj.known_optimum)
        throw MissingOptimum("quantile_table requires a known optimum");
    const double y_star = obj.known_optimum->second;

    std::vector<QuantileRow> rows;
    rows.reserve(checkpoints.size());
    for (long long budget : checkpoints) {
        std::vector<double> errs;
        errs.reserve(study.traces.size());
        for (const auto& t : study.traces)
            errs.push_back(harness_detail::error_at_budget(t, budget, y_star));
        std::sort(errs.begin(), errs.end());
        const std::size_t m = errs.size();
        auto at_quantile = [&](double q) {
            const double pos = q * static_cast<double>(m - 1);
            const std::size_t lo = static_cast<std::size_t>(pos);
            const std::size_t hi = std::min(lo + 1, m - 1);
            const double frac = pos - static_cast<double>(lo);
            return errs[lo] * (1.0 - frac) + errs[hi] * frac;
        };
        QuantileRow row;
        row.fes = budget;
        row.best = errs.front();
        row.q25 = at_quantile(0.25);
        row.median = at_quantile(0.5);
        row.q75 = at_quantile(0.75);
        row.worst = errs.back();
        double mean = 0.0;
        for (double e : errs) mean += e;
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (double e : errs) var += (e - mean) * (e - mean);
        row.mean = mean;
        row.stddev = m > 1 ? std::sqrt(var / static_cast<double>(m - 1)) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

/// Inclusive ranges for the randomized parameter study. Integer parameters
/// draw uniformly; the noise scales draw log-uniformly across their decades.
struct SweepRanges {
    int k_max_lo = 20, k_max_hi = 400;
    int n_lo = 20, n_hi = 200;
    double lambda_lo = 0.5, lambda_hi = 5.5;
    double gamma_lo = 0.1, gamma_hi = 1.0;
    double q_lo = 1e-8, q_hi = 1e-2;
    double r_lo = 1e-8, r_hi = 10.0;
};

struct SweepSample {
    int index = 0;
    int k_max = 0;
    int n_particles = 0;
    double n_thr = 0.0;
    double lambda = 0.0;
    double gamma = 0.0;
    double q = 0.0;
    double r = 0.0;
    double e = 0.0;
    double e_x = 0.0;
    double e_y = 0.0;
    std::uint64_t seed = 0;
};

struct SweepStudy {
    std::string objective;
    SweepRanges ranges;
    int n_samples = 200;
    std::uint64_t base_seed = 0;
    std::vector<SweepSample> samples;
};

/// Draw parameter sets, run each once with a per-sample seed, and record the
/// final errors e_x, e_y and their combination.
inline void run_sweep(SweepStudy& study, Optimizer optimizer, int n_threads = 1) {
    if (optimizer != Optimizer::pfo)
        throw std::invalid_argument("parameter sweep is defined for the pfo optimizer");
    const NoisyObjective& raw = find_objective(study.objective);
    if (!raw.known_optimum)
        throw MissingOptimum("objective '" + study.objective +
                             "' has no recorded optimum");
    const NoisyObjective obj = raw.minimizing_view();
    const SweepRanges& rg = study.ranges;

    study.samples.assign(study.n_samples, SweepSample{});
    for (int i = 0; i < study.n_samples; ++i) {
        RngStream rs(study.base_seed, stream_key(0xA5A5, 0, i));
        SweepSample& s = study.samples[i];
        s.index = i;
        s.k_max = rg.k_max_lo +
                  static_cast<int>(rs.uniform01() * (rg.k_max_hi - rg.k_max_lo + 1));
        s.k_max = std::min(s.k_max, rg.k_max_hi);
        s.n_particles =
            rg.n_lo + static_cast<int>(rs.uniform01() * (rg.n_hi - rg.n_lo + 1));
        s.n_particles = std::min(s.n_particles, rg.n_hi);
        s.n_thr = s.n_particles / 2.0;
        s.lambda = rs.uniform(rg.lambda_lo, rg.lambda_hi);
        s.gamma = rs.uniform(rg.gamma_lo, rg.gamma_hi);
        s.q = std::exp(rs.uniform(std::log(rg.q_lo), std::log(rg.q_hi)));
        s.r = std::exp(rs.uniform(std::log(rg.r_lo), std::log(rg.r_hi)));
        s.seed = study.base_seed + static_cast<std::uint64_t>(i);
    }

    const Vector& x_star = obj.known_optimum->first;
    const double y_star = obj.known_optimum->second;
    parallel_for(study.n_samples, n_threads, [&](int i) {
        SweepSample& s = study.samples[i];
        PfoConfig cfg = default_pfo_config(obj);
        cfg.k_max = s.k_max;
        cfg.n_particles = s.n_particles;
        cfg.n_thr = s.n_thr;
        cfg.lambda = s.lambda;
        cfg.gamma = s.gamma;
        cfg.set_q_scalar(s.q, obj.dim());
        cfg.r = s.r;
        cfg.seed = s.seed;
        RunTrace t = run(cfg, obj);
        s.e_x = (t.best_x - x_star).norm();
        s.e_y = std::fabs(t.best_y - y_star);
        s.e = std::sqrt(s.e_x * s.e_x + s.e_y * s.e_y);
    });
}

// ---------------------------------------------------------------------------
// Export / import

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("short write to '" + path + "'");
}

inline std::string mc_to_csv(const McStudy& study) {
    std::string s = "k,rmse_x,rmse_y,mean_pxx,mean_pyy,mean_ess,fes\n";
    for (const auto& p : study.curve) {
        s += std::to_string(p.k) + ',' + format_double(p.rmse_x) + ',' +
             format_double(p.rmse_y) + ',' + format_double(p.mean_pxx) + ',' +
             format_double(p.mean_pyy) + ',' + format_double(p.mean_ess) + ',' +
             std::to_string(p.fes) + '\n';
    }
    return s;
}

inline nlohmann::json mc_to_json(const McStudy& study) {
    nlohmann::json j;
    j["objective"] = study.objective;
    j["optimizer"] = to_string(study.optimizer);
    j["n_trials"] = study.n_trials;
    j["base_seed"] = study.base_seed;
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& p : study.curve) {
        curve.push_back({{"k", p.k},
                         {"rmse_x", p.rmse_x},
                         {"rmse_y", p.rmse_y},
                         {"mean_pxx", p.mean_pxx},
                         {"mean_pyy", p.mean_pyy},
                         {"mean_ess", p.mean_ess},
                         {"fes", p.fes}});
    }
    j["curve"] = curve;
    return j;
}

inline McStudy mc_from_json(const nlohmann::json& j) {
    McStudy study;
    study.objective = j.at("objective").get<std::string>();
    study.optimizer =
        j.at("optimizer").get<std::string>() == "pso" ? Optimizer::pso : Optimizer::pfo;
    study.n_trials = j.at("n_trials").get<int>();
    study.base_seed = j.at("base_seed").get<std::uint64_t>();
    for (const auto& e : j.at("curve")) {
        McCurvePoint p;
        p.k = e.at("k").get<int>();
        p.rmse_x = e.at("rmse_x").get<double>();
        p.rmse_y = e.at("rmse_y").get<double>();
        p.mean_pxx = e.at("mean_pxx").get<double>();
        p.mean_pyy = e.at("mean_pyy").get<double>();
        p.mean_ess = e.at("mean_ess").get<double>();
        p.fes = e.at("fes").get<long long>();
        study.curve.push_back(p);
    }
    return study;
}

inline std::string sweep_to_csv(const SweepStudy& study) {
    std::string s = "sample,k_max,N,n_thr,lambda,gamma,q,r,e,e_x,e_y,seed\n";
    for (const auto& p : study.samples) {
        s += std::to_string(p.index) + ',' + std::to_string(p.k_max) + ',' +
             std::to_string(p.n_particles) + ',' + format_double(p.n_thr) + ',' +
             format_double(p.lambda) + ',' + format_double(p.gamma) + ',' +
             format_double(p.q) + ',' + format_double(p.r) + ',' +
             format_double(p.e) + ',' + format_double(p.e_x) + ',' +
             format_double(p.e_y) + ',' + std::to_string(p.seed) + '\n';
    }
    return s;
}

inline nlohmann::json sweep_to_json(const SweepStudy& study) {
    nlohmann::json j;
    j["objective"] = study.objective;
    j["n_samples"] = study.n_samples;
    j["base_seed"] = study.base_seed;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& p : study.samples) {
        rows.push_back({{"sample", p.index},
                        {"k_max", p.k_max},
                        {"N", p.n_particles},
                        {"n_thr", p.n_thr},
                        {"lambda", p.lambda},
                        {"gamma", p.gamma},
                        {"q", p.q},
                        {"r", p.r},
                        {"e", p.e},
                        {"e_x", p.e_x},
                        {"e_y", p.e_y},
                        {"seed", p.seed}});
    }
    j["samples"] = rows;
    return j;
}

inline SweepStudy sweep_from_json(const nlohmann::json& j) {
    SweepStudy study;
    study.objective = j.at("objective").get<std::string>();
    study.n_samples = j.at("n_samples").get<int>();
    study.base_seed = j.at("base_seed").get<std::uint64_t>();
    for (const auto& e : j.at("samples")) {
        SweepSample p;
        p.index = e.at("sample").get<int>();
        p.k_max = e.at("k_max").get<int>();
        p.n_particles = e.at("N").get<int>();
        p.n_thr = e.at("n_thr").get<double>();
        p.lambda = e.at("lambda").get<double>();
        p.gamma = e.at("gamma").get<double>();
        p.q = e.at("q").get<double>();
        p.r = e.at("r").get<double>();
        p.e = e.at("e").get<double>();
        p.e_x = e.at("e_x").get<double>();
        p.e_y = e.at("e_y").get<double>();
        p.seed = e.at("seed").get<std::uint64_t>();
        study.samples.push_back(p);
    }
    return study;
}

enum class ExportFormat { csv, json };

inline void export_study(const McStudy& study, ExportFormat fmt, const std::string& path) {
    if (fmt == ExportFormat::csv)
        write_file(path, mc_to_csv(study));
    else
        write_file(path, mc_to_json(study).dump(2) + "\n");
}

inline void export_study(const SweepStudy& study, ExportFormat fmt, const std::string& path) {
    if (fmt == ExportFormat::csv)
        write_file(path, sweep_to_csv(study));
    else
        write_file(path, sweep_to_json(study).dump(2) + "\n");
}

}  // namespace pfopt
