#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pfopt/core.hpp"
#include "pfopt/errors.hpp"
#include "pfopt/rng.hpp"

namespace pfopt {

/// How measurements of a deterministic core are corrupted.
///   none                 H(x) = h(x)
///   additive             H(x) = h(x) + e,      e ~ N(0, r)
///   multiplicative_state H(x) = h(x) + e*x,    e ~ N(0, r), scalar x only
///   scaled_quadratic     H(x) = (h(x)-bias)*(1 + 0.4|z|) + bias + e,
///                        z ~ N(0,1), e ~ N(0, r); the noise profile of the
///                        CEC 2005 "Schwefel 1.2 with noise" family
struct NoiseModel {
    enum class Kind { none, additive, multiplicative_state, scaled_quadratic };

    Kind kind = Kind::none;
    double r = 0.0;
    double bias = 0.0; // scaled_quadratic only

    static NoiseModel noiseless() { return {}; }
    static NoiseModel additive_var(double r) {
        return {Kind::additive, r, 0.0};
    }
    static NoiseModel multiplicative(double r) {
        return {Kind::multiplicative_state, r, 0.0};
    }
    static NoiseModel scaled(double bias, double extra_additive_r = 0.0) {
        return {Kind::scaled_quadratic, extra_additive_r, bias};
    }

    double sample(double h, const Vector& x, RngStream& rng) const {
        switch (kind) {
            case Kind::none:
                return h;
            case Kind::additive:
                return h + std::sqrt(r) * rng.normal();
            case Kind::multiplicative_state:
                if (x.size() != 1)
                    throw DimensionMismatch(
                        "multiplicative_state noise is defined for scalar x");
                return h + std::sqrt(r) * rng.normal() * x[0];
            case Kind::scaled_quadratic: {
                double m = 1.0 + 0.4 * std::fabs(rng.normal());
                double out = (h - bias) * m + bias;
                if (r > 0.0) out += std::sqrt(r) * rng.normal();
                return out;
            }
        }
        return h;
    }
};

/// A black-box scalar objective: deterministic core, noise model, search box,
/// and (for scoring only) the known optimum. Objectives are immutable;
/// evaluation counting is the caller's job.
struct NoisyObjective {
    enum class Extremum { minimize, maximize };

    std::string name;
    std::function<double(const Vector&)> core;
    NoiseModel noise;
    SearchDomain domain;
    std::optional<std::pair<Vector, double>> known_optimum;
    Extremum extremum = Extremum::minimize;

    int dim() const { return domain.dim(); }

    /// Noise-free core value; out-of-box points are clamped to the box.
    /// For oracles and scoring only, never exposed to optimizers.
    double eval_true(const Vector& x) const {
        check_dim(x);
        return core(domain.clamp(x));
    }

    double eval_noisy(const Vector& x, RngStream& rng) const {
        check_dim(x);
        Vector c = domain.clamp(x);
        return noise.sample(core(c), c, rng);
    }

    /// View with the core negated, so maximization entries can be fed to a
    /// minimizer. Minimization entries are returned unchanged.
    NoisyObjective minimizing_view() const {
        if (extremum == Extremum::minimize) return *this;
        NoisyObjective v = *this;
        auto inner = core;
        v.core = [inner](const Vector& x) { return -inner(x); };
        v.extremum = Extremum::minimize;
        if (known_optimum)
            v.known_optimum = {known_optimum->first, -known_optimum->second};
        return v;
    }

  private:
    void check_dim(const Vector& x) const {
        if (x.size() != domain.lower.size())
            throw DimensionMismatch("objective '" + name + "' expects dimension " +
                                    std::to_string(domain.dim()));
    }
};

namespace detail {

inline Vector vec1(double a) {
    Vector v(1);
    v[0] = a;
    return v;
}

inline Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

// CEC 2005 instances at D=1 with a fixed, documented shift. Errors against
// these are reported relative to the bias, which makes them shift-invariant.
constexpr double kCecShift = 50.0;
constexpr double kCecBias = -450.0;

inline double cec_quadratic(const Vector& x) {
    const double d = x[0] - kCecShift;
    return d * d + kCecBias;
}

}  // namespace detail

/// All built-in objectives. Optima marked here were located with an
/// independent grid-plus-refinement oracle; the test suite re-derives them.
inline const std::vector<NoisyObjective>& catalog() {
    using detail::vec1;
    using detail::vec2;
    static const std::vector<NoisyObjective> entries = [] {
        std::vector<NoisyObjective> c;

        auto sine_bowl = [](const Vector& x) {
            const double d = x[0] - 2.0;
            return -std::sin(x[0]) * d * d;
        };

        c.push_back({"H1", sine_bowl, NoiseModel::additive_var(0.5),
                     SearchDomain::box1d(0.0, 10.0),
                     {{vec1(8.167559790160798), -36.1838672992257}}});

        c.push_back({"H2",
                     [](const Vector& x) { return (x[0] - 1.0) * (x[0] - 1.0); },
                     NoiseModel::additive_var(0.5), SearchDomain::box1d(-5.0, 5.0),
                     {{vec1(1.0), 0.0}}});

        c.push_back({"H3",
                     [](const Vector& x) {
                         const double d = x[0] - 1.0;
                         return d * d + std::cos(10.0 * (x[0] - 0.1));
                     },
                     NoiseModel::additive_var(0.5), SearchDomain::box1d(-5.0, 5.0),
                     {{vec1(1.0416448886729717), -0.9982310167107645}}});

        c.push_back({"H4", sine_bowl, NoiseModel::multiplicative(0.5),
                     SearchDomain::box1d(0.0, 10.0),
                     {{vec1(8.167559790160798), -36.1838672992257}}});

        const SearchDomain cec_box = SearchDomain::box1d(-100.0, 100.0);
        const auto cec_opt =
            std::make_pair(vec1(detail::kCecShift), detail::kCecBias);

        c.push_back({"H5", detail::cec_quadratic, NoiseModel::additive_var(10.0),
                     cec_box, cec_opt});
        c.push_back({"H6", detail::cec_quadratic, NoiseModel::noiseless(), cec_box,
                     cec_opt});
        c.push_back({"H7", detail::cec_quadratic,
                     NoiseModel::scaled(detail::kCecBias, 10.0), cec_box, cec_opt});
        c.push_back({"H8", detail::cec_quadratic,
                     NoiseModel::scaled(detail::kCecBias), cec_box, cec_opt});

        c.push_back({"H9",
                     [](const Vector& x) {
                         return x[0] * std::exp(-x[0] * x[0] - x[1] * x[1]);
                     },
                     NoiseModel::additive_var(0.1),
                     SearchDomain::box2d(-2.0, 2.0, -2.0, 2.0),
                     {{vec2(-0.7071067811865475, 0.0), -0.4288819424803534}}});

        // Concave bowl; registered as a maximization problem so the printed
        // formula is preserved and (1,1) is its extremum.
        c.push_back({"H10",
                     [](const Vector& x) {
                         const double a = x[0] - 1.0, b = x[1] - 1.0;
                         return -0.1 * (a * a + b * b);
                     },
                     NoiseModel::noiseless(), SearchDomain::box2d(-2.0, 4.0, -2.0, 4.0),
                     {{vec2(1.0, 1.0), 0.0}},
                     NoisyObjective::Extremum::maximize});

        constexpr double kPi = 3.14159265358979323846;
        c.push_back({"H11",
                     [](const Vector& x) {
                         const double a = x[0] - kPi, b = x[1] - kPi;
                         return -std::cos(x[0]) * std::cos(x[1]) *
                                std::exp(-(a * a + b * b));
                     },
                     NoiseModel::additive_var(0.1),
                     SearchDomain::box2d(0.0, 2.0 * kPi, 0.0, 2.0 * kPi),
                     {{vec2(kPi, kPi), -1.0}}});

        c.push_back({"H12",
                     [](const Vector& x) {
                         const double s = 0.5 * (x[0] * x[0] + x[1] * x[1]);
                         const double cs = 0.5 * (std::cos(2.0 * kPi * x[0]) +
                                                  std::cos(2.0 * kPi * x[1]));
                         return -20.0 * std::exp(-0.2 * std::sqrt(s)) -
                                std::exp(cs) + 20.0 + std::exp(1.0);
                     },
                     NoiseModel::additive_var(1.0),
                     SearchDomain::box2d(-5.0, 5.0, -5.0, 5.0),
                     {{vec2(0.0, 0.0), 0.0}}});

        c.push_back({"H6_noiseless", detail::cec_quadratic, NoiseModel::noiseless(),
                     cec_box, cec_opt});
        c.push_back({"H8_noiseless", detail::cec_quadratic, NoiseModel::noiseless(),
                     cec_box, cec_opt});
        c.push_back({"cec_f1_d1", detail::cec_quadratic, NoiseModel::noiseless(),
                     cec_box, cec_opt});
        c.push_back({"cec_f4_d1", detail::cec_quadratic,
                     NoiseModel::scaled(detail::kCecBias), cec_box, cec_opt});
        return c;
    }();
    return entries;
}

inline const NoisyObjective& find_objective(std::string_view name) {
    for (const auto& obj : catalog())
        if (obj.name == name) return obj;
    throw std::invalid_argument("unknown objective: " + std::string(name));
}

}  // namespace pfopt
