#pragma once

#include <string>
#include <string_view>

#include "pfopt/objective.hpp"
#include "pfopt/pfo.hpp"
#include "pfopt/pso.hpp"

namespace pfopt {

/// Tuned filter parameters for each built-in objective. Unknown names get a
/// conservative generic setup sized to the objective's dimension.
inline PfoConfig default_pfo_config(const NoisyObjective& obj) {
    const std::string_view n = obj.name;
    const int dim = obj.dim();
    PfoConfig c;
    c.set_q_scalar(1e-8, dim);

    auto diag_q = [&](double q1, double q2) {
        c.q = Matrix::Zero(2, 2);
        c.q(0, 0) = q1;
        c.q(1, 1) = q2;
    };

    if (n == "H1") {
        c.n_particles = 100; c.k_max = 100; c.lambda = 1.0; c.gamma = 1.0;
        c.sigma_x = 1e-5; c.sigma_y = 1e-5; c.r = 0.5;
    } else if (n == "H2" || n == "H3") {
        c.n_particles = 50; c.k_max = 100; c.lambda = 1.0; c.gamma = 1.0;
        c.sigma_x = 1e-5; c.sigma_y = 1e-5; c.r = 0.5;
    } else if (n == "H4") {
        c.n_particles = 100; c.k_max = 100; c.lambda = 2.0; c.gamma = 1.0;
        c.set_q_scalar(1e-7, dim);
        c.sigma_x = 1e-5; c.sigma_y = 1e-5; c.r = 0.5;
    } else if (n == "H5" || n == "H7") {
        c.n_particles = 50; c.k_max = 100; c.lambda = 5.5; c.gamma = 0.15;
        c.sigma_x = 1e-8; c.sigma_y = 1e-8; c.r = 10.0;
    } else if (n == "H6" || n == "H8" || n == "H6_noiseless" ||
               n == "H8_noiseless" || n == "cec_f1_d1" || n == "cec_f4_d1") {
        c.n_particles = 50; c.k_max = 100; c.lambda = 3.0; c.gamma = 0.15;
        c.sigma_x = 1e-8; c.sigma_y = 1e-8; c.r = 0.0;
    } else if (n == "H9") {
        c.n_particles = 200; c.k_max = 250; c.lambda = 1.0; c.gamma = 0.75;
        diag_q(1e-4, 1e-2);
        c.sigma_x = 3e-9; c.sigma_y = 3e-9; c.r = 0.1;
    } else if (n == "H10") {
        c.n_particles = 200; c.k_max = 350; c.lambda = 1.5; c.gamma = 0.75;
        diag_q(1e-3, 1e-3);
        c.sigma_x = 3e-9; c.sigma_y = 3e-9; c.r = 0.1;
    } else if (n == "H11") {
        c.n_particles = 200; c.k_max = 250; c.lambda = 1.0; c.gamma = 1.0;
        diag_q(1e-4, 1e-4);
        c.sigma_x = 3e-9; c.sigma_y = 3e-9; c.r = 0.1;
    } else if (n == "H12") {
        c.n_particles = 200; c.k_max = 400; c.lambda = 1.0; c.gamma = 0.4;
        diag_q(3e-3, 1e-4);
        c.sigma_x = 3e-9; c.sigma_y = 3e-9; c.r = 1.0;
    } else {
        c.n_particles = 100; c.k_max = 100; c.lambda = 1.0; c.gamma = 1.0;
        c.set_q_scalar(1e-6, dim);
        c.sigma_x = 1e-6; c.sigma_y = 1e-6; c.r = 0.0;
    }
    c.n_thr = c.n_particles / 2.0;
    return c;
}

/// Swarm parameters: tuned rows for the quadratic family, with a fallback
/// that scales the velocity clamp to the box width elsewhere.
inline PsoConfig default_pso_config(const NoisyObjective& obj) {
    const std::string_view n = obj.name;
    PsoConfig c;
    c.k_max = 100;
    c.sigma_nn = 5;

    if (n == "H5" || n == "H6" || n == "H6_noiseless" || n == "cec_f1_d1") {
        c.n_particles = 150; c.v_max = 2.26;
        c.phi_p_max = 0.37; c.phi_n_max = 3.68; c.phi_g_max = 7.4;
        c.w_max = 0.9; c.w_min = 0.25;
    } else if (n == "H7" || n == "H8" || n == "H8_noiseless" || n == "cec_f4_d1") {
        c.n_particles = 150; c.v_max = 7.18;
        c.phi_p_max = 0.32; c.phi_n_max = 7.0; c.phi_g_max = 8.05;
        c.w_max = 0.9; c.w_min = 0.15;
    } else {
        double width = 0.0;
        for (int j = 0; j < obj.dim(); ++j)
            width = std::max(width, obj.domain.upper[j] - obj.domain.lower[j]);
        c.n_particles = 100;
        c.v_max = 0.02 * width;
        c.phi_p_max = 0.37; c.phi_n_max = 3.68; c.phi_g_max = 7.4;
        c.w_max = 0.9; c.w_min = 0.25;
    }
    return c;
}

}  // namespace pfopt
