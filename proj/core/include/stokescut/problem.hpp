#pragma once

#include <functional>
#include <optional>

#include "stokescut/geometry.hpp"

namespace stokescut {

/// Coefficients, data functions and method constants for one solve.
///
/// mu1/mu2 are the values of the piecewise viscosity field on side 0/1.
/// Data functions receive the evaluation point and (where the field may
/// jump) the 0-based side index.
struct ProblemConfig {
    double mu1 = 1.0;
    double mu2 = 1.0;
    double sigma = 0.0;

    std::function<Vec2(const Vec2 &, int)> body_force;            // f
    std::function<Vec2(const Vec2 &)> dirichlet;                  // g
    std::function<Vec2(const Vec2 &, int)> exact_velocity;        // optional
    std::function<Mat2(const Vec2 &, int)> exact_velocity_grad;   // optional
    std::function<double(const Vec2 &, int)> exact_pressure;      // optional

    // interface / boundary penalty constants
    double A = 0.5;
    double B = 0.1;
    double D = 0.05;
    double E = 0.25;
    double F = 0.005;
    double G = 0.005;
    /// When set, lambda_dOmega = value / h_x on every boundary face instead
    /// of the per-element formula.
    std::optional<double> lambda_boundary_over_hx;

    // ghost-penalty scalings
    double eps_u = 1e-3;
    double eps_p = 1.0;

    enum class BForm { gradient, divergence };
    BForm b_form = BForm::gradient;

    enum class KappaMode { exact_levelset, prescribed };
    KappaMode kappa_mode = KappaMode::exact_levelset;
    double kappa_const = 0.0;

    double mu(int side) const { return side == 0 ? mu1 : mu2; }
};

/// Throws ConfigError when a constant is outside its admissible range.
/// max_N_Ki comes from the velocity-mesh classification; the E bound is only
/// enforced when the boundary-penalty formula is in use.
void validate_config(const ProblemConfig &cfg, int max_N_Ki);

} // namespace stokescut
