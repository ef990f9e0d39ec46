#pragma once

#include <Eigen/Sparse>

#include "stokescut/assembly.hpp"

namespace stokescut {

struct Solution {
    Eigen::VectorXd velocity;   // coefficients over the velocity DofMap
    Eigen::VectorXd pressure;   // coefficients over the pressure DofMap
    double multiplier = 0.0;
    double residual_norm = 0.0; // relative (absolute when rhs vanishes)
};

/// Sparse LU with one step of iterative refinement.
Solution solve_direct(const AssembledSystem &sys);

/// Spectral condition number sigma_max/sigma_min. Dense SVD up to
/// `dense_limit` rows, otherwise power iteration on M^T M plus inverse
/// iteration through the LU factors (relative accuracy 1e-3, 1e4 iterations).
/// Returns +inf for a singular matrix.
double estimate_condition_number(const SparseMat &m, int dense_limit = 4000);

/// Condition number of the saddle-point matrix without the multiplier
/// bordering, deflated by the constant-pressure direction it neutralizes.
double estimate_condition_number_deflated(const AssembledSystem &sys, int dense_limit = 4000);

/// Numerically estimated inf-sup constant: the smallest nonzero generalized
/// singular value of the stabilized form under the given norm matrices.
/// Dense, desk scale only (dimension <= 4000).
double estimate_infsup(const AssembledSystem &sys, const SparseMat &norm_u, const SparseMat &norm_p);

} // namespace stokescut
