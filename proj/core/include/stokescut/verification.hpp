#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "stokescut/assembly.hpp"
#include "stokescut/level_set.hpp"
#include "stokescut/solver.hpp"

namespace stokescut {

enum class CaseId {
    example1_continuous,
    example2_static_drop,
    example3_couette_visc,
    example3_couette_pjump,
};

/// A benchmark problem: geometry, interface, data and method constants.
struct ManufacturedCase {
    CaseId id{};
    std::string name;
    Rect domain;
    LevelSet levelset;
    ProblemConfig config;

    /// Vertical resolution keeping cells near-square for this domain.
    int ny_for(int nx) const;
};

ManufacturedCase make_case(CaseId id);
/// Accepts "1", "2", "3a", "3b" or the full case names.
ManufacturedCase make_case_by_name(const std::string &name);

/// Meshes, classifications and spaces for one resolution. Heap-held parts
/// keep the internal cross-references stable.
struct Discretization {
    std::unique_ptr<TriMesh> pressure_mesh;
    std::unique_ptr<TriMesh> velocity_mesh;
    std::unique_ptr<LevelSet> levelset;
    RefinementMap refinement;
    CutClassification pressure_cls;
    CutClassification velocity_cls;
    DofMap pressure_space;
    DofMap velocity_space;

    DiscretePair pair() const {
        return {pressure_mesh.get(), velocity_mesh.get(), &refinement,
                &pressure_cls,       &velocity_cls,       &pressure_space,
                &velocity_space};
    }
};

/// Pressure mesh nx/2 x ny/2 cells, velocity mesh its uniform refinement.
std::unique_ptr<Discretization> build_discretization(const ManufacturedCase &mcase, int nx);

struct ErrorReport {
    double h_x = 0.0;
    double err_p_L2 = 0.0;
    double err_u_L2 = 0.0;
    double err_u_H1 = 0.0;
    double err_u_inf = 0.0;
    double err_p_inf = 0.0;
    double cond = std::numeric_limits<double>::quiet_NaN();
    double infsup = std::numeric_limits<double>::quiet_NaN();
};

struct RunOptions {
    bool with_cond = false;
    bool with_infsup = false;
    int dense_limit = 4000;
};

struct RunResult {
    ErrorReport report;
    std::unique_ptr<Discretization> disc;
    AssembledSystem system;
    Solution solution;
    double pressure_shift = 0.0; // gauge constant matching the exact pressure
};

/// Build, assemble, solve and measure errors at velocity resolution nx
/// (even, >= 4; the pressure mesh is twice as coarse).
RunResult run_case_full(const ManufacturedCase &mcase, int nx, const RunOptions &opts = {});
ErrorReport run_case(const ManufacturedCase &mcase, int nx, const RunOptions &opts = {});

struct ConvergenceRates {
    double p_L2 = 0.0, u_L2 = 0.0, u_H1 = 0.0, u_inf = 0.0, p_inf = 0.0, cond = 0.0;
};

struct ConvergenceTable {
    std::vector<ErrorReport> rows; // sorted by decreasing h_x
    ConvergenceRates rates;        // least-squares log-log slopes
};

ConvergenceTable convergence_study(const ManufacturedCase &mcase, const std::vector<int> &levels,
                                   const RunOptions &opts = {}, int jobs = 1);

/// Least-squares slope of log(err) against log(h); err ~ h^rate.
double fit_rate(const std::vector<double> &hs, const std::vector<double> &errs);

struct SweepRow {
    double delta = 0.0;
    double eps_u = 0.0;
    double cond = 0.0;
};

/// Interface-offset conditioning sweep on the pressure-jump Couette geometry:
/// the interface sits at x = 2 + delta * h_x of the nearest mesh line.
std::vector<SweepRow> sweep_interface_offset(const std::vector<double> &deltas,
                                             const std::vector<double> &eps_u_values, int nx = 36,
                                             double eps_p = 1.0);

/// Residual of a coefficient vector in the assembled equations (max norm).
double discrete_residual_inf(const AssembledSystem &sys, const Eigen::VectorXd &x);

/// Nodal interpolant of the exact fields, gauge-matched to the constraint;
/// returns the stacked [u | p | 0] coefficient vector.
Eigen::VectorXd interpolate_exact(const Discretization &disc, const ProblemConfig &cfg);

} // namespace stokescut
