#pragma once

#include <string>
#include <vector>

#include "stokescut/verification.hpp"

namespace stokescut {

/// CSV with the fixed header
/// h_x,err_p_L2,err_u_L2,err_u_H1,err_u_inf,err_p_inf,cond,infsup
/// and 6 significant digits per entry; byte-identical for identical reports.
void write_csv(const std::vector<ErrorReport> &rows, const std::string &path);

/// CSV for the interface-offset sweep: delta,eps_u,cond.
void write_sweep_csv(const std::vector<SweepRow> &rows, const std::string &path);

/// Legacy-ASCII VTK output, one unstructured grid per side. The two paths
/// receive the pressure fields on the pressure mesh; the velocity fields go
/// to companion files with "_velocity" inserted before the extension.
/// `pressure_shift` is added to the pressure coefficients (gauge matching).
void write_vtk(const Discretization &disc, const Solution &sol, double pressure_shift,
               const std::string &path_side1, const std::string &path_side2);

std::string velocity_companion_path(const std::string &pressure_path);

} // namespace stokescut
