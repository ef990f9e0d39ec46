#include "stokescut/io.hpp"

#include <cstdio>
#include <fstream>

#include "stokescut/errors.hpp"

namespace stokescut {

namespace {

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::ofstream open_out(const std::string &path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

} // namespace

void write_csv(const std::vector<ErrorReport> &rows, const std::string &path) {
    std::ofstream out = open_out(path);
    out << "h_x,err_p_L2,err_u_L2,err_u_H1,err_u_inf,err_p_inf,cond,infsup\n";
    for (const ErrorReport &r : rows) {
        out << fmt6(r.h_x) << ',' << fmt6(r.err_p_L2) << ',' << fmt6(r.err_u_L2) << ','
            << fmt6(r.err_u_H1) << ',' << fmt6(r.err_u_inf) << ',' << fmt6(r.err_p_inf) << ','
            << fmt6(r.cond) << ',' << fmt6(r.infsup) << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

void write_sweep_csv(const std::vector<SweepRow> &rows, const std::string &path) {
    std::ofstream out = open_out(path);
    out << "delta,eps_u,cond\n";
    for (const SweepRow &r : rows)
        out << fmt6(r.delta) << ',' << fmt6(r.eps_u) << ',' << fmt6(r.cond) << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::string velocity_companion_path(const std::string &pressure_path) {
    const auto dot = pressure_path.find_last_of('.');
    const auto slash = pressure_path.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return pressure_path + "_velocity";
    return pressure_path.substr(0, dot) + "_velocity" + pressure_path.substr(dot);
}

namespace {

void write_side_grid(std::ofstream &out, const TriMesh &mesh, const CutClassification &cls,
                     const DofMap &dofs, int side, const char *title) {
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";

    // points in node order
    std::vector<int> node_vertex(dofs.side_node_count[side], -1);
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        const int n = dofs.node(v, side);
        if (n >= 0) node_vertex[n - (side == 0 ? 0 : dofs.side_node_count[0])] = v;
    }
    const int base = side == 0 ? 0 : dofs.side_node_count[0];
    out << "POINTS " << node_vertex.size() << " double\n";
    char buf[96];
    for (int v : node_vertex) {
        std::snprintf(buf, sizeof(buf), "%.9g %.9g 0\n", mesh.vertices[v].x, mesh.vertices[v].y);
        out << buf;
    }

    std::vector<int> tris;
    for (int t = 0; t < mesh.n_triangles(); ++t)
        if (cls.in_K_h_i[side][t]) tris.push_back(t);
    out << "CELLS " << tris.size() << ' ' << 4 * tris.size() << '\n';
    for (int t : tris) {
        out << 3;
        for (int v : mesh.triangles[t]) out << ' ' << dofs.node(v, side) - base;
        out << '\n';
    }
    out << "CELL_TYPES " << tris.size() << '\n';
    for (std::size_t i = 0; i < tris.size(); ++i) out << "5\n";
    out << "POINT_DATA " << node_vertex.size() << '\n';
}

} // namespace

void write_vtk(const Discretization &disc, const Solution &sol, double pressure_shift,
               const std::string &path_side1, const std::string &path_side2) {
    const std::string ppaths[2] = {path_side1, path_side2};
    char buf[96];
    for (int s = 0; s < 2; ++s) {
        // pressure on the coarse side mesh
        {
            std::ofstream out = open_out(ppaths[s]);
            write_side_grid(out, *disc.pressure_mesh, disc.pressure_cls, disc.pressure_space, s,
                            "pressure");
            out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
            const int base = s == 0 ? 0 : disc.pressure_space.side_node_count[0];
            for (int n = 0; n < disc.pressure_space.side_node_count[s]; ++n) {
                std::snprintf(buf, sizeof(buf), "%.9g\n", sol.pressure[base + n] + pressure_shift);
                out << buf;
            }
            if (!out) throw IoError("write failed for '" + ppaths[s] + "'");
        }
        // velocity on the fine side mesh
        {
            const std::string vpath = velocity_companion_path(ppaths[s]);
            std::ofstream out = open_out(vpath);
            write_side_grid(out, *disc.velocity_mesh, disc.velocity_cls, disc.velocity_space, s,
                            "velocity");
            out << "VECTORS velocity double\n";
            const int base = s == 0 ? 0 : disc.velocity_space.side_node_count[0];
            for (int n = 0; n < disc.velocity_space.side_node_count[s]; ++n) {
                std::snprintf(buf, sizeof(buf), "%.9g %.9g 0\n", sol.velocity[2 * (base + n)],
                              sol.velocity[2 * (base + n) + 1]);
                out << buf;
            }
            if (!out) throw IoError("write failed for '" + vpath + "'");
        }
    }
}

} // namespace stokescut
