#pragma once

#include <Eigen/Sparse>

#include "stokescut/cut.hpp"
#include "stokescut/mesh.hpp"
#include "stokescut/problem.hpp"
#include "stokescut/spaces.hpp"

namespace stokescut {

using SparseMat = Eigen::SparseMatrix<double>;

struct NitscheWeights {
    double kappa1 = 0.5;
    double kappa2 = 0.5;
};

/// Cut-element weights from the side area fractions, eq. kappa_i ~ mu_j alpha_i.
NitscheWeights compute_nitsche_weights(const CutElement &ce, double mu1, double mu2);

/// Aligned-chord weights; T is the side-0 element of the pair, K the side-1 one.
NitscheWeights compute_nitsche_weights_aligned(double alpha_T, double gamma_T, double alpha_K,
                                               double gamma_K, double mu1, double mu2);

/// Interface penalty lambda_Gamma for a cut element (eta_K / h_K) or an
/// aligned chord (eta_K / |chord|); `partner` is the other pair member for
/// aligned chords, ignored otherwise.
double compute_lambda_gamma(const CutElement &ce, const CutElement *partner, double h_K,
                            const ProblemConfig &cfg);

/// Boundary penalty lambda_dOmega for one side of a boundary element.
double compute_lambda_boundary(const CutElement &ce, int side, const CutClassification &cls,
                               double h_K, const ProblemConfig &cfg);

struct BlockStructure {
    int n_u = 0;
    int n_p = 0;
    int total() const { return n_u + n_p + 1; } // + mean-value multiplier
};

/// Saddle-point system over [velocity | pressure | multiplier].
struct AssembledSystem {
    SparseMat matrix;
    Eigen::VectorXd rhs;
    BlockStructure blocks;
    Eigen::VectorXd constraint; // mean-value row, over pressure dofs
};

/// Everything assembly needs: the mesh pair, both classifications and spaces.
struct DiscretePair {
    const TriMesh *pressure_mesh = nullptr;
    const TriMesh *velocity_mesh = nullptr;
    const RefinementMap *refinement = nullptr;
    const CutClassification *pressure_cls = nullptr;
    const CutClassification *velocity_cls = nullptr;
    const DofMap *pressure_space = nullptr;
    const DofMap *velocity_space = nullptr;
};

AssembledSystem assemble_system(const DiscretePair &dp, const ProblemConfig &cfg);

enum class GhostField { pressure, velocity };

/// Face-jump stabilization matrix (without the eps scaling). Pressure faces
/// carry mu_i^{-1} h^3, velocity faces mu_i h^s with s = 1 on faces crossed
/// from a cut boundary element to its interior neighbor, s = 3 otherwise.
SparseMat assemble_ghost_penalty(const DofMap &dofs, const CutClassification &cls, double mu1,
                                 double mu2, GhostField which);

/// Norm matrices realizing the mesh-dependent velocity/pressure norms used by
/// the inf-sup estimator.
std::pair<SparseMat, SparseMat> build_infsup_norms(const DiscretePair &dp, const ProblemConfig &cfg);

/// Smallest horizontal face length (the structured-mesh x spacing).
double mesh_dx(const TriMesh &mesh);

} // namespace stokescut
