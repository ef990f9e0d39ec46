#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "stokescut/errors.hpp"
#include "stokescut/solver.hpp"
#include "stokescut/verification.hpp"

using namespace stokescut;

namespace {

AssembledSystem tiny_system(const Eigen::MatrixXd &core, int n_p) {
    AssembledSystem sys;
    const int n = static_cast<int>(core.rows());
    sys.blocks = {n - n_p, n_p};
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n + 1, n + 1);
    full.topLeftCorner(n, n) = core;
    sys.matrix = full.sparseView();
    sys.rhs = Eigen::VectorXd::Zero(n + 1);
    sys.constraint = Eigen::VectorXd::Zero(n_p);
    return sys;
}

} // namespace

TEST_CASE("direct solve on the identity") {
    SparseMat m(3, 3);
    m.setIdentity();
    AssembledSystem sys;
    sys.matrix = m;
    sys.rhs = Eigen::VectorXd::Zero(3);
    sys.rhs[0] = 1.0;
    sys.blocks = {2, 0};
    Solution sol = solve_direct(sys);
    CHECK(sol.velocity[0] == doctest::Approx(1.0));
    CHECK(sol.velocity[1] == doctest::Approx(0.0));
    CHECK(sol.residual_norm <= 1e-14);
}

TEST_CASE("singular matrix raises a solver error") {
    SparseMat m(3, 3);
    m.insert(0, 0) = 1.0; // rows 1,2 empty
    m.makeCompressed();
    AssembledSystem sys;
    sys.matrix = m;
    sys.rhs = Eigen::VectorXd::Ones(3);
    sys.blocks = {2, 0};
    CHECK_THROWS_AS(solve_direct(sys), SingularSystemError);
}

TEST_CASE("condition number of simple matrices") {
    SparseMat eye(4, 4);
    eye.setIdentity();
    CHECK(estimate_condition_number(eye) == doctest::Approx(1.0).epsilon(1e-12));

    SparseMat d(2, 2);
    d.insert(0, 0) = 1.0;
    d.insert(1, 1) = 10.0;
    d.makeCompressed();
    CHECK(estimate_condition_number(d) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("iterative condition estimate against the dense SVD oracle") {
    std::mt19937 rng(31337);
    std::normal_distribution<double> dist;
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 60 + 30 * trial;
        // random sparse SPD: A = B B^T + 0.1 I with sparse-ish B
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if ((rng() % 8) == 0) B(i, j) = dist(rng);
        const Eigen::MatrixXd A =
            B * B.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
        const SparseMat As = A.sparseView();

        const Eigen::VectorXd sv = Eigen::BDCSVD<Eigen::MatrixXd>(A).singularValues();
        const double oracle = sv[0] / sv[n - 1];
        const double iterative = estimate_condition_number(As, /*dense_limit=*/0);
        CHECK(std::abs(iterative - oracle) <= 1e-2 * oracle);
        // the dense path agrees trivially
        CHECK(estimate_condition_number(As) == doctest::Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("deflated condition estimate: dense and iterative paths agree") {
    const ManufacturedCase mc = make_case(CaseId::example1_continuous);
    auto disc = build_discretization(mc, 10);
    const AssembledSystem sys = assemble_system(disc->pair(), mc.config);
    const double dense = estimate_condition_number_deflated(sys);
    const double iter = estimate_condition_number_deflated(sys, /*dense_limit=*/0);
    CHECK(std::abs(iter - dense) <= 2e-2 * dense);
    CHECK(dense > 1.0);
}

TEST_CASE("inf-sup estimate on hand-built systems") {
    // 1x1 system a = 2 with unit norms
    Eigen::MatrixXd a(1, 1);
    a(0, 0) = 2.0;
    AssembledSystem sys = tiny_system(a, 0);
    SparseMat nu(1, 1), np(0, 0);
    nu.setIdentity();
    CHECK(estimate_infsup(sys, nu, np) == doctest::Approx(2.0).epsilon(1e-12));

    // homogeneity: scaling the system scales the estimate
    AssembledSystem sys2 = tiny_system(5.0 * a, 0);
    CHECK(estimate_infsup(sys2, nu, np) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("solve-then-multiply residual bound on an assembled system") {
    const ManufacturedCase mc = make_case(CaseId::example3_couette_pjump);
    auto disc = build_discretization(mc, 12);
    const AssembledSystem sys = assemble_system(disc->pair(), mc.config);
    const Solution sol = solve_direct(sys);
    CHECK(sol.residual_norm <= 1e-10);

    // the discrete pressure satisfies the mean-value constraint
    CHECK(std::abs(sys.constraint.dot(sol.pressure)) <=
          1e-10 * sys.constraint.norm() * (sol.pressure.norm() + 1.0));
}
