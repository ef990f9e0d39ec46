#include "stokescut/solver.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "stokescut/errors.hpp"

namespace stokescut {

namespace {

constexpr double kIterTol = 1e-3;
constexpr int kIterCap = 10000;

SparseMat leading_block(const SparseMat &m, int n) {
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMat::InnerIterator it(m, k); it; ++it)
            if (it.row() < n && it.col() < n) trip.emplace_back(it.row(), it.col(), it.value());
    SparseMat out(n, n);
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

Eigen::VectorXd deterministic_start(int n) {
    Eigen::VectorXd v(n);
    std::uint64_t state = 0x9e3779b97f4a7c15ull;
    for (int i = 0; i < n; ++i) {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        v[i] = (static_cast<double>(state >> 11) / 9007199254740992.0) - 0.5;
    }
    return v;
}

// Largest eigenvalue of a symmetric positive semidefinite operator. Rayleigh
// quotients with a geometric-tail extrapolation as the stopping rule; the
// extrapolated value is returned.
double power_iteration(const std::function<Eigen::VectorXd(const Eigen::VectorXd &)> &apply, int n) {
    Eigen::VectorXd v = deterministic_start(n).normalized();
    double lambda = 0.0, diff_prev = 0.0;
    for (int it = 0; it < kIterCap; ++it) {
        const Eigen::VectorXd w = apply(v);
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        const double next = v.dot(w);
        const double diff = next - lambda;
        if (it > 2) {
            if (std::abs(diff) <= 1e-15 * std::abs(next)) return next;
            const double rho = diff_prev != 0.0 ? diff / diff_prev : 0.0;
            if (rho > 0.0 && rho < 1.0) {
                const double tail = diff * rho / (1.0 - rho);
                if (std::abs(tail) <= kIterTol * std::abs(next)) return next + tail;
            }
        }
        lambda = next;
        diff_prev = diff;
        v = w / nw;
    }
    return lambda;
}

} // namespace

Solution solve_direct(const AssembledSystem &sys) {
    Eigen::SparseLU<SparseMat> lu;
    lu.compute(sys.matrix);
    if (lu.info() != Eigen::Success)
        throw SingularSystemError("direct factorization failed: " + lu.lastErrorMessage());

    Eigen::VectorXd x = lu.solve(sys.rhs);
    // one refinement pass keeps the static-equilibrium solutions at roundoff
    Eigen::VectorXd r = sys.rhs - sys.matrix * x;
    x += lu.solve(r);

    const double rhs_norm = sys.rhs.norm();
    const double res = (sys.rhs - sys.matrix * x).norm();

    Solution sol;
    sol.velocity = x.head(sys.blocks.n_u);
    sol.pressure = x.segment(sys.blocks.n_u, sys.blocks.n_p);
    sol.multiplier = x[sys.blocks.total() - 1];
    sol.residual_norm = rhs_norm > 0.0 ? res / rhs_norm : res;
    return sol;
}

namespace {

double condition_dense(const Eigen::MatrixXd &m, int n_drop) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    const auto &sv = svd.singularValues();
    const int n = static_cast<int>(sv.size());
    if (n - 1 - n_drop < 0) return std::numeric_limits<double>::infinity();
    const double smin = sv[n - 1 - n_drop];
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return sv[0] / smin;
}

} // namespace

double estimate_condition_number(const SparseMat &m, int dense_limit) {
    if (m.rows() <= dense_limit) return condition_dense(Eigen::MatrixXd(m), 0);

    const SparseMat mt = SparseMat(m.transpose());
    const int n = static_cast<int>(m.rows());
    const double sigma_max2 = power_iteration(
        [&](const Eigen::VectorXd &v) -> Eigen::VectorXd { return mt * (m * v); }, n);

    Eigen::SparseLU<SparseMat> lu, lut;
    lu.compute(m);
    if (lu.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    lut.compute(mt);
    if (lut.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const double inv_sigma_min2 = power_iteration(
        [&](const Eigen::VectorXd &v) -> Eigen::VectorXd { return lu.solve(lut.solve(v)); }, n);
    if (inv_sigma_min2 <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(sigma_max2 * inv_sigma_min2);
}

double estimate_condition_number_deflated(const AssembledSystem &sys, int dense_limit) {
    const int n = sys.blocks.n_u + sys.blocks.n_p;
    const SparseMat core = leading_block(sys.matrix, n);

    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < sys.blocks.n_p; ++j) e[sys.blocks.n_u + j] = 1.0;
    const double e2 = e.squaredNorm();
    auto project = [&](Eigen::VectorXd v) -> Eigen::VectorXd {
        v -= e * (e.dot(v) / e2);
        return v;
    };

    if (n <= dense_limit) {
        Eigen::MatrixXd A(core);
        const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) - (e * e.transpose()) / e2;
        return condition_dense(P * A * P, 1);
    }

    const SparseMat coret = SparseMat(core.transpose());
    const double sigma_max2 = power_iteration(
        [&](const Eigen::VectorXd &v) -> Eigen::VectorXd {
            return project(coret * (core * project(v)));
        },
        n);

    // inverse iteration through the bordered factorization: the multiplier
    // column absorbs the deflated direction, so solves stay well posed
    const SparseMat full_t = SparseMat(sys.matrix.transpose());
    Eigen::SparseLU<SparseMat> lu, lut;
    lu.compute(sys.matrix);
    if (lu.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    lut.compute(full_t);
    if (lut.info() != Eigen::Success) return std::numeric_limits<double>::infinity();

    auto solve_core = [&](Eigen::SparseLU<SparseMat> &f, const Eigen::VectorXd &b) -> Eigen::VectorXd {
        Eigen::VectorXd full = Eigen::VectorXd::Zero(n + 1);
        full.head(n) = b;
        Eigen::VectorXd x = f.solve(full);
        return x.head(n);
    };
    const double inv_sigma_min2 = power_iteration(
        [&](const Eigen::VectorXd &v) -> Eigen::VectorXd {
            return project(solve_core(lu, project(solve_core(lut, project(v)))));
        },
        n);
    if (inv_sigma_min2 <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(sigma_max2 * inv_sigma_min2);
}

double estimate_infsup(const AssembledSystem &sys, const SparseMat &norm_u, const SparseMat &norm_p) {
    const int n_u = sys.blocks.n_u, n_p = sys.blocks.n_p;
    const int n = n_u + n_p;
    if (n > 4000) throw Error("inf-sup estimator is dense-only (dimension <= 4000)");

    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
    W.topLeftCorner(n_u, n_u) = Eigen::MatrixXd(norm_u);
    W.bottomRightCorner(n_p, n_p) = Eigen::MatrixXd(norm_p);
    Eigen::LLT<Eigen::MatrixXd> llt(W);
    if (llt.info() != Eigen::Success) throw Error("indefinite norm matrix in inf-sup estimate");
    const Eigen::MatrixXd L = llt.matrixL();

    Eigen::MatrixXd A(leading_block(sys.matrix, n));
    const Eigen::MatrixXd X = L.triangularView<Eigen::Lower>().solve(A);
    Eigen::MatrixXd M =
        L.triangularView<Eigen::Lower>().solve(X.transpose()).transpose();

    int drop = 0;
    if (n_p > 0) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < n_p; ++j) e[n_u + j] = 1.0;
        Eigen::VectorXd tilde = L.transpose() * e;
        tilde.normalize();
        const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) - tilde * tilde.transpose();
        M = P * M * P;
        drop = 1;
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    const auto &sv = svd.singularValues();
    return sv[static_cast<int>(sv.size()) - 1 - drop];
}

} // namespace stokescut
