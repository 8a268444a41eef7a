#include <doctest.h>

#include <Eigen/Dense>

#include <random>

#include "qp_oracle.hpp"
#include "rcbf/qp.hpp"

using rcbf::ActiveSetQp;
using rcbf::QpProblem;
using rcbf::QpSolution;
using rcbf::QpStatus;

namespace {

QpProblem one_dim(double u_nom, double u_max) {
    QpProblem p;
    p.weight = Eigen::VectorXd::Ones(1);
    p.u_nom = Eigen::VectorXd::Constant(1, u_nom);
    p.A = Eigen::MatrixXd(0, 1);
    p.b = Eigen::VectorXd(0);
    p.u_max = u_max;
    return p;
}

double kkt_complementarity(const QpProblem& p, const QpSolution& s) {
    const Eigen::Index d = p.u_nom.size();
    const Eigen::Index m = p.A.rows();
    double worst = 0.0;
    for (Eigen::Index r = 0; r < m; ++r) {
        worst = std::max(worst, std::abs(s.lambda(r) * (p.A.row(r).dot(s.u_star) - p.b(r))));
    }
    for (Eigen::Index k = 0; k < d; ++k) {
        worst = std::max(worst,
                         std::abs(s.lambda(m + 2 * k) * (s.u_star(k) + p.u_max)));
        worst = std::max(worst,
                         std::abs(s.lambda(m + 2 * k + 1) * (-s.u_star(k) + p.u_max)));
    }
    return worst;
}

}  // namespace

TEST_SUITE("qp") {

TEST_CASE("a feasible nominal input passes through unchanged") {
    QpProblem p;
    p.weight = Eigen::VectorXd::Ones(2);
    p.u_nom = Eigen::Vector2d(0.4, -0.2);
    p.A = Eigen::MatrixXd(1, 2);
    p.A << 1.0, 1.0;
    p.b = Eigen::VectorXd::Constant(1, -5.0);
    p.u_max = 1.0;

    ActiveSetQp solver;
    const auto s = solver.solve(p);
    CHECK(s.status == QpStatus::optimal);
    CHECK((s.u_star - p.u_nom).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(s.primal_residual <= 1e-9);
    CHECK(s.dual_residual <= 1e-9);
}

TEST_CASE("single violated row projects onto its boundary") {
    // minimize (u - 1)^2 subject to u >= 2, |u| <= 3
    QpProblem p = one_dim(1.0, 3.0);
    p.A = Eigen::MatrixXd::Ones(1, 1);
    p.b = Eigen::VectorXd::Constant(1, 2.0);

    ActiveSetQp solver;
    const auto s = solver.solve(p);
    CHECK(s.status == QpStatus::optimal);
    CHECK(s.u_star(0) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("box binds when the nominal input is outside it") {
    QpProblem p = one_dim(5.0, 0.3);
    ActiveSetQp solver;
    const auto s = solver.solve(p);
    CHECK(s.status == QpStatus::optimal);
    CHECK(s.u_star(0) == doctest::Approx(0.3));
}

TEST_CASE("an unreachable row is reported infeasible") {
    QpProblem p = one_dim(0.0, 1.0);
    p.A = Eigen::MatrixXd::Ones(1, 1);
    p.b = Eigen::VectorXd::Constant(1, 2.0);  // u >= 2 with |u| <= 1
    ActiveSetQp solver;
    const auto s = solver.solve(p);
    CHECK(s.status == QpStatus::infeasible);
}

TEST_CASE("duplicate rows do not disturb the solve") {
    QpProblem p;
    p.weight = Eigen::VectorXd::Ones(2);
    p.u_nom = Eigen::Vector2d(-1.0, -1.0);
    p.A = Eigen::MatrixXd(4, 2);
    p.A << 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0;
    p.b.resize(4);
    p.b << 0.5, 0.5, 0.5, -2.0;
    p.u_max = 3.0;

    ActiveSetQp solver;
    const auto s = solver.solve(p);
    CHECK(s.status == QpStatus::optimal);
    CHECK(s.u_star(0) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(s.u_star(1) == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("random problems agree with exhaustive active-set enumeration") {
    std::mt19937_64 rng(101);
    ActiveSetQp solver;
    int infeasible_seen = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const QpProblem p = rcbf_test::random_problem(rng);
        const auto oracle = rcbf_test::enumerate_active_sets(p);
        const auto s = solver.solve(p);
        if (!oracle.feasible) {
            ++infeasible_seen;
            CHECK(s.status == QpStatus::infeasible);
            continue;
        }
        REQUIRE(s.status == QpStatus::optimal);
        CHECK((s.u_star - oracle.u).lpNorm<Eigen::Infinity>() <= 1e-6);
        CHECK(s.primal_residual <= 1e-6);
        CHECK(s.dual_residual <= 1e-6);
        CHECK(kkt_complementarity(p, s) <= 1e-6);
    }
    CHECK(infeasible_seen > 0);  // the generator must exercise both branches
}

TEST_CASE("row scaling by a positive constant leaves the solution unchanged") {
    std::mt19937_64 rng(103);
    ActiveSetQp solver_a;
    ActiveSetQp solver_b;
    for (int trial = 0; trial < 50; ++trial) {
        QpProblem p = rcbf_test::random_problem(rng, {3, 6, 0.0});
        const auto base = solver_a.solve(p);
        if (base.status != QpStatus::optimal) {
            continue;
        }
        QpProblem scaled = p;
        scaled.A *= 37.5;
        scaled.b *= 37.5;
        const auto s = solver_b.solve(scaled);
        REQUIRE(s.status == QpStatus::optimal);
        CHECK((s.u_star - base.u_star).lpNorm<Eigen::Infinity>() <= 1e-8);
    }
}

TEST_CASE("identical problems produce bitwise identical solutions") {
    std::mt19937_64 rng(107);
    for (int trial = 0; trial < 20; ++trial) {
        const QpProblem p = rcbf_test::random_problem(rng);
        ActiveSetQp fresh_a;
        ActiveSetQp fresh_b;
        const auto a = fresh_a.solve(p);
        const auto b = fresh_b.solve(p);
        REQUIRE(a.status == b.status);
        REQUIRE(a.u_star.size() == b.u_star.size());
        for (Eigen::Index k = 0; k < a.u_star.size(); ++k) {
            CHECK(a.u_star(k) == b.u_star(k));
        }
    }
}

TEST_CASE("warm-started resolve of the same problem stays at the optimum") {
    std::mt19937_64 rng(109);
    ActiveSetQp solver;
    for (int trial = 0; trial < 20; ++trial) {
        const QpProblem p = rcbf_test::random_problem(rng, {3, 6, 0.0});
        const auto first = solver.solve(p);
        const auto second = solver.solve(p);
        REQUIRE(first.status == second.status);
        if (first.status == QpStatus::optimal) {
            CHECK((first.u_star - second.u_star).lpNorm<Eigen::Infinity>() <= 1e-10);
            CHECK(second.iterations <= first.iterations);
        }
    }
}

TEST_CASE("invalid problems are rejected with a reason") {
    QpProblem p = one_dim(0.0, 1.0);
    p.weight(0) = 0.0;
    ActiveSetQp solver;
    CHECK_THROWS_AS(solver.solve(p), std::invalid_argument);

    QpProblem q = one_dim(0.0, -1.0);
    CHECK_THROWS_AS(solver.solve(q), std::invalid_argument);

    QpProblem r = one_dim(0.0, 1.0);
    r.A = Eigen::MatrixXd::Ones(2, 1);
    r.b = Eigen::VectorXd::Zero(1);
    CHECK_THROWS_AS(solver.solve(r), std::invalid_argument);
}

}  // TEST_SUITE
