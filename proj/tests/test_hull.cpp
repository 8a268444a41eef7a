#include <doctest.h>

#include <Eigen/Dense>

#include <random>
#include <vector>

#include "rcbf/hull.hpp"

using rcbf::HullSet;
using rcbf::Interval;
using rcbf::IntervalMatrix;
using rcbf::IntervalVector;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) {
        v(i++) = x;
    }
    return v;
}

// Brute-force reference: dot the direction against every corner matrix of an
// interval matrix applied to u, enumerating all 2^(n m) sign patterns.
double corner_matrix_min(const Eigen::VectorXd& grad, const IntervalMatrix& dm,
                         const Eigen::VectorXd& u) {
    const Eigen::Index n = dm.rows();
    const Eigen::Index m = dm.cols();
    const std::size_t count = std::size_t{1} << (n * m);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t mask = 0; mask < count; ++mask) {
        Eigen::MatrixXd corner(n, m);
        std::size_t bit = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < m; ++j, ++bit) {
                corner(i, j) = (mask >> bit) & 1u ? dm.hi(i, j) : dm.lo(i, j);
            }
        }
        best = std::min(best, grad.dot(corner * u));
    }
    return best;
}

}  // namespace

TEST_SUITE("hull") {

TEST_CASE("min_support enumerates the vertex dot products") {
    const HullSet hull({vec({1, 2}), vec({-3, 5}), vec({0, 0})});
    const auto result = rcbf::min_support(vec({1, 0}), hull);
    CHECK(result.value == doctest::Approx(-3.0));
    CHECK(result.vertex_index == 1);
}

TEST_CASE("min_support with a zero direction is zero at index zero") {
    const HullSet hull({vec({4, -1}), vec({2, 9})});
    const auto result = rcbf::min_support(vec({0, 0}), hull);
    CHECK(result.value == 0.0);
    CHECK(result.vertex_index == 0);
}

TEST_CASE("min_support ties resolve to the smallest index") {
    const HullSet hull({vec({2, -2}), vec({-2, 2})});
    const auto result = rcbf::min_support(vec({1, 1}), hull);
    CHECK(result.value == 0.0);
    CHECK(result.vertex_index == 0);
}

TEST_CASE("min_support rejects a direction of the wrong dimension") {
    const HullSet hull({vec({1, 2})});
    CHECK_THROWS_AS(rcbf::min_support(vec({1, 0, 0}), hull), std::invalid_argument);
}

TEST_CASE("hull construction rejects empty and ragged vertex lists") {
    CHECK_THROWS_AS(HullSet({}), std::invalid_argument);
    CHECK_THROWS_AS(HullSet({vec({1}), vec({1, 2})}), std::invalid_argument);
}

TEST_CASE("interval corners of a single interval are its endpoints") {
    const HullSet corners = rcbf::interval_vector_vertices(IntervalVector(vec({-1}), vec({1})));
    REQUIRE(corners.size() == 2);
    CHECK(corners.vertex(0)(0) == -1.0);
    CHECK(corners.vertex(1)(0) == 1.0);
}

TEST_CASE("interval corners come in lexicographic order") {
    const HullSet corners =
        rcbf::interval_vector_vertices(IntervalVector(vec({-1, -2}), vec({1, 2})));
    REQUIRE(corners.size() == 4);
    CHECK(corners.vertex(0).isApprox(vec({-1, -2})));
    CHECK(corners.vertex(1).isApprox(vec({-1, 2})));
    CHECK(corners.vertex(2).isApprox(vec({1, -2})));
    CHECK(corners.vertex(3).isApprox(vec({1, 2})));
}

TEST_CASE("degenerate intervals keep their duplicate corners") {
    const HullSet corners =
        rcbf::interval_vector_vertices(IntervalVector(vec({0, 2}), vec({0, 3})));
    REQUIRE(corners.size() == 4);
    CHECK(corners.vertex(0).isApprox(vec({0, 2})));
    CHECK(corners.vertex(1).isApprox(vec({0, 3})));
    CHECK(corners.vertex(2).isApprox(vec({0, 2})));
    CHECK(corners.vertex(3).isApprox(vec({0, 3})));
}

TEST_CASE("interval corner enumeration caps the dimension") {
    const Eigen::VectorXd lo = Eigen::VectorXd::Zero(21);
    const Eigen::VectorXd hi = Eigen::VectorXd::Ones(21);
    CHECK_THROWS_AS(rcbf::interval_vector_vertices(IntervalVector(lo, hi)),
                    std::invalid_argument);
}

TEST_CASE("interval corner count is always 2^n") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int n = 1; n <= 6; ++n) {
        Eigen::VectorXd lo(n);
        Eigen::VectorXd hi(n);
        for (int i = 0; i < n; ++i) {
            const double a = dist(rng);
            const double b = dist(rng);
            lo(i) = std::min(a, b);
            hi(i) = std::max(a, b);
        }
        CHECK(rcbf::interval_vector_vertices(IntervalVector(lo, hi)).size() ==
              (std::size_t{1} << n));
    }
}

TEST_CASE("orthotope corners of a zero matrix are all zero") {
    const auto rows = rcbf::orthotope_vertices(vec({1, 1, 1}), IntervalMatrix::zero(3, 2));
    REQUIRE(rows.size() == 4);
    for (const auto& row : rows) {
        CHECK(row.isZero(0.0));
    }
}

TEST_CASE("orthotope corners match the hand-computed column interval") {
    IntervalMatrix dm(vec({0, 2}), vec({1, 3}));
    const auto rows = rcbf::orthotope_vertices(vec({1, 1}), dm);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0](0) == doctest::Approx(2.0));
    CHECK(rows[1](0) == doctest::Approx(4.0));
}

TEST_CASE("orthotope corners of a one-entry matrix") {
    Eigen::MatrixXd lo = Eigen::MatrixXd::Zero(3, 2);
    Eigen::MatrixXd hi = Eigen::MatrixXd::Zero(3, 2);
    lo(0, 0) = -0.2;
    hi(0, 0) = 0.1;
    const auto rows = rcbf::orthotope_vertices(vec({1, 0, 0}), IntervalMatrix(lo, hi));
    REQUIRE(rows.size() == 4);
    // Duplicates from the degenerate second column are retained.
    std::vector<double> firsts{rows[0](0), rows[1](0), rows[2](0), rows[3](0)};
    std::sort(firsts.begin(), firsts.end());
    CHECK(firsts[0] == doctest::Approx(-0.2));
    CHECK(firsts[1] == doctest::Approx(-0.2));
    CHECK(firsts[2] == doctest::Approx(0.1));
    CHECK(firsts[3] == doctest::Approx(0.1));
    for (const auto& row : rows) {
        CHECK(row(1) == 0.0);
    }
}

TEST_CASE("orthotope minimum equals the full corner-matrix minimum") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-1.5, 1.5);
    std::uniform_int_distribution<int> n_dist(1, 4);
    std::uniform_int_distribution<int> m_dist(1, 3);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = n_dist(rng);
        const int m = m_dist(rng);
        Eigen::MatrixXd lo(n, m);
        Eigen::MatrixXd hi(n, m);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < m; ++j) {
                const double a = dist(rng);
                const double b = dist(rng);
                lo(i, j) = std::min(a, b);
                hi(i, j) = std::max(a, b);
            }
        }
        Eigen::VectorXd grad(n);
        Eigen::VectorXd u(m);
        for (int i = 0; i < n; ++i) grad(i) = dist(rng);
        for (int j = 0; j < m; ++j) u(j) = dist(rng);

        const IntervalMatrix dm(lo, hi);
        const auto rows = rcbf::orthotope_vertices(grad, dm);
        REQUIRE(rows.size() == (std::size_t{1} << m));
        double orthotope_min = std::numeric_limits<double>::infinity();
        for (const auto& phi : rows) {
            orthotope_min = std::min(orthotope_min, phi.dot(u));
        }
        CHECK(std::abs(orthotope_min - corner_matrix_min(grad, dm, u)) <= 1e-12);
    }
}

TEST_CASE("union concatenates and preserves the minimum of minima") {
    const HullSet a({vec({1})});
    const HullSet b({vec({-1})});
    const HullSet merged = rcbf::union_vertices({a, b});
    REQUIRE(merged.size() == 2);
    CHECK(rcbf::min_support(vec({1}), merged).value == doctest::Approx(-1.0));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-4.0, 4.0);
    std::uniform_int_distribution<int> size_dist(1, 5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<HullSet> hulls;
        std::size_t total = 0;
        const int q = size_dist(rng);
        for (int k = 0; k < q; ++k) {
            std::vector<Eigen::VectorXd> vertices;
            const int p = size_dist(rng);
            total += static_cast<std::size_t>(p);
            for (int i = 0; i < p; ++i) {
                vertices.push_back(vec({dist(rng), dist(rng), dist(rng)}));
            }
            hulls.emplace_back(std::move(vertices));
        }
        const HullSet all = rcbf::union_vertices(hulls);
        CHECK(all.size() == total);
        const Eigen::VectorXd dir = vec({dist(rng), dist(rng), dist(rng)});
        double per_hull_min = std::numeric_limits<double>::infinity();
        for (const auto& hull : hulls) {
            per_hull_min = std::min(per_hull_min, rcbf::min_support(dir, hull).value);
        }
        CHECK(rcbf::min_support(dir, all).value == per_hull_min);
    }
}

TEST_CASE("union of a single hull is the identity") {
    const HullSet hull({vec({1, 2}), vec({3, 4})});
    const HullSet merged = rcbf::union_vertices({hull});
    REQUIRE(merged.size() == 2);
    CHECK(merged.vertex(0).isApprox(hull.vertex(0)));
    CHECK(merged.vertex(1).isApprox(hull.vertex(1)));
}

TEST_CASE("union rejects an empty list and mismatched dimensions") {
    CHECK_THROWS_AS(rcbf::union_vertices({}), std::invalid_argument);
    CHECK_THROWS_AS(rcbf::union_vertices({HullSet({vec({1})}), HullSet({vec({1, 2})})}),
                    std::invalid_argument);
}

TEST_CASE("random convex combinations never beat the vertex minimum") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> p_dist(1, 6);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 1 + trial % 4;
        const int p = p_dist(rng);
        std::vector<Eigen::VectorXd> vertices;
        for (int i = 0; i < p; ++i) {
            Eigen::VectorXd v(d);
            for (int k = 0; k < d; ++k) v(k) = dist(rng);
            vertices.push_back(v);
        }
        const HullSet hull(vertices);
        Eigen::VectorXd dir(d);
        for (int k = 0; k < d; ++k) dir(k) = dist(rng);

        const auto support = rcbf::min_support(dir, hull);
        CHECK(dir.dot(hull.vertex(support.vertex_index)) == support.value);
        for (int sample = 0; sample < 100; ++sample) {
            Eigen::VectorXd weights(p);
            for (int i = 0; i < p; ++i) weights(i) = unit(rng);
            weights /= weights.sum();
            Eigen::VectorXd point = Eigen::VectorXd::Zero(d);
            for (int i = 0; i < p; ++i) point += weights(i) * hull.vertex(static_cast<std::size_t>(i));
            CHECK(dir.dot(point) >= support.value - 1e-12);
        }
    }
}

TEST_CASE("interval endpoint arithmetic is sign aware") {
    const Interval a{-1.0, 2.0};
    const Interval scaled = -3.0 * a;
    CHECK(scaled.lo == doctest::Approx(-6.0));
    CHECK(scaled.hi == doctest::Approx(3.0));
    const Interval shifted = 1.0 + a;
    CHECK(shifted.lo == doctest::Approx(0.0));
    CHECK(shifted.hi == doctest::Approx(3.0));
    CHECK_THROWS_AS(Interval(1.0, 0.0), std::invalid_argument);
}

}  // TEST_SUITE
