#include "rcbf/hull.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace rcbf {

namespace {

// 2^20 corners is already far beyond the handful any disturbed system here
// needs, and guards against accidental exponential blowup.
constexpr Eigen::Index kMaxEnumerationBits = 20;

}  // namespace

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (lo > hi) {
        throw std::invalid_argument("Interval: lo must not exceed hi");
    }
}

Interval operator+(const Interval& a, const Interval& b) {
    return {a.lo + b.lo, a.hi + b.hi};
}

Interval operator+(double a, const Interval& b) { return {a + b.lo, a + b.hi}; }

Interval operator+(const Interval& a, double b) { return {a.lo + b, a.hi + b}; }

Interval operator*(double c, const Interval& a) {
    if (c >= 0.0) {
        return {c * a.lo, c * a.hi};
    }
    return {c * a.hi, c * a.lo};
}

HullSet::HullSet(std::vector<Eigen::VectorXd> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.empty()) {
        throw std::invalid_argument("HullSet: vertex list must be nonempty");
    }
    dim_ = vertices_.front().size();
    for (const auto& v : vertices_) {
        if (v.size() != dim_) {
            throw std::invalid_argument("HullSet: all vertices must share one dimension");
        }
    }
}

IntervalVector::IntervalVector(Eigen::VectorXd lo, Eigen::VectorXd hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.size() != hi_.size()) {
        throw std::invalid_argument("IntervalVector: lo and hi must have equal length");
    }
    for (Eigen::Index i = 0; i < lo_.size(); ++i) {
        if (lo_(i) > hi_(i)) {
            throw std::invalid_argument("IntervalVector: lo exceeds hi");
        }
    }
}

IntervalVector IntervalVector::zero(Eigen::Index n) {
    return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
}

IntervalMatrix::IntervalMatrix(Eigen::MatrixXd lo, Eigen::MatrixXd hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.rows() != hi_.rows() || lo_.cols() != hi_.cols()) {
        throw std::invalid_argument("IntervalMatrix: lo and hi must have equal shape");
    }
    for (Eigen::Index i = 0; i < lo_.rows(); ++i) {
        for (Eigen::Index j = 0; j < lo_.cols(); ++j) {
            if (lo_(i, j) > hi_(i, j)) {
                throw std::invalid_argument("IntervalMatrix: lo exceeds hi");
            }
        }
    }
}

IntervalMatrix IntervalMatrix::zero(Eigen::Index rows, Eigen::Index cols) {
    return {Eigen::MatrixXd::Zero(rows, cols), Eigen::MatrixXd::Zero(rows, cols)};
}

void IntervalMatrix::set_entry(Eigen::Index i, Eigen::Index j, const Interval& v) {
    lo_(i, j) = v.lo;
    hi_(i, j) = v.hi;
}

SupportResult min_support(const Eigen::VectorXd& direction, const HullSet& hull) {
    if (direction.size() != hull.dim()) {
        throw std::invalid_argument("min_support: direction dimension mismatch");
    }
    SupportResult best{direction.dot(hull.vertex(0)), 0};
    for (std::size_t i = 1; i < hull.size(); ++i) {
        const double value = direction.dot(hull.vertex(i));
        if (value < best.value) {
            best = {value, i};
        }
    }
    return best;
}

HullSet interval_vector_vertices(const IntervalVector& box) {
    const Eigen::Index n = box.size();
    if (n < 1) {
        throw std::invalid_argument("interval_vector_vertices: empty interval vector");
    }
    if (n > kMaxEnumerationBits) {
        throw std::invalid_argument("interval_vector_vertices: dimension exceeds enumeration cap");
    }
    const std::size_t count = std::size_t{1} << n;
    std::vector<Eigen::VectorXd> vertices;
    vertices.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            // entry 0 varies slowest: bit (n-1-i) of k selects hi for entry i
            const bool take_hi = (k >> (n - 1 - i)) & 1u;
            v(i) = take_hi ? box.hi(i) : box.lo(i);
        }
        vertices.push_back(std::move(v));
    }
    return HullSet(std::move(vertices));
}

std::vector<Eigen::RowVectorXd> orthotope_vertices(const Eigen::VectorXd& gradient,
                                                   const IntervalMatrix& dm) {
    const Eigen::Index n = dm.rows();
    const Eigen::Index m = dm.cols();
    if (gradient.size() != n) {
        throw std::invalid_argument("orthotope_vertices: gradient dimension mismatch");
    }
    if (m > kMaxEnumerationBits) {
        throw std::invalid_argument("orthotope_vertices: column count exceeds enumeration cap");
    }
    Eigen::VectorXd col_lo(m);
    Eigen::VectorXd col_hi(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        double lo = 0.0;
        double hi = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double a = gradient(i) * dm.lo(i, j);
            const double b = gradient(i) * dm.hi(i, j);
            lo += std::min(a, b);
            hi += std::max(a, b);
        }
        col_lo(j) = lo;
        col_hi(j) = hi;
    }
    const HullSet corners = interval_vector_vertices(IntervalVector(col_lo, col_hi));
    std::vector<Eigen::RowVectorXd> rows;
    rows.reserve(corners.size());
    for (const auto& v : corners.vertices()) {
        rows.push_back(v.transpose());
    }
    return rows;
}

HullSet union_vertices(const std::vector<HullSet>& hulls) {
    if (hulls.empty()) {
        throw std::invalid_argument("union_vertices: empty hull list");
    }
    const Eigen::Index dim = hulls.front().dim();
    std::vector<Eigen::VectorXd> merged;
    for (const auto& hull : hulls) {
        if (hull.dim() != dim) {
            throw std::invalid_argument("union_vertices: hull dimension mismatch");
        }
        merged.insert(merged.end(), hull.vertices().begin(), hull.vertices().end());
    }
    return HullSet(std::move(merged));
}

}  // namespace rcbf
