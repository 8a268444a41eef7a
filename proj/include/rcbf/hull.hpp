#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace rcbf {

// Closed interval [lo, hi]. Arithmetic is exact endpoint arithmetic;
// multiplying by a negative scalar swaps the endpoints.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double lo_, double hi_);
    static Interval point(double v) { return {v, v}; }

    double width() const { return hi - lo; }
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator+(double a, const Interval& b);
Interval operator+(const Interval& a, double b);
Interval operator*(double c, const Interval& a);

// Finite set of points whose convex hull represents a disturbance set.
// Linear functionals attain their minimum over the hull at a vertex, so the
// robust constraint generators only ever scan this list.
class HullSet {
public:
    explicit HullSet(std::vector<Eigen::VectorXd> vertices);

    Eigen::Index dim() const { return dim_; }
    std::size_t size() const { return vertices_.size(); }
    const Eigen::VectorXd& vertex(std::size_t i) const { return vertices_[i]; }
    const std::vector<Eigen::VectorXd>& vertices() const { return vertices_; }

private:
    std::vector<Eigen::VectorXd> vertices_;
    Eigen::Index dim_ = 0;
};

// Entrywise interval vector: entry i ranges over [lo(i), hi(i)].
class IntervalVector {
public:
    IntervalVector(Eigen::VectorXd lo, Eigen::VectorXd hi);
    static IntervalVector zero(Eigen::Index n);

    Eigen::Index size() const { return lo_.size(); }
    double lo(Eigen::Index i) const { return lo_(i); }
    double hi(Eigen::Index i) const { return hi_(i); }
    Interval entry(Eigen::Index i) const { return {lo_(i), hi_(i)}; }

private:
    Eigen::VectorXd lo_;
    Eigen::VectorXd hi_;
};

// Entrywise interval matrix: entry (i, j) ranges over [lo(i,j), hi(i,j)].
class IntervalMatrix {
public:
    IntervalMatrix(Eigen::MatrixXd lo, Eigen::MatrixXd hi);
    static IntervalMatrix zero(Eigen::Index rows, Eigen::Index cols);

    Eigen::Index rows() const { return lo_.rows(); }
    Eigen::Index cols() const { return lo_.cols(); }
    double lo(Eigen::Index i, Eigen::Index j) const { return lo_(i, j); }
    double hi(Eigen::Index i, Eigen::Index j) const { return hi_(i, j); }
    Interval entry(Eigen::Index i, Eigen::Index j) const { return {lo_(i, j), hi_(i, j)}; }
    void set_entry(Eigen::Index i, Eigen::Index j, const Interval& v);

private:
    Eigen::MatrixXd lo_;
    Eigen::MatrixXd hi_;
};

struct SupportResult {
    double value = 0.0;
    std::size_t vertex_index = 0;
};

// Minimum of direction . v over the hull vertices. Ties resolve to the
// smallest vertex index.
SupportResult min_support(const Eigen::VectorXd& direction, const HullSet& hull);

// All 2^n corner points of an interval vector, in lexicographic order over
// the entries (entry 0 varies slowest, lo before hi). Degenerate intervals
// produce duplicate corners; the count is always exactly 2^n. Rejects n > 20.
HullSet interval_vector_vertices(const IntervalVector& box);

// Corner row vectors of the box spanned by gradient^T * dm, where dm is an
// interval matrix: column j of the product ranges over
// [sum_i min(g_i lo_ij, g_i hi_ij), sum_i max(g_i lo_ij, g_i hi_ij)].
// Returns all 2^m corners in the same lexicographic order as
// interval_vector_vertices. Rejects m > 20.
std::vector<Eigen::RowVectorXd> orthotope_vertices(const Eigen::VectorXd& gradient,
                                                   const IntervalMatrix& dm);

// Concatenates the vertex lists; minimizing over the result equals taking
// the minimum of the per-hull minima.
HullSet union_vertices(const std::vector<HullSet>& hulls);

}  // namespace rcbf
