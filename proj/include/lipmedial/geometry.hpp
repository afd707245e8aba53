#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lipmedial {

/// A point of the ambient space R^n.
using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A finite closed set of sites M, deduplicated within `tol`.
class SiteSet {
public:
    /// Throws std::invalid_argument on an empty list, mixed dimensions,
    /// non-finite coordinates or a negative tolerance.
    explicit SiteSet(std::vector<Point> sites, double tol = 1e-9);

    const std::vector<Point>& sites() const { return sites_; }
    const Point& operator[](std::size_t i) const { return sites_[i]; }
    std::size_t size() const { return sites_.size(); }
    Eigen::Index dim() const { return sites_.front().size(); }
    double tol() const { return tol_; }

private:
    std::vector<Point> sites_;
    double tol_;
};

struct NearestResult {
    double distance = 0.0;
    std::vector<Point> nearest;
    /// Indices into the site set, parallel to `nearest`.
    std::vector<std::size_t> indices;
};

/// Every site within `M.tol()` of the minimal distance is reported.
NearestResult nearest(const Point& x, const SiteSet& M);

/// Same query with an explicit tie tolerance.
NearestResult nearest(const Point& x, const SiteSet& M, double tol);

struct Interval {
    double lo;
    double hi;
};

/// Regular grid over an axis-aligned box, `resolution` nodes per axis.
class Grid {
public:
    Grid(std::vector<Interval> box, int resolution);

    /// Cube [center - half_width, center + half_width]^n.
    static Grid cube(const Point& center, double half_width, int resolution);

    const std::vector<Interval>& box() const { return box_; }
    int resolution() const { return resolution_; }
    Eigen::Index dim() const { return static_cast<Eigen::Index>(box_.size()); }
    std::size_t node_count() const { return node_count_; }

    /// Node coordinates for a flat index; the first axis varies fastest.
    Point node(std::size_t flat) const;
    std::vector<int> multi_index(std::size_t flat) const;
    std::size_t flat_index(const std::vector<int>& idx) const;
    double coordinate(int axis, int i) const;
    double spacing(int axis) const;

    /// Flat indices of nodes differing by one step along a single axis,
    /// each unordered pair listed once.
    std::vector<std::pair<std::size_t, std::size_t>> adjacent_pairs() const;

private:
    std::vector<Interval> box_;
    int resolution_;
    std::size_t node_count_;
};

/// Grid nodes whose two smallest site distances differ by less than `tol`.
std::vector<Point> medial_axis_grid(const SiteSet& M, const Grid& g, double tol);

/// Connected components of the graph joining points closer than `eps`.
/// Components come out ordered by their smallest input index.
std::vector<std::vector<Point>> cluster_components(const std::vector<Point>& pts, double eps);

struct Neighborhood {
    std::vector<Point> cluster;
    double radius;
};

/// Radii r_j = d_min / 3, d_min the smallest inter-cluster point distance.
std::vector<Neighborhood> build_neighborhoods(const std::vector<std::vector<Point>>& clusters);

/// Smallest distance between a point of `a` and a point of `b`.
double set_distance(const std::vector<Point>& a, const std::vector<Point>& b);

void require_same_dim(const Point& a, const Point& b, const char* what);

}  // namespace lipmedial
