#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "lipmedial/geometry.hpp"

namespace lipmedial {

/// f(x, y) with x in R^m and y, f in R^k.
using SplitFn = std::function<Eigen::VectorXd(const Eigen::VectorXd& x, const Eigen::VectorXd& y)>;
using MapFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// A Lipschitz germ f at (x0, y0) with f(x0, y0) = z0, restricted to the box
/// U x V.
struct LipschitzMapSpec {
    SplitFn f;
    Point x0;
    Point y0;
    Eigen::VectorXd z0;
    std::vector<Interval> x_box;
    std::vector<Interval> y_box;

    int m() const { return static_cast<int>(x0.size()); }
    int k() const { return static_cast<int>(y0.size()); }

    /// Shapes, box containment, and f(x0, y0) = z0 within `tol`.
    void validate(double tol = 1e-9) const;
};

/// F(x, y) = (x, f(x, y)) on concatenated coordinates.
MapFn graph_map(const LipschitzMapSpec& spec);

struct SolveOptions {
    double tol = 1e-10;
    int max_iter = 200;
    /// Added to every node's starting guess; used to probe uniqueness.
    std::optional<Eigen::VectorXd> initial_offset;
    /// k = 1: sample count of the root scan over V.
    int scan_intervals = 128;
};

enum class NodeStatus { Converged, Failed, Ambiguous };

struct ImplicitSolution {
    Grid grid;
    Matrix slope;
    std::vector<Point> nodes;
    std::vector<Eigen::VectorXd> g;
    std::vector<double> residuals;
    std::vector<NodeStatus> status;
    std::vector<int> iterations;
    /// Nodes where no root was reached.
    std::vector<std::size_t> failed;
    /// Nodes where a second root of f(x, .) = z0 was found in V.
    std::vector<std::size_t> ambiguous;
    double lipschitz_estimate = 0.0;

    bool clean() const { return failed.empty() && ambiguous.empty(); }
};

/// Solves f(x, g(x)) = z0 on every node of `grid` (a grid over U) by the
/// fixed-slope iteration y <- y - alpha A^{-1} (f(x, y) - z0), visiting
/// nodes outward from x0 and warm-starting from solved neighbours.
/// Throws std::invalid_argument when A is singular or shapes disagree.
ImplicitSolution implicit_solve(const LipschitzMapSpec& spec, const Matrix& A, const Grid& grid,
                                const SolveOptions& opt = {});

struct Distortion {
    double lower = 0.0;
    double upper = 0.0;
    long pairs_used = 0;
};

using PointPair = std::pair<Point, Point>;

/// Extreme ratios |map(p) - map(q)| / |p - q|; coincident pairs are skipped.
Distortion bilipschitz_estimate(const MapFn& map, const std::vector<PointPair>& pairs);

/// As above, also folding in the inverse's ratios on the image pairs, so
/// lower <= 1 / Lip(inverse) on the samples.
Distortion bilipschitz_estimate(const MapFn& map, const MapFn& inverse, const std::vector<PointPair>& pairs);

struct Chart {
    MapFn forward;
    MapFn inverse;
    Distortion distortion;
    double roundtrip_error = 0.0;
    std::vector<Point> samples;
};

struct ChartOptions {
    int n_samples = 100;
    std::uint64_t seed = 0;
    double tol = 1e-12;
    int max_iter = 200;
};

/// phi(x, y) = (x - x0, f(x, y)) with a numerically realised inverse.
/// Round-trips `n_samples` seeded points of U x V; throws std::runtime_error
/// when the inverse iteration does not converge on one of them.
Chart build_chart(const LipschitzMapSpec& spec, const ImplicitSolution& solution, const ChartOptions& opt = {});

}  // namespace lipmedial
