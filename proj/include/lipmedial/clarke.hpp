#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lipmedial/geometry.hpp"

namespace lipmedial {

/// Outcome of a condition check. A failing certificate always carries a
/// witness; a passing one reports the smallest margin it observed.
struct Certificate {
    std::string name;
    bool holds = false;
    double margin = 0.0;
    std::optional<Matrix> witness;
    long samples_checked = 0;
};

/// Convex hull of finitely many gradient vectors.
class GradientHull {
public:
    /// Generators closer than `dedupe_tol` to an earlier one are dropped.
    explicit GradientHull(std::vector<Point> vertices, double dedupe_tol = 1e-12);

    const std::vector<Point>& vertices() const { return vertices_; }
    Eigen::Index dim() const { return vertices_.front().size(); }
    double diameter() const;

private:
    std::vector<Point> vertices_;
};

/// Convex hull of k x (m + k) matrices; the last k columns are the "right
/// block" acting on the y variables.
class LinearMapPolytope {
public:
    LinearMapPolytope(std::vector<Matrix> vertices, int m, int k);

    const std::vector<Matrix>& vertices() const { return vertices_; }
    int m() const { return m_; }
    int k() const { return k_; }
    Matrix right_block(const Matrix& ell) const { return ell.rightCols(k_); }

private:
    std::vector<Matrix> vertices_;
    int m_;
    int k_;
};

using ScalarFn = std::function<double(const Point&)>;
using VectorFn = std::function<Eigen::VectorXd(const Point&)>;

/// Exact Clarke gradient of x -> dist(x, Mj)^2 at x0: the hull of
/// 2 (x0 - y) over the nearest sites y.
GradientHull sqdist_gradient_hull(const Point& x0, const SiteSet& Mj);

struct SamplingOptions {
    double radius = 0.1;
    int n_samples = 200;
    double fd_step = 1e-6;
    std::uint64_t seed = 0;
    /// Sampled gradients closer than this are merged.
    double dedupe_tol = 1e-7;
};

/// Inner approximation of the Clarke gradient from central-difference
/// gradients at uniform samples of B(x0, radius).
GradientHull sampled_clarke_hull(const ScalarFn& f, const Point& x0, const SamplingOptions& opt);

/// Vector-valued variant: f maps R^(m+k) to R^k, Jacobians are k x (m+k).
LinearMapPolytope sampled_clarke_hull(const VectorFn& f, const Point& x0, int m, int k,
                                      const SamplingOptions& opt);

struct ProbeOptions {
    int n_probe = 256;
    std::uint64_t seed = 0;
    /// Determinants with magnitude at or below this count as singular.
    double tol = 1e-12;
};

/// Checks that the right k x k block of every hull element is nonsingular.
/// k = 1 is decided exactly; k >= 2 probes vertices plus random convex
/// combinations and locates a singular witness by bisection when the
/// determinant changes sign.
Certificate check_star_condition(const LinearMapPolytope& P, const ProbeOptions& opt = {});

/// Nonsingularity of every element of a hull of square matrices.
Certificate check_clarke_invertibility(const LinearMapPolytope& P, const ProbeOptions& opt = {});

/// The polytope of full maps (x, y) -> (x, ell(x, y)), square of size m + k.
LinearMapPolytope lifted_polytope(const LinearMapPolytope& P);

/// Nearest point of conv(vertices) to the origin (Wolfe's algorithm).
Point min_norm_point(const std::vector<Point>& vertices, double tol = 1e-12);

struct SeparatingDirection {
    Point direction;
    double margin;
};

/// Unit L with <ell, L> >= margin > 0 on the whole hull. Throws
/// std::domain_error when the hull contains the origin within `tol`.
SeparatingDirection separating_direction(const GradientHull& H, double tol = 1e-10);

}  // namespace lipmedial
