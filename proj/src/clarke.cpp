#include "lipmedial/clarke.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lipmedial/random.hpp"

namespace lipmedial {

GradientHull::GradientHull(std::vector<Point> vertices, double dedupe_tol) {
    if (vertices.empty()) throw std::invalid_argument("GradientHull: no generators");
    const auto d = vertices.front().size();
    for (auto& v : vertices) {
        if (v.size() != d) throw std::invalid_argument("GradientHull: mixed dimensions");
        if (!v.allFinite()) throw std::invalid_argument("GradientHull: non-finite generator");
        const bool dup = std::any_of(vertices_.begin(), vertices_.end(),
                                     [&](const Point& w) { return (w - v).norm() <= dedupe_tol; });
        if (!dup) vertices_.push_back(std::move(v));
    }
}

double GradientHull::diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        for (std::size_t j = i + 1; j < vertices_.size(); ++j)
            d = std::max(d, (vertices_[i] - vertices_[j]).norm());
    return d;
}

LinearMapPolytope::LinearMapPolytope(std::vector<Matrix> vertices, int m, int k)
    : vertices_(std::move(vertices)), m_(m), k_(k) {
    if (vertices_.empty()) throw std::invalid_argument("LinearMapPolytope: no vertices");
    if (m_ < 0 || k_ < 1) throw std::invalid_argument("LinearMapPolytope: bad split");
    for (const auto& v : vertices_) {
        if (v.rows() != k_ || v.cols() != m_ + k_)
            throw std::invalid_argument("LinearMapPolytope: vertex shape does not match split");
        if (!v.allFinite()) throw std::invalid_argument("LinearMapPolytope: non-finite entry");
    }
}

GradientHull sqdist_gradient_hull(const Point& x0, const SiteSet& Mj) {
    const auto near = nearest(x0, Mj);
    std::vector<Point> grads;
    grads.reserve(near.nearest.size());
    for (const auto& y : near.nearest) grads.push_back(2.0 * (x0 - y));
    return GradientHull(std::move(grads));
}

namespace {

void check_sampling(const SamplingOptions& opt) {
    if (!(opt.radius > 0.0)) throw std::invalid_argument("sampled_clarke_hull: radius must be positive");
    if (opt.n_samples < 1) throw std::invalid_argument("sampled_clarke_hull: need at least one sample");
    if (!(opt.fd_step > 0.0) || opt.fd_step >= opt.radius)
        throw std::invalid_argument("sampled_clarke_hull: fd_step must lie in (0, radius)");
}

Matrix central_jacobian(const VectorFn& f, const Point& p, double h) {
    Matrix J;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        Point fwd = p, bwd = p;
        fwd[i] += h;
        bwd[i] -= h;
        const Eigen::VectorXd df = f(fwd) - f(bwd);
        if (!df.allFinite()) throw std::domain_error("sampled_clarke_hull: non-finite function value");
        if (J.size() == 0) J.resize(df.size(), p.size());
        J.col(i) = df / (2.0 * h);
    }
    return J;
}

}  // namespace

GradientHull sampled_clarke_hull(const ScalarFn& f, const Point& x0, const SamplingOptions& opt) {
    check_sampling(opt);
    VectorFn lifted = [&f](const Point& p) {
        Eigen::VectorXd v(1);
        v[0] = f(p);
        return v;
    };
    Rng rng(opt.seed);
    std::vector<Point> grads;
    grads.reserve(static_cast<std::size_t>(opt.n_samples));
    for (int s = 0; s < opt.n_samples; ++s) {
        const Point p = rng.in_ball(x0, opt.radius);
        grads.push_back(central_jacobian(lifted, p, opt.fd_step).row(0).transpose());
    }
    return GradientHull(std::move(grads), opt.dedupe_tol);
}

LinearMapPolytope sampled_clarke_hull(const VectorFn& f, const Point& x0, int m, int k,
                                      const SamplingOptions& opt) {
    check_sampling(opt);
    if (x0.size() != m + k) throw std::invalid_argument("sampled_clarke_hull: base point does not match split");
    Rng rng(opt.seed);
    std::vector<Matrix> jacs;
    for (int s = 0; s < opt.n_samples; ++s) {
        const Point p = rng.in_ball(x0, opt.radius);
        Matrix J = central_jacobian(f, p, opt.fd_step);
        if (J.rows() != k) throw std::invalid_argument("sampled_clarke_hull: codomain size does not match k");
        const bool dup = std::any_of(jacs.begin(), jacs.end(),
                                     [&](const Matrix& w) { return (w - J).norm() <= opt.dedupe_tol; });
        if (!dup) jacs.push_back(std::move(J));
    }
    return LinearMapPolytope(std::move(jacs), m, k);
}

namespace {

struct Probe {
    Matrix ell;
    double det;
};

Matrix combine(const std::vector<Matrix>& vs, const Eigen::VectorXd& w) {
    Matrix out = Matrix::Zero(vs.front().rows(), vs.front().cols());
    for (std::size_t i = 0; i < vs.size(); ++i) out += w[static_cast<Eigen::Index>(i)] * vs[i];
    return out;
}

Certificate exact_scalar_block(const LinearMapPolytope& P, double tol, std::string name) {
    Certificate c{std::move(name)};
    const auto& vs = P.vertices();
    c.samples_checked = static_cast<long>(vs.size());
    double min_abs = std::numeric_limits<double>::infinity();
    for (const auto& v : vs) {
        const double b = P.right_block(v)(0, 0);
        if (std::abs(b) <= tol) {
            c.witness = v;
            c.margin = std::abs(b);
            return c;
        }
        min_abs = std::min(min_abs, std::abs(b));
    }
    // The right block is affine on the hull: a sign change pins an exact zero.
    for (std::size_t i = 0; i < vs.size(); ++i) {
        for (std::size_t j = i + 1; j < vs.size(); ++j) {
            const double a = P.right_block(vs[i])(0, 0);
            const double b = P.right_block(vs[j])(0, 0);
            if ((a > 0) != (b > 0)) {
                const double t = a / (a - b);
                Matrix w = (1.0 - t) * vs[i] + t * vs[j];
                w(0, P.m()) = 0.0;
                c.witness = std::move(w);
                c.margin = 0.0;
                return c;
            }
        }
    }
    c.holds = true;
    c.margin = min_abs;
    return c;
}

Certificate probe_blocks(const LinearMapPolytope& P, const ProbeOptions& opt, std::string name) {
    if (P.k() == 1) return exact_scalar_block(P, opt.tol, std::move(name));

    Certificate c{std::move(name)};
    const auto& vs = P.vertices();
    auto det_of = [&](const Matrix& ell) { return P.right_block(ell).determinant(); };

    std::vector<Probe> probes;
    for (const auto& v : vs) probes.push_back({v, det_of(v)});
    Rng rng(opt.seed);
    const auto nv = static_cast<Eigen::Index>(vs.size());
    for (int s = 0; s < opt.n_probe && vs.size() > 1; ++s) {
        Matrix ell = combine(vs, rng.simplex_weights(nv));
        const double d = det_of(ell);
        probes.push_back({std::move(ell), d});
    }
    c.samples_checked = static_cast<long>(probes.size());

    double min_abs = std::numeric_limits<double>::infinity();
    const Probe* pos = nullptr;
    const Probe* neg = nullptr;
    for (const auto& p : probes) {
        if (std::abs(p.det) <= opt.tol) {
            c.witness = p.ell;
            c.margin = std::abs(p.det);
            return c;
        }
        min_abs = std::min(min_abs, std::abs(p.det));
        if (p.det > 0 && !pos) pos = &p;
        if (p.det < 0 && !neg) neg = &p;
    }
    if (pos && neg) {
        // det is continuous along the segment, so bisection reaches a singular point.
        Matrix a = pos->ell, b = neg->ell;
        Matrix mid = 0.5 * (a + b);
        for (int it = 0; it < 200; ++it) {
            mid = 0.5 * (a + b);
            const double d = det_of(mid);
            if (std::abs(d) <= opt.tol) break;
            (d > 0 ? a : b) = mid;
        }
        c.witness = std::move(mid);
        c.margin = 0.0;
        return c;
    }
    c.holds = true;
    c.margin = min_abs;
    return c;
}

}  // namespace

Certificate check_star_condition(const LinearMapPolytope& P, const ProbeOptions& opt) {
    return probe_blocks(P, opt, "star_condition");
}

Certificate check_clarke_invertibility(const LinearMapPolytope& P, const ProbeOptions& opt) {
    if (P.m() != 0) throw std::invalid_argument("check_clarke_invertibility: vertices must be square");
    return probe_blocks(P, opt, "clarke_invertibility");
}

LinearMapPolytope lifted_polytope(const LinearMapPolytope& P) {
    const int n = P.m() + P.k();
    std::vector<Matrix> out;
    out.reserve(P.vertices().size());
    for (const auto& ell : P.vertices()) {
        Matrix L = Matrix::Zero(n, n);
        L.topLeftCorner(P.m(), P.m()).setIdentity();
        L.bottomRows(P.k()) = ell;
        out.push_back(std::move(L));
    }
    return LinearMapPolytope(std::move(out), 0, n);
}

SeparatingDirection separating_direction(const GradientHull& H, double tol) {
    const Point p = min_norm_point(H.vertices());
    const double norm = p.norm();
    if (norm <= tol) throw std::domain_error("separating_direction: hull contains the origin");
    return {p / norm, norm};
}

}  // namespace lipmedial
