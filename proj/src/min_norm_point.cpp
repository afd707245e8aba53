// Wolfe's minimum-norm-point algorithm over the convex hull of a finite
// generator list. The corral S is kept affinely independent; every major
// cycle adds the generator minimising <x, v>, every minor cycle moves towards
// the affine minimiser of S while staying inside conv(S).

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lipmedial/clarke.hpp"

namespace lipmedial {

namespace {

/// Weights of the point of aff(S) closest to the origin.
Eigen::VectorXd affine_minimizer(const std::vector<Point>& S) {
    const auto m = static_cast<Eigen::Index>(S.size());
    Matrix K = Matrix::Zero(m + 1, m + 1);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) K(i, j) = S[static_cast<std::size_t>(i)].dot(S[static_cast<std::size_t>(j)]);
        K(i, m) = 1.0;
        K(m, i) = 1.0;
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
    rhs[m] = 1.0;
    const Eigen::VectorXd sol = K.completeOrthogonalDecomposition().solve(rhs);
    return sol.head(m);
}

Point weighted(const std::vector<Point>& S, const Eigen::VectorXd& w) {
    Point x = Point::Zero(S.front().size());
    for (std::size_t i = 0; i < S.size(); ++i) x += w[static_cast<Eigen::Index>(i)] * S[i];
    return x;
}

}  // namespace

Point min_norm_point(const std::vector<Point>& vertices, double tol) {
    if (vertices.empty()) throw std::invalid_argument("min_norm_point: no vertices");
    double scale = 0.0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        require_same_dim(vertices[i], vertices.front(), "min_norm_point");
        const double n2 = vertices[i].squaredNorm();
        scale = std::max(scale, n2);
        if (n2 < vertices[start].squaredNorm()) start = i;
    }
    if (scale == 0.0) return Point::Zero(vertices.front().size());

    std::vector<Point> S{vertices[start]};
    std::vector<std::size_t> ids{start};
    Eigen::VectorXd lambda = Eigen::VectorXd::Ones(1);
    Point x = vertices[start];
    const double weight_eps = 1e-14;

    for (int major = 0; major < 1000; ++major) {
        std::size_t j = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            const double v = x.dot(vertices[i]);
            if (v < best) {
                best = v;
                j = i;
            }
        }
        if (x.squaredNorm() - best <= tol * scale) break;
        if (std::find(ids.begin(), ids.end(), j) != ids.end()) break;
        S.push_back(vertices[j]);
        ids.push_back(j);
        lambda.conservativeResize(lambda.size() + 1);
        lambda[lambda.size() - 1] = 0.0;

        for (int minor = 0; minor < 1000; ++minor) {
            const Eigen::VectorXd mu = affine_minimizer(S);
            if ((mu.array() > weight_eps).all()) {
                lambda = mu;
                break;
            }
            double theta = 1.0;
            for (Eigen::Index i = 0; i < mu.size(); ++i) {
                if (mu[i] <= weight_eps) theta = std::min(theta, lambda[i] / (lambda[i] - mu[i]));
            }
            lambda = theta * mu + (1.0 - theta) * lambda;
            std::vector<Point> keptS;
            std::vector<std::size_t> keptIds;
            std::vector<double> keptL;
            for (Eigen::Index i = 0; i < lambda.size(); ++i) {
                if (lambda[i] > weight_eps) {
                    keptS.push_back(S[static_cast<std::size_t>(i)]);
                    keptIds.push_back(ids[static_cast<std::size_t>(i)]);
                    keptL.push_back(lambda[i]);
                }
            }
            S = std::move(keptS);
            ids = std::move(keptIds);
            lambda = Eigen::Map<Eigen::VectorXd>(keptL.data(), static_cast<Eigen::Index>(keptL.size()));
            lambda /= lambda.sum();
        }
        x = weighted(S, lambda);
    }
    return x;
}

}  // namespace lipmedial
