#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace lipmedial {

/// Seeded stream with platform-independent output.
///
/// The standard distributions are implementation-defined, so uniform and
/// normal variates are derived directly from the raw mt19937_64 words. Every
/// sampler in the library draws from this class, which is what makes seeded
/// runs byte-reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Box-Muller, one variate per call.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    Eigen::VectorXd normal_vector(Eigen::Index n) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    /// Uniform point of the closed ball B(center, radius).
    Eigen::VectorXd in_ball(const Eigen::VectorXd& center, double radius) {
        const auto n = center.size();
        Eigen::VectorXd dir = normal_vector(n);
        while (dir.norm() == 0.0) dir = normal_vector(n);
        const double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(n));
        return center + r * dir.normalized();
    }

    /// Flat Dirichlet weights: uniform on the probability simplex.
    Eigen::VectorXd simplex_weights(Eigen::Index n) {
        Eigen::VectorXd w(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double u = uniform();
            while (u <= 0.0) u = uniform();
            w[i] = -std::log(u);
        }
        return w / w.sum();
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace lipmedial
