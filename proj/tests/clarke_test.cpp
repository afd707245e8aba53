#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lipmedial/clarke.hpp"
#include "lipmedial/random.hpp"

using namespace lipmedial;

namespace {

Point P(std::initializer_list<double> v) {
    Point p(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) p[i++] = x;
    return p;
}

Matrix row(std::initializer_list<double> v) { return P(v).transpose(); }

bool has_vertex(const GradientHull& H, const Point& v, double tol) {
    for (const auto& w : H.vertices())
        if ((w - v).norm() <= tol) return true;
    return false;
}

// Exact nearest point to the origin of a simplex with at most three vertices,
// by enumerating all faces. Independent of Wolfe's corral iteration.
double simplex_min_norm(const std::vector<Point>& s) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : s) best = std::min(best, v.norm());
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            const Point d = s[j] - s[i];
            const double t = std::clamp(-s[i].dot(d) / d.squaredNorm(), 0.0, 1.0);
            best = std::min(best, (s[i] + t * d).norm());
        }
    }
    if (s.size() == 3) {
        Matrix E(s[0].size(), 2);
        E << s[1] - s[0], s[2] - s[0];
        const Eigen::Vector2d c = (E.transpose() * E).ldlt().solve(-E.transpose() * s[0]);
        if (c[0] >= 0 && c[1] >= 0 && c.sum() <= 1) best = std::min(best, (s[0] + E * c).norm());
    }
    return best;
}

// Barycentric test: the origin lies in the full-dimensional simplex s.
bool simplex_contains_origin(const std::vector<Point>& s) {
    const auto d = s.front().size();
    Matrix A(d + 1, d + 1);
    for (std::size_t i = 0; i < s.size(); ++i) A.col(static_cast<Eigen::Index>(i)) << s[i], 1.0;
    Eigen::PartialPivLU<Matrix> lu(A);
    if (std::abs(lu.determinant()) < 1e-12) return false;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d + 1);
    rhs[d] = 1.0;
    return lu.solve(rhs).minCoeff() >= 0.0;
}

// Distance from the origin to conv(vertices) in dimension d <= 3: zero if a
// (d + 1)-vertex simplex contains it, else the minimum over all sub-simplices
// with at most d vertices.
double brute_min_norm(const std::vector<Point>& v) {
    const auto d = v.front().size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
        best = std::min(best, simplex_min_norm({v[i]}));
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            best = std::min(best, simplex_min_norm({v[i], v[j]}));
            for (std::size_t k = j + 1; k < v.size(); ++k) {
                best = std::min(best, simplex_min_norm({v[i], v[j], v[k]}));
                if (d == 2 && simplex_contains_origin({v[i], v[j], v[k]})) return 0.0;
                if (d < 3) continue;
                for (std::size_t l = k + 1; l < v.size(); ++l)
                    if (simplex_contains_origin({v[i], v[j], v[k], v[l]})) return 0.0;
            }
        }
    }
    return best;
}

}  // namespace

TEST(SqdistGradientHullTest, SmoothPoint) {
    const auto H = sqdist_gradient_hull(P({0, 0}), SiteSet({P({3, 4})}));
    ASSERT_EQ(H.vertices().size(), 1u);
    EXPECT_EQ(H.vertices()[0], P({-6, -8}));
}

TEST(SqdistGradientHullTest, TwoEquidistantSites) {
    const auto H = sqdist_gradient_hull(P({0, 0}), SiteSet({P({0, 1}), P({0, -1})}));
    EXPECT_EQ(H.vertices().size(), 2u);
    EXPECT_TRUE(has_vertex(H, P({0, -2}), 0));
    EXPECT_TRUE(has_vertex(H, P({0, 2}), 0));
}

TEST(SqdistGradientHullTest, FarSiteIgnored) {
    const auto H = sqdist_gradient_hull(P({0, 0}), SiteSet({P({1, 0}), P({0, 1}), P({5, 5})}));
    EXPECT_EQ(H.vertices().size(), 2u);
    EXPECT_TRUE(has_vertex(H, P({-2, 0}), 0));
    EXPECT_TRUE(has_vertex(H, P({0, -2}), 0));
}

TEST(SqdistGradientHullTest, UniqueNearestIsAnalyticGradient) {
    Rng rng(1);
    for (int t = 0; t < 50; ++t) {
        std::vector<Point> pts;
        for (int i = 0; i < 8; ++i) pts.push_back(rng.normal_vector(3));
        const SiteSet M(pts);
        const Point x = rng.normal_vector(3);
        const auto near = nearest(x, M);
        if (near.nearest.size() != 1) continue;
        const auto H = sqdist_gradient_hull(x, M);
        ASSERT_EQ(H.vertices().size(), 1u);
        EXPECT_EQ(H.vertices()[0], Point(2.0 * (x - near.nearest[0])));
    }
}

TEST(SampledClarkeHullTest, AbsoluteValueAtKink) {
    SamplingOptions opt{0.1, 200, 1e-6, 0};
    const auto H = sampled_clarke_hull([](const Point& x) { return std::abs(x[0]); }, P({0}), opt);
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& v : H.vertices()) lo = std::min(lo, v[0]), hi = std::max(hi, v[0]);
    EXPECT_LE(lo, -0.99);
    EXPECT_GE(hi, 0.99);
}

TEST(SampledClarkeHullTest, SmoothQuadraticStaysNearGradient) {
    const double r = 0.01;
    SamplingOptions opt{r, 200, 1e-6, 4};
    const auto H = sampled_clarke_hull([](const Point& x) { return x.squaredNorm(); }, P({1, 0}), opt);
    for (const auto& v : H.vertices()) EXPECT_LE((v - P({2, 0})).norm(), 2 * r + 1e-6);
}

TEST(SampledClarkeHullTest, PiecewiseLinearGradients) {
    SamplingOptions opt{0.1, 200, 1e-6, 0};
    const auto H = sampled_clarke_hull([](const Point& p) { return 2 * p[1] + std::abs(p[0]); }, P({0, 0}), opt);
    EXPECT_TRUE(has_vertex(H, P({1, 2}), 1e-2));
    EXPECT_TRUE(has_vertex(H, P({-1, 2}), 1e-2));
    for (const auto& v : H.vertices())
        EXPECT_TRUE((v - P({1, 2})).norm() < 1e-2 || (v - P({-1, 2})).norm() < 1e-2);
}

TEST(SampledClarkeHullTest, SmoothFunctionShrinksToSingleton) {
    const ScalarFn f = [](const Point& p) { return std::sin(p[0]) * std::cos(p[1]) + p[0] * p[1]; };
    double prev = INFINITY;
    for (double r : {0.1, 0.01, 0.001}) {
        SamplingOptions opt{r, 100, r * 1e-3, 9};
        const double d = sampled_clarke_hull(f, P({0.3, -0.2}), opt).diameter();
        EXPECT_LT(d, prev);
        prev = d;
    }
    EXPECT_LT(prev, 1e-2);
}

TEST(SampledClarkeHullTest, SameSeedSameHull) {
    SamplingOptions opt{0.1, 50, 1e-6, 42};
    const ScalarFn f = [](const Point& p) { return std::abs(p[0]) + std::abs(p[1]); };
    const auto a = sampled_clarke_hull(f, P({0, 0}), opt);
    const auto b = sampled_clarke_hull(f, P({0, 0}), opt);
    ASSERT_EQ(a.vertices().size(), b.vertices().size());
    for (std::size_t i = 0; i < a.vertices().size(); ++i) EXPECT_EQ(a.vertices()[i], b.vertices()[i]);
}

TEST(SampledClarkeHullTest, NonFiniteValuesThrow) {
    SamplingOptions opt{0.1, 20, 1e-6, 0};
    const ScalarFn f = [](const Point& p) { return p[0] > 0 ? INFINITY : 0.0; };
    EXPECT_THROW(sampled_clarke_hull(f, P({0}), opt), std::domain_error);
}

TEST(StarConditionTest, ConstantRightBlockHolds) {
    const LinearMapPolytope P1({row({1, 2}), row({-1, 2})}, 1, 1);
    const auto c = check_star_condition(P1);
    EXPECT_TRUE(c.holds);
    EXPECT_EQ(c.margin, 2.0);
}

TEST(StarConditionTest, SignCrossingFailsAtMidpoint) {
    const LinearMapPolytope P1({row({-1, 1}), row({-1, -1})}, 1, 1);
    const auto c = check_star_condition(P1);
    EXPECT_FALSE(c.holds);
    ASSERT_TRUE(c.witness);
    EXPECT_EQ(*c.witness, row({-1, 0}));
}

TEST(StarConditionTest, IdentityBlock) {
    const LinearMapPolytope P1({Matrix::Identity(2, 2)}, 0, 2);
    const auto c = check_star_condition(P1);
    EXPECT_TRUE(c.holds);
    EXPECT_EQ(c.margin, 1.0);
}

TEST(StarConditionTest, ShapeMismatchThrows) {
    EXPECT_THROW(LinearMapPolytope({row({1, 2, 3})}, 1, 1), std::invalid_argument);
}

TEST(StarConditionTest, ScalarAgreesWithFineSegmentSampling) {
    Rng rng(2024);
    for (int t = 0; t < 100; ++t) {
        const Matrix a = row({rng.normal(), rng.normal(), rng.normal()});
        const Matrix b = row({rng.normal(), rng.normal(), rng.normal()});
        const LinearMapPolytope P2({a, b}, 2, 1);
        const auto c = check_star_condition(P2);
        bool brute = true;
        int sign = 0;
        for (int s = 0; s <= 10000; ++s) {
            const double v = ((1 - s / 1e4) * a + (s / 1e4) * b)(0, 2);
            const int sg = v > 0 ? 1 : -1;
            if (std::abs(v) <= 1e-12 || (sign != 0 && sg != sign)) brute = false;
            sign = sg;
        }
        EXPECT_EQ(c.holds, brute) << t;
        if (!c.holds) {
            ASSERT_TRUE(c.witness);
            EXPECT_NEAR((*c.witness)(0, 2), 0.0, 1e-15);
        }
    }
}

TEST(StarConditionTest, ImpliesLiftedInvertibility) {
    Rng rng(99);
    int holds_seen = 0;
    for (int t = 0; t < 60; ++t) {
        std::vector<Matrix> vs;
        const Matrix base = Matrix::Random(2, 3);
        for (int v = 0; v < 3; ++v) {
            Matrix ell(2, 3);
            for (int i = 0; i < 6; ++i) ell(i % 2, i / 2) = base(i % 2, i / 2) + 0.3 * rng.normal();
            vs.push_back(ell);
        }
        const LinearMapPolytope P2(vs, 1, 2);
        ProbeOptions po{128, static_cast<std::uint64_t>(t), 1e-12};
        const auto star = check_star_condition(P2, po);
        const auto inv = check_clarke_invertibility(lifted_polytope(P2), po);
        EXPECT_EQ(star.samples_checked, inv.samples_checked);
        if (star.holds) {
            ++holds_seen;
            EXPECT_TRUE(inv.holds);
            EXPECT_NEAR(inv.margin, star.margin, 1e-12 * (1 + star.margin));
        }
    }
    EXPECT_GT(holds_seen, 0);
}

TEST(ClarkeInvertibilityTest, Examples) {
    const auto id = check_clarke_invertibility(LinearMapPolytope({Matrix::Identity(2, 2)}, 0, 2));
    EXPECT_TRUE(id.holds);
    EXPECT_EQ(id.margin, 1.0);

    Matrix d1 = Matrix::Identity(2, 2), d2 = Matrix::Identity(2, 2);
    d2(1, 1) = -1;
    const auto flip = check_clarke_invertibility(LinearMapPolytope({d1, d2}, 0, 2));
    EXPECT_FALSE(flip.holds);
    ASSERT_TRUE(flip.witness);
    Matrix mid = Matrix::Identity(2, 2);
    mid(1, 1) = 0;
    EXPECT_NEAR((*flip.witness - mid).norm(), 0.0, 1e-12);
}

TEST(ClarkeInvertibilityTest, ScaledIdentitiesMarginFour) {
    // Oracle: det((2t + 3(1 - t)) I) over a fine grid of t.
    double oracle = INFINITY;
    for (int s = 0; s <= 100000; ++s) {
        const double t = s / 1e5;
        oracle = std::min(oracle, std::pow(2 * t + 3 * (1 - t), 2));
    }
    const auto c = check_clarke_invertibility(LinearMapPolytope({2 * Matrix::Identity(2, 2), 3 * Matrix::Identity(2, 2)}, 0, 2));
    EXPECT_TRUE(c.holds);
    EXPECT_DOUBLE_EQ(oracle, 4.0);
    EXPECT_NEAR(c.margin, oracle, 1e-12);
}

TEST(ClarkeInvertibilityTest, NonSquareThrows) {
    EXPECT_THROW(check_clarke_invertibility(LinearMapPolytope({row({1, 2})}, 1, 1)), std::invalid_argument);
}

TEST(SeparatingDirectionTest, SegmentExamples) {
    const auto a = separating_direction(GradientHull({P({1, 0}), P({0, 1})}));
    EXPECT_NEAR((a.direction - P({1, 1}) / std::sqrt(2.0)).norm(), 0.0, 1e-12);
    EXPECT_NEAR(a.margin, std::sqrt(2.0) / 2, 1e-12);

    const auto b = separating_direction(GradientHull({P({-1, 1}), P({-1, -1})}));
    EXPECT_NEAR((b.direction - P({-1, 0})).norm(), 0.0, 1e-12);
    EXPECT_NEAR(b.margin, 1.0, 1e-12);

    EXPECT_THROW(separating_direction(GradientHull({P({-1, 0}), P({1, 0})})), std::domain_error);
}

TEST(SeparatingDirectionTest, MarginEqualsMinVertexProductAndBruteForce) {
    Rng rng(17);
    for (int d : {2, 3}) {
        int tested = 0;
        while (tested < 100) {
            std::vector<Point> vs;
            const Point shift = rng.normal_vector(d) * 2.0;
            for (int i = 0; i < 6; ++i) vs.push_back(shift + rng.normal_vector(d) * 0.7);
            const double dist = brute_min_norm(vs);
            if (dist < 1e-3) continue;
            ++tested;
            const auto s = separating_direction(GradientHull(vs));
            double min_dot = INFINITY;
            for (const auto& v : vs) min_dot = std::min(min_dot, v.dot(s.direction));
            EXPECT_NEAR(min_dot, s.margin, 1e-9);
            EXPECT_GT(min_dot, 0.0);
            EXPECT_NEAR(s.margin, dist, 1e-9);
        }
    }
}

TEST(MinNormPointTest, OriginInsideHull) {
    const Point p = min_norm_point({P({1, 0}), P({-1, 1}), P({-1, -1})});
    EXPECT_LT(p.norm(), 1e-10);
}
