#include <doctest.h>

#include "properties.hpp"

#include <Eigen/LU>

using namespace circumfeas;

namespace {

Point P(std::initializer_list<double> v) {
    Point p(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        p[i++] = x;
    return p;
}

// Circumcenter through the general 2x2 normal equations, solved by LU.
Point circumcenter_oracle(const Point &x, const Point &y, const Point &z) {
    const Point a = y - x, b = z - x;
    Eigen::Matrix2d G;
    G << a.dot(a), a.dot(b), a.dot(b), b.dot(b);
    const Eigen::Vector2d rhs(0.5 * a.dot(a), 0.5 * b.dot(b));
    const Eigen::Vector2d ab = G.fullPivLu().solve(rhs);
    return x + ab[0] * a + ab[1] * b;
}

} // namespace

TEST_CASE("affine_project examples") {
    const AffineManifold xaxis(P({0, 0}), {P({1, 0})});
    CHECK((affine_project(xaxis, P({3, 2})) - P({3, 0})).norm() == 0.0);
    CHECK((affine_project(xaxis, P({-4, 0})) - P({-4, 0})).norm() == 0.0);

    const auto plane = AffineManifold::coordinate(Point::Zero(3), {0, 1});
    CHECK((affine_project(plane, P({1, 2, 5})) - P({1, 2, 0})).norm() == 0.0);

    CHECK_THROWS_AS(affine_project(xaxis, P({1, 2, 3})), InvalidArgument);
}

TEST_CASE("affine manifold basis is orthonormal and drops dependent directions") {
    const AffineManifold m(P({1, 2, 3}), {P({1, 1, 0}), P({2, 2, 0}), P({0, 1, 1})});
    REQUIRE(m.dim() == 2);
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j)
            CHECK(std::abs(m.basis()[i].dot(m.basis()[j]) - (i == j)) <= 1e-12);

    const auto h = AffineManifold::hyperplane(P({0, 0, 2}), 4.0);
    CHECK(h.dim() == 2);
    CHECK((affine_project(h, P({1, 1, 7})) - P({1, 1, 2})).norm() <= 1e-15);
}

TEST_CASE("affine_project is idempotent and nonexpansive") {
    props::Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const int d = props::dim_for(i);
        std::vector<Point> dirs;
        for (int k = rng.integer(0, d); k > 0; --k)
            dirs.push_back(rng.gauss(d));
        const AffineManifold m(rng.gauss(d), dirs);
        const Point p = rng.gauss(d), q = rng.gauss(d);
        const Point pp = affine_project(m, p);
        CHECK((affine_project(m, pp) - pp).norm() <= 1e-12 * (1 + pp.norm()));
        CHECK((pp - affine_project(m, q)).norm() <= (p - q).norm() + 1e-12);
    }
}

TEST_CASE("circumcenter3 examples") {
    CHECK((circumcenter3(P({0, 0}), P({2, 0}), P({0, 2})) - P({1, 1})).norm() <= 1e-15);
    CHECK(circumcenter3(P({1, 0}), P({-1, 0}), P({0, 1})).norm() <= 1e-15);
    CHECK_THROWS_AS(circumcenter3(P({0, 0}), P({1, 1}), P({2, 2})), DegenerateCircumcenter);
    CHECK((circumcenter3(P({5, 5}), P({5, 5}), P({5, 5})) - P({5, 5})).norm() == 0.0);
}

TEST_CASE("circumcenter3 cardinality two returns the midpoint") {
    const Point a = P({1, 2}), b = P({3, -2});
    CHECK((circumcenter3(a, a, b) - P({2, 0})).norm() <= 1e-15);
    CHECK((circumcenter3(a, b, a) - P({2, 0})).norm() <= 1e-15);
    CHECK((circumcenter3(b, a, a) - P({2, 0})).norm() <= 1e-15);
}

TEST_CASE("circumcenter3 matches the normal-equation oracle and is permutation invariant") {
    props::Rng rng(5);
    int checked = 0;
    while (checked < 1000) {
        const int d = props::dim_for(checked);
        const Point x = rng.gauss(d), y = rng.gauss(d), z = rng.gauss(d);
        if (collinear(x, y, z, 1e-8))
            continue;
        ++checked;
        const Point c = circumcenter3(x, y, z);
        const double scale = 1 + c.norm();
        CHECK((c - circumcenter_oracle(x, y, z)).norm() <= 1e-9 * scale);
        CHECK((c - circumcenter3(y, z, x)).norm() <= 1e-9 * scale);
        CHECK((c - circumcenter3(z, y, x)).norm() <= 1e-9 * scale);
        CHECK((c - circumcenter3(x, z, y)).norm() <= 1e-9 * scale);
    }
}

TEST_CASE("circumcenter equidistance and affine hull residuals") {
    const auto res = props::circumcenter_suite(1000, 21);
    CHECK(res.cases == 1000);
    CHECK(res.worst <= 1e-10);
}

TEST_CASE("circumcenter of a very thin triangle keeps relative accuracy") {
    // x, x + a, x + b with b nearly parallel to a; exact offset known
    const double eps = 1e-7;
    const Point a = P({2, 0});
    const Point b = P({1, eps});
    const Point c = circumcenter_offset(a, b, {0.0, 0.0});
    // equidistance: c_x = 1, and |c|^2 = |c - b|^2 gives c_y = (b.b - 2 c_x) / (2 eps)
    const double cy = (1 + eps * eps - 2.0) / (2 * eps);
    CHECK(std::abs(c[0] - 1.0) <= 1e-9);
    CHECK(std::abs(c[1] - cy) <= 1e-9 * std::abs(cy));
}

TEST_CASE("collinear examples") {
    CHECK(collinear(P({0, 0}), P({1, 0}), P({2, 0}), 1e-12));
    CHECK_FALSE(collinear(P({0, 0}), P({1, 0}), P({0, 1}), 1e-12));
    CHECK(collinear(P({1, 1}), P({1, 1}), P({0, 3}), 1e-12));
}

TEST_CASE("non-finite input is rejected") {
    CHECK_THROWS_AS(circumcenter3(P({0, NAN}), P({1, 0}), P({0, 1})), InvalidArgument);
    CHECK_THROWS_AS(circumcenter3(P({0, 0}), P({1, 0, 0}), P({0, 1})), InvalidArgument);
}
