#include <doctest.h>

#include "properties.hpp"

using namespace circumfeas;

namespace {

Point P(std::initializer_list<double> v) {
    Point p(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        p[i++] = x;
    return p;
}

// argmin of g over [a, b]: dense scan, then golden-section polish.
template <class G>
double argmin_1d(G g, double a, double b) {
    const int N = 20000;
    double best = a, gbest = g(a);
    for (int i = 1; i <= N; ++i) {
        const double t = a + (b - a) * i / N;
        if (g(t) < gbest) {
            gbest = g(t);
            best = t;
        }
    }
    double lo = std::max(a, best - (b - a) / N), hi = std::min(b, best + (b - a) / N);
    const double r = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 200; ++it) {
        const double m1 = hi - r * (hi - lo), m2 = lo + r * (hi - lo);
        (g(m1) < g(m2) ? hi : lo) = (g(m1) < g(m2) ? m2 : m1);
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("project examples") {
    Halfspace h(P({0, 1}), 0.0);
    CHECK((h.project(P({3, 2})) - P({3, 0})).norm() == 0.0);
    Ball b(P({0, 0}), 1.0);
    CHECK((b.project(P({3, 4})) - P({0.6, 0.8})).norm() <= 1e-15);
    DiagonalSubspace diag(1, 2);
    CHECK((diag.project(P({1, 3})) - P({2, 2})).norm() == 0.0);
}

TEST_CASE("points of the set come back unchanged") {
    Ball b(P({0, 0}), 1.0);
    const Point in = P({0.3, -0.2});
    CHECK((b.project(in) - in).norm() == 0.0);
    Box box(P({0, 0}), P({1, 1}));
    CHECK((box.project(P({0.5, 0.5})) - P({0.5, 0.5})).norm() == 0.0);
    CHECK((box.project(P({2, -1})) - P({1, 0})).norm() == 0.0);
    EpigraphRadial e(RadialFunction::power(2), 1);
    CHECK((e.project(P({1, 3})) - P({1, 3})).norm() == 0.0);
}

TEST_CASE("epigraph_radial_project examples") {
    EpigraphRadial sq(RadialFunction::power(2), 1);
    const double t = argmin_1d([](double t) { return (t - 3) * (t - 3) + std::pow(t, 4); }, 0.0, 3.0);
    const Point p = sq.project(P({3, 0}));
    CHECK(std::abs(t - 1.0) <= 1e-7);
    CHECK((p - P({t, t * t})).norm() <= 1e-7);
    CHECK((p - P({1, 1})).norm() <= 1e-14);

    EpigraphRadial shifted(RadialFunction::shifted_power(2, 1), 1);
    CHECK((shifted.project(P({0, -3})) - P({0, -1})).norm() == 0.0);
}

TEST_CASE("epigraph projection at s = 0 satisfies the stationarity equation") {
    props::Rng rng(8);
    for (int i = 0; i < 500; ++i) {
        const int n = props::dim_for(i) - 1;
        const RadialFunction phi = props::random_profile(rng);
        EpigraphRadial e(phi, n);
        Point x = Point::Zero(n + 1);
        x.head(n) = rng.unit(n) * rng.uniform(0.01, std::min(3.0, 0.9 * phi.domain_radius));
        const Point pr = e.project(x);
        const Point u = pr.head(n);
        const double r = u.norm();
        // u + f(u) grad f(u) = x, grad f(u) = phi'(r) u / r
        const Point resid = u + phi.phi(r) * phi.dphi(r) * u / r - x.head(n);
        CHECK(resid.norm() <= 1e-9 * (1 + x.norm()));
        CHECK(std::abs(pr[n] - phi.phi(r)) <= 1e-15 * (1 + pr[n]));
    }
}

TEST_CASE("epigraph_smooth_project examples") {
    EpigraphSmooth radial_sq(SmoothFunction::diagonal_quadratic({1, 1}), 2);
    CHECK((radial_sq.project(P({3, 0, 0})) - P({1, 0, 1})).norm() <= 1e-9);

    EpigraphSmooth aniso(SmoothFunction::diagonal_quadratic({1, 4}), 2);
    const double t = argmin_1d([](double t) { return (t - 1) * (t - 1) + 16 * std::pow(t, 4); }, 0.0, 1.0);
    CHECK((aniso.project(P({0, 1, 0})) - P({0, t, 4 * t * t})).norm() <= 1e-7);

    const Point inside = P({0.1, 0.1, 5});
    CHECK((aniso.project(inside) - inside).norm() == 0.0);
}

TEST_CASE("radial and smooth epigraph projections agree") {
    props::Rng rng(9);
    for (int i = 0; i < 300; ++i) {
        const int n = props::dim_for(i) - 1;
        const RadialFunction phi = RadialFunction::power(rng.integer(0, 1) ? 2.0 : 4.0);
        EpigraphRadial er(phi, n);
        EpigraphSmooth es(SmoothFunction::radial(phi), n);
        Point p = rng.gauss(n + 1);
        p[n] = rng.uniform(-1.0, 0.5);
        CHECK((er.project(p) - es.project(p)).norm() <= 1e-9);
    }
}

TEST_CASE("contains examples") {
    CHECK(Ball(P({0, 0}), 1.0).contains(P({0, 0.5}), 0.0));
    CHECK(Halfspace(P({0, 1}), 0.0).contains(P({0, 1e-13}), 1e-12));
    CHECK_FALSE(EpigraphRadial(RadialFunction::power(2), 1).contains(P({1, 0.5}), 1e-12));
}

TEST_CASE("product_lift examples") {
    std::vector<SetPtr> sets{std::make_shared<Halfspace>(P({1, 0}), 0.0),
                             std::make_shared<Halfspace>(P({0, 1}), 1.0)};
    auto [K, U] = product_lift(sets);
    CHECK(K->dim() == 4);
    CHECK(U->block_dim() == 2);
    CHECK(U->blocks() == 2);
    CHECK(U->is_affine());

    const Point p1 = P({2, 3}), p2 = P({-1, 4});
    Point lifted(4);
    lifted << p1, p2;
    Point expect(4);
    expect << sets[0]->project(p1), sets[1]->project(p2);
    CHECK((K->project(lifted) - expect).norm() == 0.0);
    Point avg(4);
    avg << (p1 + p2) / 2, (p1 + p2) / 2;
    CHECK((U->project(lifted) - avg).norm() == 0.0);

    CHECK_THROWS_AS(product_lift({sets[0]}), InvalidArgument);
    CHECK_THROWS_AS(product_lift({sets[0], std::make_shared<Ball>(P({0, 0, 0}), 1.0)}), InvalidArgument);
}

TEST_CASE("every kind: idempotence, firm inequality, nonexpansiveness") {
    props::Rng rng(10);
    for (int i = 0; i < 1200; ++i) {
        const int d = props::dim_for(i);
        const SetPtr s = props::random_set(rng, d);
        const Point p = props::random_point(rng, *s), q = props::random_point(rng, *s);
        const Point pp = s->project(p), pq = s->project(q);
        CHECK((s->project(pp) - pp).norm() <= 1e-10);
        CHECK((p - pp).dot(pq - pp) <= 1e-9);
        CHECK((pp - pq).norm() <= (p - q).norm() + 1e-10);
        // displacement agrees with p - project(p)
        CHECK((s->displacement(p) - (p - pp)).norm() <= 1e-12 * (1 + p.norm()));
    }
}

TEST_CASE("builtin profiles parse and validate") {
    CHECK(RadialFunction::parse("power(3)").phi(2.0) == doctest::Approx(8.0));
    CHECK(RadialFunction::parse("ballcap").phi(0.6) == doctest::Approx(0.2));
    CHECK(RadialFunction::parse("shifted_power(2,1)").phi(0.0) == -1.0);
    CHECK(RadialFunction::parse("shifted_cosh(2)").phi(0.0) == -1.0);
    CHECK(std::isinf(RadialFunction::parse("flat").phi(0.6)));
    CHECK_THROWS_AS(RadialFunction::parse("power(0.5)"), InvalidArgument);
    CHECK_THROWS_AS(RadialFunction::parse("sine(1)"), InvalidArgument);
    CHECK(RadialFunction::power(4).spot_check_convex(500, 1));
    CHECK(SmoothFunction::parse("quadratic(1,4)").f(P({1, 1})) == 5.0);
}

TEST_CASE("near-tangential displacement keeps relative accuracy") {
    // (x, 0) with phi = t^4: the exact displacement is about 4 r^7 in the
    // first coordinate, far below the rounding of x itself
    EpigraphRadial e(RadialFunction::power(4), 1);
    const double x = 1e-3;
    const Point d = e.displacement(P({x, 0}));
    // r + r^4 * 4 r^3 = x  =>  r ~ x - 4 x^7
    const double r = x - 4 * std::pow(x, 7);
    CHECK(std::abs(d[0] - 4 * std::pow(r, 7)) <= 1e-6 * 4 * std::pow(r, 7));
    CHECK(std::abs(d[1] + std::pow(r, 4)) <= 1e-12 * std::pow(r, 4));
}

TEST_CASE("dimension mismatch is rejected") {
    Ball b(P({0, 0}), 1.0);
    CHECK_THROWS_AS(b.project(P({1, 2, 3})), InvalidArgument);
    CHECK_THROWS_AS(Ball(P({0, 0}), -1.0), InvalidArgument);
    CHECK_THROWS_AS(Halfspace(P({0, 0}), 1.0), InvalidArgument);
}
