#include <doctest.h>

#include "properties.hpp"

#include <numbers>

using namespace circumfeas;

namespace {

Point P(std::initializer_list<double> v) {
    Point p(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        p[i++] = x;
    return p;
}

SetPtr xaxis() { return std::make_shared<AffineSet>(AffineManifold::coordinate(Point::Zero(2), {0})); }

SetPtr line_at(double deg) {
    const double a = deg * std::numbers::pi / 180;
    return std::make_shared<AffineSet>(AffineManifold(Point::Zero(2), {P({std::cos(a), std::sin(a)})}));
}

Problem two_lines(double deg) { return {line_at(deg), xaxis(), Point::Zero(2), "two lines"}; }

Problem parabola() {
    return {std::make_shared<EpigraphRadial>(RadialFunction::power(2), 1), xaxis(), Point::Zero(2), "parabola"};
}

// Circumcenter from the two equidistance equations solved by Cramer's rule.
Point circumcenter_cramer(const Point &x, const Point &y, const Point &z) {
    const Point a = y - x, b = z - x;
    const double g11 = a.dot(a), g12 = a.dot(b), g22 = b.dot(b);
    const double det = g11 * g22 - g12 * g12;
    const double al = (0.5 * g11 * g22 - 0.5 * g22 * g12) / det;
    const double be = (0.5 * g22 * g11 - 0.5 * g11 * g12) / det;
    return x + al * a + be * b;
}

} // namespace

TEST_CASE("reflect examples") {
    CHECK((reflect(*xaxis(), P({3, 2})) - P({3, -2})).norm() == 0.0);
    CHECK((reflect(Ball(P({0, 0}), 1.0), P({0.2, 0.1})) - P({0.2, 0.1})).norm() == 0.0);
    CHECK(reflect(Ball(P({0, 0}), 1.0), P({2, 0})).norm() <= 1e-15);
}

TEST_CASE("map_step examples") {
    CHECK((map_step(parabola(), P({3, 0})) - P({1, 0})).norm() <= 1e-14);
    CHECK(map_step(parabola(), P({0, 0})).norm() == 0.0);
    // explicit trigonometry: project (1,0) onto the 30 degree line, then back
    const double c = std::cos(std::numbers::pi / 6);
    const Point onto = c * P({c, std::sin(std::numbers::pi / 6)});
    const Point t = map_step(two_lines(30), P({1, 0}));
    CHECK(std::abs(t[0] - onto[0]) <= 1e-15);
    CHECK(std::abs(t.norm() - 0.75) <= 1e-15);
}

TEST_CASE("crm_step examples") {
    const Problem par = parabola();
    const Point p = P({3, 0});
    const Point a = reflect(*par.K, p);
    const Point b = reflect(*par.U, a);
    const Point oracle = circumcenter_cramer(p, a, b);
    const Point c = crm_step(par, p);
    CHECK(std::abs(oracle[0] - 0.5) <= 1e-12);
    CHECK((c - P({0.5, 0})).norm() <= 1e-14);

    for (double deg : {10.0, 30.0, 60.0, 85.0}) {
        for (double x : {1.0, -2.5, 1e-3}) {
            const auto s = crm_step_detailed(two_lines(deg), P({x, 0}));
            CHECK(s.outcome == CrmStep::Outcome::regular);
            CHECK(s.point.norm() <= 1e-12);
        }
    }
    const auto fixed = crm_step_detailed(parabola(), P({0, 0}));
    CHECK(fixed.outcome == CrmStep::Outcome::fixed_point);
    CHECK(fixed.point.norm() == 0.0);
}

TEST_CASE("crm_step requires an affine U") {
    Problem bad{std::make_shared<Ball>(P({0, 1}), 1.0), std::make_shared<Ball>(P({0, -1}), 1.0), {}, "balls"};
    CHECK_THROWS_AS(crm_step(bad, P({1, 0})), InvalidProblem);
    CHECK_THROWS_AS(run(Method::CRM, bad, P({1, 0})), InvalidProblem);
}

TEST_CASE("sepm_step and sipm_step examples") {
    const SetPtr h = std::make_shared<Halfspace>(P({1, 1}), 1.0);
    CHECK((sepm_step({h}, P({3, 3})) - h->project(P({3, 3}))).norm() == 0.0);
    CHECK((sipm_step({h}, P({3, 3})) - h->project(P({3, 3}))).norm() == 0.0);

    std::vector<SetPtr> quad{std::make_shared<Halfspace>(P({-1, 0}), 0.0),
                             std::make_shared<Halfspace>(P({0, -1}), 0.0)};
    CHECK(sepm_step(quad, P({-1, -1})).norm() == 0.0);

    std::vector<SetPtr> strip{std::make_shared<Halfspace>(P({0, 1}), 0.0),
                              std::make_shared<Halfspace>(P({0, -1}), -2.0)};
    CHECK((sipm_step(strip, P({0, 1})) - P({0, 1})).norm() == 0.0);

    // order matters for two non-orthogonal lines: explicit projection formulas
    const SetPtr A = line_at(0), B = line_at(45);
    const Point p = P({0, 2});
    const double s = std::sqrt(0.5);
    const Point ab = P({1, 0}) * (P({s, s}).dot(p) * s); // P_A(P_B p)
    const Point ba = P({s, s}) * s * 0.0;                 // P_B(P_A p) with P_A p = 0
    CHECK((sepm_step({B, A}, p) - ab).norm() <= 1e-15);
    CHECK((sepm_step({A, B}, p) - ba).norm() <= 1e-15);
    CHECK((sepm_step({A, B}, p) - sepm_step({B, A}, p)).norm() > 0.5);
}

TEST_CASE("run: two lines") {
    const Problem tl = two_lines(30);
    const Trace map = run(Method::MAP, tl, P({1, 0}));
    REQUIRE(map.dist_to_solution.size() == map.size());
    for (std::size_t k = 0; k < std::min<std::size_t>(map.size(), 60); ++k)
        CHECK(std::abs(map.dist_to_solution[k] - std::pow(0.75, k)) <= 1e-9 * std::pow(0.75, k));
    CHECK(map.dist_to_K.size() == map.size());

    const Trace crm = run(Method::CRM, tl, P({1, 0}));
    CHECK(crm.stop_reason == StopReason::tol_reached);
    CHECK(crm.size() == 2);
    CHECK(crm.last().norm() <= 1e-12);
}

TEST_CASE("run from a point of K cap U stops at k = 0") {
    for (Method m : {Method::MAP, Method::CRM}) {
        const Trace tr = run(m, parabola(), P({0, 0}));
        CHECK(tr.stop_reason == StopReason::fixed_point);
        CHECK(tr.size() == 1);
    }
}

TEST_CASE("CRM projects x0 onto U first") {
    const Trace tr = run(Method::CRM, parabola(), P({3, 5}));
    CHECK((tr.iterates[0] - P({3, 0})).norm() == 0.0);
}

TEST_CASE("run rejects bad input") {
    CHECK_THROWS_AS(run(Method::MAP, parabola(), P({NAN, 0})), InvalidArgument);
    CHECK_THROWS_AS(run(Method::MAP, parabola(), P({1, 0, 0})), InvalidArgument);
    CHECK_THROWS_AS(run(Method::SePM, parabola(), P({1, 0})), InvalidArgument);
    StopRule bad;
    bad.tol_abs = 0;
    CHECK_THROWS_AS(run(Method::MAP, parabola(), P({1, 0}), bad), InvalidArgument);
    Problem wrong = parabola();
    wrong.known_solution = P({1, 0});
    CHECK_THROWS_AS(run(Method::MAP, wrong, P({1, 0})), InvalidProblem);
}

TEST_CASE("non-finite iterate raises NumericalFailure with the iteration") {
    struct Blowup final : SetOracle {
        SetKind kind() const override { return SetKind::halfspace; }
        int dim() const override { return 2; }

      protected:
        Point project_impl(const Point &p) const override { return p * 1e300; }
    };
    Problem P2{std::make_shared<Blowup>(), xaxis(), std::nullopt, "blowup"};
    try {
        run(Method::MAP, P2, P({1, 0}));
        FAIL("expected NumericalFailure");
    } catch (const NumericalFailure &e) {
        CHECK(e.iteration() == 2);
    }
}

TEST_CASE("product_crm_run examples") {
    const SetPtr h = std::make_shared<Halfspace>(P({1, 2}), 1.0);
    const Point x0 = P({4, 5});
    StopRule stop;
    stop.tol_abs = 1e-10;
    const Trace tr = product_crm_run({h, h}, x0, stop);
    CHECK(tr.size() <= 3);
    CHECK((tr.last() - h->project(x0)).norm() <= 1e-10);

    std::vector<SetPtr> tri{std::make_shared<Halfspace>(P({0, -1}), 1.0),
                            std::make_shared<Halfspace>(P({1, 1}), 1.0),
                            std::make_shared<Halfspace>(P({-1, 1}), 1.0)};
    const Trace t3 = product_crm_run(tri, P({50, -80}));
    CHECK(t3.stop_reason == StopReason::tol_reached);
    for (const auto &s : tri)
        CHECK(s->distance(t3.last()) <= 1e-10);

    CHECK_THROWS_AS(product_crm_run({h}, x0), InvalidArgument);
}

TEST_CASE("SePM, SiPM and product CRM on three halfspaces") {
    std::vector<SetPtr> tri{std::make_shared<Halfspace>(P({0, -1}), 1.0),
                            std::make_shared<Halfspace>(P({1, 1}), 1.0),
                            std::make_shared<Halfspace>(P({-1, 1}), 1.0)};
    for (Method m : {Method::SePM, Method::SiPM, Method::ProductCRM}) {
        const Trace tr = run(m, tri, P({20, 30}));
        CHECK(tr.method == m);
        CHECK(tr.dist_to_K.back() <= 1e-9);
    }
}

TEST_CASE("CRM stays in U and respects the contraction bound on family 1") {
    props::Rng rng(31);
    for (int i = 0; i < 1000; ++i) {
        const int d = props::dim_for(i);
        const int n = d - 1;
        const RadialFunction phi = props::random_profile(rng);
        std::vector<int> axes(n);
        for (int j = 0; j < n; ++j)
            axes[j] = j;
        const Problem pr{std::make_shared<EpigraphRadial>(phi, n),
                         std::make_shared<AffineSet>(AffineManifold::coordinate(Point::Zero(d), axes)),
                         Point::Zero(d), "f1"};
        Point x = Point::Zero(d);
        x.head(n) = rng.unit(n) * rng.uniform(0.05, std::min(3.0, 0.9 * phi.domain_radius));
        const Point v = crm_step(pr, x);
        const Point u = map_step(pr, x);
        CHECK(pr.U->distance(v) <= 1e-10);
        const double r = u.norm();
        const double g = phi.phi(r) / (r * std::abs(phi.dphi(r)));
        CHECK((v.norm() / r) * (v.norm() / r) <= 1 - g * g + 1e-8);
    }
}

TEST_CASE("property suites: Fejer, dominance, collinearity, Pierra, radial ratio") {
    const int N = 1000;
    CHECK(props::fejer_suite(N, 41).worst <= 1e-10);
    CHECK(props::dominance_suite(N, 42).worst <= 1e-10);
    CHECK(props::collinearity_suite(N, 43).worst <= 1e-9);
    CHECK(props::pierra_suite(N, 44).worst <= 1e-12);
    CHECK(props::radial_ratio_suite(N, 45).worst <= 1e-8);
    CHECK(props::firm_projection_suite(N, 46).worst <= 1e-9);
}

TEST_CASE("runs are deterministic") {
    const Trace a = run(Method::CRM, parabola(), P({3, 0}));
    const Trace b = run(Method::CRM, parabola(), P({3, 0}));
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        CHECK((a.iterates[k].array() == b.iterates[k].array()).all());
}
