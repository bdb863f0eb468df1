#include <doctest.h>

#include "circumfeas/errors.hpp"
#include "circumfeas/experiments.hpp"

using namespace circumfeas;

namespace {

InstanceSpec spec(Family fam, std::map<std::string, double> params = {}, std::string phi = {}) {
    InstanceSpec s;
    s.family = fam;
    s.parameters = std::move(params);
    s.phi = std::move(phi);
    return s;
}

const Verdict *find(const ComparisonReport &r, const std::string &name) {
    for (const auto &v : r.verdicts)
        if (v.name == name)
            return &v;
    return nullptr;
}

} // namespace

TEST_CASE("build_instance: family 2 default") {
    const Instance inst = build_instance(spec(Family::family2_radial));
    REQUIRE(inst.meta.phi);
    CHECK(family2_root(*inst.meta.phi) == doctest::Approx(1.0));
    REQUIRE(inst.ray_solution);
    CHECK(inst.ray_solution->norm() == doctest::Approx(1.0));
    CHECK(inst.map_prediction == RateClass::linear);
    CHECK(inst.crm_prediction == RateClass::superlinear);
    for (const auto &w : inst.witnesses) {
        CHECK(inst.problem.K->contains(w, 1e-9));
        CHECK(inst.problem.U->contains(w, 1e-9));
    }
}

TEST_CASE("build_instance: assumption failures are named") {
    try {
        build_instance(spec(Family::family1_radial, {}, "shifted_power(2,1)"));
        FAIL("expected InvalidInstance");
    } catch (const InvalidInstance &e) {
        CHECK(std::string(e.what()).find("phi(0) = 0") != std::string::npos);
    }
    CHECK_THROWS_AS(build_instance(spec(Family::family2_radial, {}, "power(2)")), InvalidInstance);
    CHECK_THROWS_AS(build_instance(spec(Family::product_m_sets, {{"n", 3}, {"m", 2}})), InvalidInstance);
    InstanceSpec bad = spec(Family::family1_smooth);
    bad.f = "quadratic(1,-1)";
    CHECK_THROWS_AS(build_instance(bad), InvalidInstance);
    InstanceSpec x0 = spec(Family::two_lines);
    x0.x0 = std::vector<double>{1, 0, 0};
    CHECK_THROWS_AS(build_instance(x0), InvalidInstance);
}

TEST_CASE("build_instance: two lines and product sets") {
    const Instance tl = build_instance(spec(Family::two_lines, {{"theta", 30}}));
    CHECK(*tl.meta.omega == doctest::Approx(0.5));
    const Instance pm = build_instance(spec(Family::product_m_sets, {{"n", 2}, {"m", 4}}));
    CHECK(pm.sets.size() == 4);
    CHECK(pm.problem.dim() == 8);
}

TEST_CASE("run_comparison: family 1 power(4)") {
    const auto rep = run_comparison(spec(Family::family1_radial, {}, "power(4)"));
    REQUIRE(rep.crm.report);
    CHECK(rep.crm.report->q_hat == doctest::Approx(0.75).epsilon(0.03));
    CHECK(rep.fejer_violation <= 1e-10);
    REQUIRE(rep.dominance_violation);
    CHECK(*rep.dominance_violation <= 1e-10);
    CHECK(rep.passed());
    CHECK(find(rep, "crm_classification"));
}

TEST_CASE("run_comparison: two lines at 30 degrees") {
    InstanceSpec s = spec(Family::two_lines, {{"theta", 30}});
    s.x0 = std::vector<double>{1, 0};
    const auto rep = run_comparison(s);
    REQUIRE(rep.map.report);
    CHECK(rep.map.report->q_hat == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(rep.crm.finite_termination);
    CHECK(rep.passed());
}

TEST_CASE("run_comparison: family 2 t^2 - 1") {
    InstanceSpec s = spec(Family::family2_radial, {{"x0_scale", 10}});
    const auto rep = run_comparison(s);
    REQUIRE(rep.map.report);
    CHECK(rep.map.report->q_hat == doctest::Approx(0.2).epsilon(0.05));
    REQUIRE(rep.crm.report);
    CHECK(rep.crm.report->classification == RateClass::superlinear);
    const Verdict *v = find(rep, "map_family2_constant");
    REQUIRE(v);
    CHECK(v->pass);
}

TEST_CASE("run_comparison: product sets") {
    const auto rep = run_comparison(spec(Family::product_m_sets));
    CHECK(rep.map.trace.method == Method::SiPM);
    CHECK(rep.crm.trace.method == Method::ProductCRM);
    CHECK(rep.passed());
}

TEST_CASE("conjecture_probe is exploratory") {
    const auto rep = conjecture_probe(spec(Family::conjecture_probe, {{"height", 0.5}}));
    CHECK(rep.exploratory);
    CHECK(rep.passed());
    CHECK(rep.fejer_violation <= 1e-10);
}

TEST_CASE("analyse_trace on a short converged trace") {
    Trace tr;
    tr.iterates = {Point{{1.0, 0.0}}, Point{{0.1, 0.0}}, Point{{1e-4, 0.0}}, Point{{0.0, 0.0}}};
    const MethodResult r = analyse_trace(tr, Point::Zero(2));
    REQUIRE(r.report);
    CHECK(r.report->q_tail.size() == 2);
    CHECK_FALSE(r.finite_termination);
}

TEST_CASE("comparisons are deterministic") {
    const auto a = run_comparison(spec(Family::ball_tangent, {{"n", 3}}));
    const auto b = run_comparison(spec(Family::ball_tangent, {{"n", 3}}));
    REQUIRE(a.crm.trace.size() == b.crm.trace.size());
    CHECK((a.crm.trace.last().array() == b.crm.trace.last().array()).all());
    CHECK(a.crm.report->q_hat == b.crm.report->q_hat);
}
