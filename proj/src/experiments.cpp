#include "circumfeas/experiments.hpp"

#include "circumfeas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace circumfeas {

double InstanceSpec::param(const std::string &name, double fallback) const {
    const auto it = parameters.find(name);
    return it == parameters.end() ? fallback : it->second;
}

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

int int_param(const InstanceSpec &spec, const std::string &name, int fallback, int lo) {
    const double v = spec.param(name, fallback);
    if (!(v >= lo) || v != std::floor(v) || v > 1e6)
        throw InvalidInstance("parameter '" + name + "' must be an integer >= " + std::to_string(lo));
    return static_cast<int>(v);
}

Point start_point(const InstanceSpec &spec, int dim, double default_scale) {
    if (spec.x0) {
        if (static_cast<int>(spec.x0->size()) != dim)
            throw InvalidInstance("x0 has " + std::to_string(spec.x0->size()) +
                                  " coordinates, the instance lives in R^" + std::to_string(dim));
        Point x = Eigen::Map<const Point>(spec.x0->data(), dim);
        if (!x.allFinite())
            throw InvalidInstance("x0 must be finite");
        return x;
    }
    Point x = Point::Zero(dim);
    x[0] = spec.param("x0_scale", default_scale);
    if (!std::isfinite(x[0]))
        throw InvalidInstance("x0_scale must be finite");
    return x;
}

SetPtr base_hyperplane(int n) {
    std::vector<int> axes(n);
    for (int i = 0; i < n; ++i)
        axes[i] = i;
    return std::make_shared<AffineSet>(AffineManifold::coordinate(Point::Zero(n + 1), axes));
}

void check_convex(const RadialFunction &phi, unsigned long long seed) {
    if (!phi.spot_check_convex(400, seed))
        throw InvalidInstance("profile " + phi.name + " fails the convexity spot check");
}

RadialFunction family1_profile(const InstanceSpec &spec) {
    RadialFunction phi = !spec.phi.empty() ? RadialFunction::parse(spec.phi)
                         : spec.family == Family::flat
                             ? RadialFunction::flat()
                             : RadialFunction::power(spec.param("alpha", 2.0));
    const double v0 = phi.phi(0.0);
    if (!(std::abs(v0) <= 1e-12))
        throw InvalidInstance("family 1 requires phi(0) = 0 (f(0) = 0); " + phi.name +
                              " has phi(0) = " + num(v0));
    const double d0 = phi.dphi(0.0);
    if (!(std::abs(d0) <= 1e-12))
        throw InvalidInstance("family 1 requires phi'(0) = 0 (grad f(0) = 0); " + phi.name +
                              " has phi'(0) = " + num(d0));
    for (double t : {1e-3, 1e-2, 0.1}) {
        if (t >= phi.domain_radius)
            break;
        if (!(phi.phi(t) > 0.0) && !phi.ratio)
            throw InvalidInstance("family 1 requires 0 to be the unique minimizer; " + phi.name +
                                  " vanishes at t = " + num(t));
    }
    check_convex(phi, static_cast<unsigned long long>(spec.param("seed", 1)));
    return phi;
}

RadialFunction family2_profile(const InstanceSpec &spec) {
    RadialFunction phi = !spec.phi.empty()
                             ? RadialFunction::parse(spec.phi)
                             : RadialFunction::shifted_power(spec.param("alpha", 2.0), spec.param("c", 1.0));
    const double v0 = phi.phi(0.0);
    if (!(v0 < 0.0))
        throw InvalidInstance("family 2 requires phi(0) < 0; " + phi.name + " has phi(0) = " + num(v0));
    const double d0 = phi.dphi(0.0);
    if (!(std::abs(d0) <= 1e-12))
        throw InvalidInstance("family 2 requires phi'(0) = 0; " + phi.name + " has phi'(0) = " + num(d0));
    check_convex(phi, static_cast<unsigned long long>(spec.param("seed", 1)));
    return phi;
}

std::vector<double> quadratic_weights(const std::string &f) {
    const auto open = f.find('(');
    const auto close = f.rfind(')');
    if (f.rfind("quadratic", 0) != 0 || open == std::string::npos || close == std::string::npos ||
        close < open)
        throw InvalidInstance("family1_smooth needs f = quadratic(w1,...,wn), got '" + f + "'");
    std::vector<double> w;
    std::stringstream ss(f.substr(open + 1, close - open - 1));
    std::string item;
    while (std::getline(ss, item, ','))
        w.push_back(std::stod(item));
    return w;
}

} // namespace

Instance build_instance(const InstanceSpec &spec) {
    spec.stop.validate();
    Instance inst;
    inst.family = spec.family;
    inst.meta.family = spec.family;
    auto &P = inst.problem;
    P.label = spec.label.empty() ? to_string(spec.family) : spec.label;

    switch (spec.family) {
    case Family::family1_radial:
    case Family::flat: {
        const int n = int_param(spec, "n", 1, 1);
        RadialFunction phi = family1_profile(spec);
        const bool bounded = std::isfinite(phi.domain_radius);
        const double scale = spec.family == Family::flat ? 0.5 : bounded ? 0.9 * phi.domain_radius : 3.0;
        P.K = std::make_shared<EpigraphRadial>(phi, n);
        P.U = base_hyperplane(n);
        P.known_solution = Point::Zero(n + 1);
        inst.x0 = start_point(spec, n + 1, scale);
        inst.meta.phi = phi;
        inst.meta.n = n;
        inst.map_prediction = RateClass::sublinear;
        inst.crm_prediction = spec.family == Family::flat || gamma_hat(phi) == 0.0 ? RateClass::sublinear
                                                                                : RateClass::linear;
        break;
    }
    case Family::ball_tangent: {
        const int n = int_param(spec, "n", 1, 1);
        Point c = Point::Zero(n + 1);
        c[n] = 1.0;
        P.K = std::make_shared<Ball>(c, 1.0);
        P.U = base_hyperplane(n);
        P.known_solution = Point::Zero(n + 1);
        inst.x0 = start_point(spec, n + 1, 0.9);
        inst.meta.phi = RadialFunction::ballcap();
        inst.meta.n = n;
        inst.map_prediction = RateClass::sublinear;
        inst.crm_prediction = RateClass::linear;
        break;
    }
    case Family::family1_smooth: {
        const std::string fs = spec.f.empty() ? "quadratic(1,4)" : spec.f;
        const auto w = quadratic_weights(fs);
        if (w.empty())
            throw InvalidInstance("family1_smooth: quadratic needs at least one weight");
        for (double wi : w)
            if (!(wi > 0.0))
                throw InvalidInstance("family 1 requires 0 to be the unique minimizer; quadratic "
                                      "weights must be positive");
        const int n = static_cast<int>(w.size());
        SmoothFunction fn = SmoothFunction::parse(fs);
        const Point zero = Point::Zero(n);
        if (!(std::abs(fn.f(zero)) <= 1e-12) || !(fn.grad(zero).norm() <= 1e-12))
            throw InvalidInstance("family 1 requires f(0) = 0 and grad f(0) = 0");
        if (!fn.spot_check_convex(n, 400, 3.0, static_cast<unsigned long long>(spec.param("seed", 1))))
            throw InvalidInstance(fn.name + " fails the convexity spot check");
        P.K = std::make_shared<EpigraphSmooth>(fn, n);
        P.U = base_hyperplane(n);
        P.known_solution = Point::Zero(n + 1);
        inst.x0 = start_point(spec, n + 1, 3.0);
        inst.meta.f = fn;
        inst.meta.n = n;
        const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
        inst.meta.hessian_eigen_range = std::make_pair(2.0 * *lo, 2.0 * *hi);
        inst.map_prediction = RateClass::sublinear;
        inst.crm_prediction = RateClass::linear;
        break;
    }
    case Family::family2_radial: {
        const int n = int_param(spec, "n", 1, 1);
        RadialFunction phi = family2_profile(spec);
        P.K = std::make_shared<EpigraphRadial>(phi, n);
        P.U = base_hyperplane(n);
        inst.x0 = start_point(spec, n + 1, 3.0);
        inst.meta.phi = phi;
        inst.meta.n = n;
        const double ts = family2_root(phi);
        const Point x = inst.x0.head(n);
        if (std::abs(inst.x0[n]) == 0.0 && x.norm() > 0.0) {
            Point ray = Point::Zero(n + 1);
            ray.head(n) = ts * x / x.norm();
            inst.ray_solution = ray;
            inst.witnesses.push_back(ray);
        }
        inst.witnesses.push_back(Point::Zero(n + 1));
        inst.map_prediction = RateClass::linear;
        inst.crm_prediction = RateClass::superlinear;
        break;
    }
    case Family::two_lines: {
        const double theta = spec.param("theta", 30.0);
        if (!(theta > 0.0 && theta <= 90.0))
            throw InvalidInstance("two_lines: theta must lie in (0, 90] degrees");
        const double a = theta * std::numbers::pi / 180.0;
        Point d(2);
        d << std::cos(a), std::sin(a);
        P.K = std::make_shared<AffineSet>(AffineManifold(Point::Zero(2), {d}));
        P.U = std::make_shared<AffineSet>(AffineManifold::coordinate(Point::Zero(2), {0}));
        P.known_solution = Point::Zero(2);
        inst.x0 = start_point(spec, 2, 3.0);
        inst.meta.omega = std::sin(a);
        inst.meta.n = 1;
        inst.map_prediction = theta < 90.0 ? RateClass::linear : RateClass::superlinear;
        inst.crm_prediction = RateClass::superlinear;
        break;
    }
    case Family::product_m_sets: {
        const int n = int_param(spec, "n", 2, 1);
        const int m = int_param(spec, "m", 3, 2);
        if (m < n)
            throw InvalidInstance("product_m_sets: need m >= n hyperplanes for a single common point");
        std::mt19937_64 rng(static_cast<unsigned long long>(spec.param("seed", 1)));
        std::normal_distribution<double> gauss;
        for (int i = 0; i < m; ++i) {
            Point a(n);
            if (n == 2) {
                const double ang = std::numbers::pi * i / m;
                a << std::cos(ang), std::sin(ang);
            } else {
                for (int j = 0; j < n; ++j)
                    a[j] = gauss(rng);
            }
            inst.sets.push_back(std::make_shared<AffineSet>(AffineManifold::hyperplane(a, 0.0)));
        }
        auto [K, U] = product_lift(inst.sets);
        P.K = K;
        P.U = U;
        P.known_solution = Point::Zero(n * m);
        inst.x0 = start_point(spec, n, 3.0);
        inst.meta.n = n;
        inst.witnesses.push_back(Point::Zero(n));
        inst.map_prediction = RateClass::linear;
        break;
    }
    case Family::conjecture_probe: {
        const int n = int_param(spec, "n", 1, 1);
        const double h = spec.param("height", 0.5);
        if (!(h > -1.0 && h <= 1.0))
            throw InvalidInstance("conjecture_probe: height must lie in (-1, 1]");
        Point c = Point::Zero(n + 1);
        c[n] = h;
        P.K = std::make_shared<Ball>(c, 1.0);
        P.U = base_hyperplane(n);
        inst.x0 = start_point(spec, n + 1, 3.0);
        inst.meta.n = n;
        const double rho = std::sqrt(std::max(0.0, 1.0 - h * h));
        const Point x = inst.x0.head(n);
        if (inst.x0[n] == 0.0 && x.norm() > rho) {
            Point ray = Point::Zero(n + 1);
            ray.head(n) = rho * x / x.norm();
            inst.ray_solution = ray;
        }
        inst.witnesses.push_back(Point::Zero(n + 1));
        inst.map_prediction = h < 1.0 ? RateClass::linear : RateClass::sublinear;
        inst.crm_prediction = h < 1.0 ? RateClass::superlinear : RateClass::linear;
        break;
    }
    }
    if (spec.family != Family::product_m_sets) {
        P.validate();
        if (P.known_solution && inst.witnesses.empty())
            inst.witnesses.push_back(*P.known_solution);
    }
    return inst;
}

double dominance_check(const Problem &P, const Trace &crm_trace, const std::vector<Point> &witnesses) {
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < crm_trace.size(); ++k) {
        const Point &x = crm_trace.iterates[k];
        const Point t = map_step(P, x);
        for (const auto &y : witnesses)
            worst = std::max(worst, (crm_trace.iterates[k + 1] - y).norm() - (t - y).norm());
    }
    return worst;
}

MethodResult analyse_trace(Trace trace, const std::optional<Point> &reference) {
    MethodResult out;
    if (reference)
        trace.attach_reference(*reference);
    out.trace = std::move(trace);
    const Trace &tr = out.trace;
    if (tr.iterates.empty())
        throw InvalidArgument("analyse_trace: empty trace");

    const bool self = tr.dist_to_solution.empty();
    std::vector<double> raw = tr.dist_to_solution;
    if (self)
        for (const auto &x : tr.iterates)
            raw.push_back((x - tr.last()).norm());
    try {
        out.report = analyze_errors(truncate_errors(raw, self));
        return out;
    } catch (const InsufficientData &) {
    }
    const double floor = std::max(1e-13, 1e-10 * raw.front());
    const bool at_floor = std::any_of(raw.begin(), raw.end(), [floor](double e) { return e <= floor; });
    if (!at_floor) {
        out.note = "too few error entries";
        return out;
    }
    try {
        out.report = analyze_errors(truncate_errors(raw, self, 3), {}, 3);
        out.note = "short converged trace, window from 3 entries";
        return out;
    } catch (const InsufficientData &) {
    }
    out.finite_termination = !self;
    out.note = out.finite_termination ? "reached the solution in " + std::to_string(tr.size() - 1) + " steps"
                                      : "too few error entries";
    return out;
}

bool ComparisonReport::passed() const {
    if (exploratory)
        return true;
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict &v) { return v.pass; });
}

namespace {

double max_increase(const Trace &tr, const std::vector<Point> &witnesses) {
    double worst = 0.0;
    for (const auto &y : witnesses)
        for (std::size_t k = 0; k + 1 < tr.size(); ++k)
            worst = std::max(worst, (tr.iterates[k + 1] - y).norm() - (tr.iterates[k] - y).norm());
    return worst;
}

void class_verdict(ComparisonReport &rep, const char *name, const MethodResult &res,
                   std::optional<RateClass> predicted) {
    if (!predicted)
        return;
    Verdict v{name, false, ""};
    if (res.report) {
        v.pass = res.report->classification == *predicted;
        v.detail = std::string("measured ") + to_string(res.report->classification) + ", expected " +
                   to_string(*predicted);
    } else if (res.finite_termination) {
        v.pass = *predicted == RateClass::superlinear;
        v.detail = res.note + ", expected " + to_string(*predicted);
    } else {
        v.detail = res.note;
    }
    rep.verdicts.push_back(std::move(v));
}

// Q-constant of a trace: the tail median, or the one-step ratio for a
// trace that reached the solution.
std::optional<double> measured_constant(const MethodResult &res, const std::optional<Point> &ref) {
    if (res.report)
        return res.report->q_hat;
    if (res.finite_termination && ref && res.trace.size() >= 2) {
        const double e0 = (res.trace.iterates[0] - *ref).norm();
        if (e0 > 0.0)
            return (res.trace.iterates[1] - *ref).norm() / e0;
    }
    return std::nullopt;
}

} // namespace

ComparisonReport run_comparison(const InstanceSpec &spec) {
    const Instance inst = build_instance(spec);
    ComparisonReport rep;
    rep.instance = spec;
    const Problem &P = inst.problem;
    const std::optional<Point> ref = inst.ray_solution ? inst.ray_solution : P.known_solution;

    if (inst.family == Family::product_m_sets) {
        const int n = static_cast<int>(inst.x0.size());
        const Point origin = Point::Zero(n);
        rep.map = analyse_trace(run(Method::SiPM, inst.sets, inst.x0, spec.stop, origin), origin);
        rep.crm = analyse_trace(product_crm_run(inst.sets, inst.x0, spec.stop, origin), origin);
        rep.fejer_violation =
            std::max(max_increase(rep.map.trace, inst.witnesses), max_increase(rep.crm.trace, inst.witnesses));
    } else {
        rep.map = analyse_trace(run(Method::MAP, P, inst.x0, spec.stop), ref);
        rep.crm = analyse_trace(run(Method::CRM, P, inst.x0, spec.stop), ref);
        rep.constants = theory_constants(P, inst.meta);
        rep.fejer_violation = std::max(fejer_check(rep.map.trace, inst.witnesses, P),
                                       fejer_check(rep.crm.trace, inst.witnesses, P));
        rep.dominance_violation = dominance_check(P, rep.crm.trace, inst.witnesses);
    }

    class_verdict(rep, "map_classification", rep.map, inst.map_prediction);
    class_verdict(rep, "crm_classification", rep.crm, inst.crm_prediction);

    const auto &tc = rep.constants;
    const bool crm_linear_like = rep.crm.finite_termination ||
                                 (rep.crm.report && rep.crm.report->classification != RateClass::sublinear);
    const std::optional<double> crm_bound = tc.crm_family1_bound ? tc.crm_family1_bound : tc.crm_bound;
    if (crm_bound && crm_linear_like) {
        const auto q = measured_constant(rep.crm, ref);
        if (q) {
            const bool radial = inst.meta.family != Family::family1_smooth && tc.crm_family1_bound;
            Verdict v{"crm_constant_within_bound", *q <= *crm_bound + 0.02,
                      "measured " + num(*q) + ", bound " + num(*crm_bound) + (radial ? " (1 - gamma_hat)" : "")};
            rep.verdicts.push_back(std::move(v));
        }
    }
    if (tc.map_bound) {
        const auto q = measured_constant(rep.map, ref);
        if (q)
            rep.verdicts.push_back({"map_constant_within_bound", *q <= *tc.map_bound + 1e-9,
                                    "measured " + num(*q) + ", bound " + num(*tc.map_bound)});
    }
    rep.verdicts.push_back({"fejer_monotone", rep.fejer_violation <= 1e-10,
                            "max violation " + num(rep.fejer_violation)});
    if (rep.dominance_violation)
        rep.verdicts.push_back({"crm_dominates_map", *rep.dominance_violation <= 1e-10,
                                "max excess " + num(*rep.dominance_violation)});
    if (tc.map_family2_constant) {
        Verdict v{"map_family2_constant", false, ""};
        if (rep.map.report) {
            const double q = rep.map.report->q_hat;
            v.pass = std::abs(q - *tc.map_family2_constant) <= 0.01;
            v.detail = "measured " + num(q) + ", predicted " + num(*tc.map_family2_constant) +
                       " (ray linearization " + num(*tc.map_family2_ray_rate) + ")";
        } else {
            v.detail = rep.map.note;
        }
        rep.verdicts.push_back(std::move(v));
    }
    return rep;
}

ComparisonReport conjecture_probe(const InstanceSpec &spec) {
    ComparisonReport rep = run_comparison(spec);
    rep.exploratory = true;
    return rep;
}

} // namespace circumfeas
